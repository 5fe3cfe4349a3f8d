#pragma once

// Radius policies for the empirical Burg ball. The ball U_n(q / (2n)) uses a
// chi-square-scale quantile q:
//   * pointwise:  q = chi2_{1, 1-alpha}
//   * histogram:  q = chi2_{k-1, 1-alpha}
//   * excursion:  q = (1-alpha)-quantile of sup_x G_n(x)^2 for the Gaussian
//     field G_n with the empirical correlation of h(x; xi_i), either through the
//     mean Euler characteristic (one-dimensional decisions) or by simulation.

#include "eldro/losses.hpp"
#include "eldro/stats.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace eldro {

struct PointwiseChi2 {};

struct HistogramChi2 {
    int k = 2;
};

struct ExcursionEuler {
    DecisionGrid grid = DecisionGrid::newsvendor_default();
    /// Finite-difference half-step; <= 0 selects half the mean grid spacing.
    double delta = 0.0;
};

struct ExcursionMC {
    DecisionGrid grid = DecisionGrid::newsvendor_default();
    std::size_t reps = 100000;
    RandomSeed seed{};
};

using RadiusVariant = std::variant<PointwiseChi2, HistogramChi2, ExcursionEuler, ExcursionMC>;

struct RadiusPolicy {
    RadiusVariant variant;
    double alpha = 0.05;

    /// Throws DomainError unless 0 < alpha < 1, k >= 2, reps >= 1000.
    void validate() const;
    [[nodiscard]] std::string tag() const;
};

struct CalibrationResult {
    double q = 0.0;
    double eta = 0.0;                 // q / (2n)
    std::optional<double> L1;         // Euler route only
    std::string method;
    std::vector<std::string> warnings; // e.g. grid points dropped for zero variance
};

CalibrationResult pointwise_radius(double alpha, std::size_t n);
CalibrationResult histogram_radius(double alpha, std::size_t n, int k);

/// Sample correlation of h(x1; xi) and h(x2; xi) across the data. Throws
/// DegenerateFieldError when either sample variance is zero.
double empirical_correlation(std::span<const double> data, const LossModel& loss, double x1, double x2);

/// Lambda(x) = d^2/dy dz corr(G_n(y), G_n(z)) at y = z = x, by the central
/// difference (1 - r(x + delta, x - delta)) / (2 delta^2), clamped at zero.
/// Throws DomainError when x +- delta leaves the loss domain.
double lambda_x(std::span<const double> data, const LossModel& loss, double x, double delta);

/// Default finite-difference half-step: half the mean grid spacing, or a
/// hundredth of the domain for a one-point grid.
double default_delta(const DecisionGrid& grid, Interval domain);

struct CurvatureEstimate {
    double L1 = 0.0;
    std::vector<std::string> warnings;
};

/// L1 = int sqrt(Lambda(x)) dx by the trapezoid rule on the grid nodes. Nodes
/// whose stencil would leave the domain use a stencil of the same width
/// shifted inward; nodes with a zero-variance stencil end are dropped with a
/// warning.
CurvatureEstimate lk_curvature(std::span<const double> data, const LossModel& loss, const DecisionGrid& grid,
                               double delta);

double lk_curvature_L1(std::span<const double> data, const LossModel& loss, const DecisionGrid& grid,
                       double delta);

/// Mean Euler characteristic approximation for m = 1:
///   P(sup J >= u) ~ P(chi2_1 >= u) + L1 e^{-u/2} / pi.
double euler_tail(double u, double L1);

/// Root of euler_tail(u, L1) = alpha, u >= chi2_{1,1-alpha}.
double solve_qn(double L1, double alpha);

/// Correlation matrix of the field over the grid (row-major), after dropping
/// zero-variance points. kept receives the indices retained.
std::vector<double> grid_correlation(std::span<const double> data, const LossModel& loss, const DecisionGrid& grid,
                                     std::vector<std::size_t>& kept);

/// (1-alpha)-quantile of max_j G_j^2 over reps simulated fields, order
/// statistic ceil((1-alpha) reps).
double mc_sup_quantile(std::span<const double> data, const LossModel& loss, const DecisionGrid& grid, double alpha,
                       std::size_t reps, RandomSeed seed);

/// Rng-driven variant for use inside a replication worker.
double mc_sup_quantile(std::span<const double> data, const LossModel& loss, const DecisionGrid& grid, double alpha,
                       std::size_t reps, Rng& rng);

/// Lower-triangular Cholesky factor of a symmetric matrix with escalating
/// diagonal jitter (0, then 1e-8 up to 1e-4). Throws DegenerateFieldError.
std::vector<double> cholesky_with_jitter(std::vector<double> matrix, std::size_t dim, double* jitter_used = nullptr);

/// Applies the policy to the data for the given loss. The sample size is data.size().
CalibrationResult calibrate(const RadiusPolicy& policy, std::span<const double> data, const LossModel& loss);
CalibrationResult calibrate(const RadiusPolicy& policy, std::span<const double> data, const LossModel& loss,
                            Rng& rng);

} // namespace eldro
