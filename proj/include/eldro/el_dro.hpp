#pragma once

// Bounds on E_P[h] over the empirical Burg-entropy ball
//   U_n(eta) = { w : -(1/n) sum log(n w_i) <= eta, sum w_i = 1, w >= 0 }.
//
// Two independent routes are provided. The primary one goes through the
// profile empirical-likelihood ratio: the band endpoints are the means mu at
// which -2 log R(mu) reaches 2 n eta. The second solves the Lagrangian dual
// of the ball program directly. They agree to solver precision.

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace eldro {

/// Marks -2 log R(mu) for a mean outside the convex hull of the data, where
/// the profile likelihood has no feasible weight vector.
inline constexpr double kInfiniteLogRatio = std::numeric_limits<double>::infinity();

/// Loss values h(x; xi_i) at a fixed decision, with cached summaries.
class EvaluatedLoss {
public:
    /// Throws DomainError when empty or when any value is non-finite.
    explicit EvaluatedLoss(std::vector<double> values);

    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::size_t n() const { return values_.size(); }
    [[nodiscard]] double mean() const { return mean_; }
    [[nodiscard]] double min() const { return min_; }
    [[nodiscard]] double max() const { return max_; }
    [[nodiscard]] double range() const { return max_ - min_; }
    /// All values identical; the ball then collapses to a point mass in value.
    [[nodiscard]] bool degenerate() const { return max_ == min_; }
    /// Sample standard deviation with divisor n.
    [[nodiscard]] double stddev_n() const;

private:
    std::vector<double> values_;
    double mean_ = 0.0;
    double min_ = 0.0;
    double max_ = 0.0;
};

struct ElSolution {
    double lambda = 0.0;
    std::vector<double> weights; // empty when infeasible
    double logratio = 0.0;       // -2 log R(mu); kInfiniteLogRatio when infeasible

    [[nodiscard]] bool feasible() const { return logratio != kInfiniteLogRatio; }
};

struct Band {
    double lower = 0.0;
    double upper = 0.0;

    [[nodiscard]] double width() const { return upper - lower; }
    [[nodiscard]] bool contains(double z) const { return lower <= z && z <= upper; }
};

/// Profile EL ratio at mean mu. Inside (min, max) the multiplier solves
/// sum (h_i - mu)/(1 + lambda (h_i - mu)) = 0 and w_i = 1/(n (1 + lambda (h_i - mu))).
ElSolution profile_el_logratio(const EvaluatedLoss& loss, double mu);

/// -2 log R(mu) only, without materializing the weights.
double profile_el_logratio_value(const EvaluatedLoss& loss, double mu);

/// [min, max] of sum w_i h_i over U_n(eta), via bisection/Newton on the EL ratio.
Band band_from_radius(const EvaluatedLoss& loss, double eta);

/// max over U_n(eta) through the dual
///   min_{lambda >= 0, gamma} -sum (lambda/n) log(1 - (h_i + gamma)/lambda) + lambda eta - gamma.
double dro_dual_upper(const EvaluatedLoss& loss, double eta);

/// min over U_n(eta); equals -dro_dual_upper(-h, eta).
double dro_dual_lower(const EvaluatedLoss& loss, double eta);

/// Band over the histogram ball
///   { p : -sum phat_i log(p_i / phat_i) <= eta, sum p = 1, p >= 0 },  phat_i = n_i / n.
/// Support points with zero count receive zero mass (absolute continuity).
Band histogram_band(std::span<const double> support_losses, std::span<const std::size_t> counts, double eta);

namespace detail {

/// sup of sum p_i v_i over { p : -sum w_i log(p_i / w_i) <= eta }, w > 0, sum w = 1,
/// values not all equal, eta > 0. Shared by the empirical and histogram duals.
double burg_dual_sup(std::span<const double> values, std::span<const double> weights, double eta);

} // namespace detail

} // namespace eldro
