#pragma once

// Special functions, seeded sampling and the discretized exponential demand law.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace eldro {

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

/// Standard normal CDF.
double std_normal_cdf(double z);

/// Standard normal density.
double std_normal_pdf(double z);

/// Inverse of the standard normal CDF. Throws DomainError unless 0 < p < 1.
double std_normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed without
/// cancellation in the tail.
double regularized_gamma_q(double a, double x);

/// P(chi2_df <= u). Throws DomainError for df < 1 or u < 0.
double chi2_cdf(int df, double u);

/// P(chi2_df >= u), accurate far into the tail.
double chi2_sf(int df, double u);

/// u with P(chi2_df <= u) = p. Throws DomainError for df < 1 or p outside (0,1).
double chi2_quantile(int df, double p);

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// 64-bit seed. Replication r of an experiment seeded with s uses
/// RandomSeed{s.value ^ r} (see for_replication).
struct RandomSeed {
    std::uint64_t value = 0;

    [[nodiscard]] RandomSeed for_replication(std::uint64_t r) const { return {value ^ r}; }
    friend bool operator==(const RandomSeed&, const RandomSeed&) = default;
};

/// xoshiro256** with its state expanded from the seed by splitmix64.
class Rng {
public:
    explicit Rng(RandomSeed seed);

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1); never returns 0 or 1.
    double uniform_open();

    /// Standard normal variate (Box-Muller, both outputs used).
    double normal();

private:
    std::array<std::uint64_t, 4> state_{};
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

/// Finite discrete distribution. Support strictly increasing, probabilities
/// nonnegative and summing to one within 1e-12.
class Pmf {
public:
    /// Validates and throws DomainError on any invariant violation.
    Pmf(std::vector<double> support, std::vector<double> probs);

    [[nodiscard]] const std::vector<double>& support() const { return support_; }
    [[nodiscard]] const std::vector<double>& probs() const { return probs_; }
    [[nodiscard]] std::size_t size() const { return support_.size(); }

    /// Smallest index j with cumulative(j) >= u.
    [[nodiscard]] std::size_t inverse_cdf_index(double u) const;

private:
    std::vector<double> support_;
    std::vector<double> probs_;
    std::vector<double> cumulative_;
};

/// Exp(rate) discretized onto the k-grid {upper*j/k : j = 1..k}: atom j < k
/// carries F(upper*j/k) - F(upper*(j-1)/k), the top atom carries the whole
/// tail 1 - F(upper*(k-1)/k).
Pmf discretize_exponential(double rate, int k, double upper);

/// n i.i.d. draws by inverse CDF over the cumulative probabilities.
std::vector<double> sample_discrete(const Pmf& pmf, std::size_t n, RandomSeed seed);
std::vector<double> sample_discrete(const Pmf& pmf, std::size_t n, Rng& rng);

/// n i.i.d. Exp(rate) draws, -log(U)/rate.
std::vector<double> sample_exponential(double rate, std::size_t n, RandomSeed seed);
std::vector<double> sample_exponential(double rate, std::size_t n, Rng& rng);

} // namespace eldro
