#include "eldro/stats.hpp"

#include "eldro/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace eldro {

namespace {

constexpr int kMaxGammaIterations = 10000;
constexpr double kGammaEps = 1e-16;

// P(a, x) by its power series; converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxGammaIterations; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kGammaEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the Legendre continued fraction (modified Lentz); x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxGammaIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kGammaEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_df(int df) {
    if (df < 1) throw DomainError("chi2: degrees of freedom must be >= 1, got " + std::to_string(df));
}

void check_open_probability(double p, const char* who) {
    if (!(p > 0.0 && p < 1.0))
        throw DomainError(std::string(who) + ": probability must lie in (0,1), got " + std::to_string(p));
}

double chi2_pdf(int df, double u) {
    if (u <= 0.0) return df == 2 ? 0.5 : (df == 1 ? INFINITY : 0.0);
    const double k = 0.5 * df;
    return std::exp((k - 1.0) * std::log(u) - 0.5 * u - k * std::numbers::ln2 - std::lgamma(k));
}

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double std_normal_quantile(double p) {
    check_open_probability(p, "std_normal_quantile");
    if (p == 0.5) return 0.0;
    // Solve in the lower tail where erfc keeps full relative precision, then reflect.
    const bool upper = p > 0.5;
    const double target = upper ? 1.0 - p : p;
    double lo = -40.0, hi = 0.0;
    double z = -std::sqrt(-2.0 * std::log(target)); // crude start, below the root
    z = std::clamp(z, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const double f = std_normal_cdf(z) - target;
        if (f > 0.0) hi = z; else lo = z;
        const double step = f / std_normal_pdf(z);
        double next = z - step;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::abs(next - z) <= 1e-15 * (1.0 + std::abs(z))) { z = next; break; }
        z = next;
    }
    return upper ? -z : z;
}

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) throw DomainError("regularized_gamma_p: a must be positive");
    if (x < 0.0) throw DomainError("regularized_gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0)) throw DomainError("regularized_gamma_q: a must be positive");
    if (x < 0.0) throw DomainError("regularized_gamma_q: x must be nonnegative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double chi2_cdf(int df, double u) {
    check_df(df);
    if (!(u >= 0.0)) throw DomainError("chi2_cdf: u must be nonnegative");
    if (std::isinf(u)) return 1.0;
    return regularized_gamma_p(0.5 * df, 0.5 * u);
}

double chi2_sf(int df, double u) {
    check_df(df);
    if (!(u >= 0.0)) throw DomainError("chi2_sf: u must be nonnegative");
    if (std::isinf(u)) return 0.0;
    return regularized_gamma_q(0.5 * df, 0.5 * u);
}

double chi2_quantile(int df, double p) {
    check_df(df);
    check_open_probability(p, "chi2_quantile");
    // Upper quantiles are located through the survival function for accuracy.
    const bool use_sf = p > 0.5;
    const double target = use_sf ? 1.0 - p : p;
    auto residual = [&](double u) { return use_sf ? target - chi2_sf(df, u) : chi2_cdf(df, u) - target; };

    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(df));
    while (residual(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    double u = 0.5 * (lo + hi);
    for (int it = 0; it < 500; ++it) {
        const double f = residual(u);
        if (f == 0.0) return u;
        if (f > 0.0) hi = u; else lo = u;
        const double dens = chi2_pdf(df, u);
        double next = (dens > 0.0 && std::isfinite(dens)) ? u - f / dens : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - u) <= 1e-15 * u || hi - lo <= 1e-15 * hi) { u = next; break; }
        u = next;
    }
    return u;
}

Rng::Rng(RandomSeed seed) {
    std::uint64_t x = seed.value;
    for (auto& s : state_) s = splitmix64(x);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform_open() {
    // 53 random bits, shifted by half an ulp so both endpoints are excluded.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Pmf::Pmf(std::vector<double> support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
    if (support_.empty()) throw DomainError("Pmf: empty support");
    if (support_.size() != probs_.size()) throw DomainError("Pmf: support/probs size mismatch");
    for (std::size_t i = 1; i < support_.size(); ++i)
        if (!(support_[i] > support_[i - 1])) throw DomainError("Pmf: support must be strictly increasing");
    double total = 0.0;
    cumulative_.reserve(probs_.size());
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("Pmf: probabilities must be nonnegative and finite");
        total += p;
        cumulative_.push_back(total);
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("Pmf: probabilities must sum to 1");
    cumulative_.back() = 1.0;
}

std::size_t Pmf::inverse_cdf_index(double u) const {
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
    return std::min(idx, cumulative_.size() - 1);
}

Pmf discretize_exponential(double rate, int k, double upper) {
    if (k < 2) throw DomainError("discretize_exponential: k must be >= 2");
    if (!(rate > 0.0)) throw DomainError("discretize_exponential: rate must be positive");
    if (!(upper > 0.0)) throw DomainError("discretize_exponential: upper must be positive");
    // Survival S(t) = exp(-rate t); atom j gets S(t_{j-1}) - S(t_j) = -expm1 form to
    // avoid cancellation when the cell mass is small.
    std::vector<double> support(static_cast<std::size_t>(k));
    std::vector<double> probs(static_cast<std::size_t>(k));
    const double width = upper / k;
    for (int j = 1; j <= k; ++j) {
        support[j - 1] = upper * j / k;
        const double left = upper * (j - 1) / k;
        if (j < k)
            probs[j - 1] = std::exp(-rate * left) * -std::expm1(-rate * width);
        else
            probs[j - 1] = std::exp(-rate * left);
    }
    return Pmf(std::move(support), std::move(probs));
}

std::vector<double> sample_discrete(const Pmf& pmf, std::size_t n, Rng& rng) {
    std::vector<double> out(n);
    for (auto& v : out) v = pmf.support()[pmf.inverse_cdf_index(rng.uniform_open())];
    return out;
}

std::vector<double> sample_discrete(const Pmf& pmf, std::size_t n, RandomSeed seed) {
    Rng rng(seed);
    return sample_discrete(pmf, n, rng);
}

std::vector<double> sample_exponential(double rate, std::size_t n, Rng& rng) {
    if (!(rate > 0.0)) throw DomainError("sample_exponential: rate must be positive");
    std::vector<double> out(n);
    for (auto& v : out) v = -std::log(rng.uniform_open()) / rate;
    return out;
}

std::vector<double> sample_exponential(double rate, std::size_t n, RandomSeed seed) {
    Rng rng(seed);
    return sample_exponential(rate, n, rng);
}

} // namespace eldro
