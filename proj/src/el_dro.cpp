#include "eldro/el_dro.hpp"

#include "eldro/error.hpp"
#include "eldro/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace eldro {

namespace {

constexpr int kMaxIterations = 400;

struct LambdaRoot {
    double lambda = 0.0;
    double logratio = 0.0;
};

// Root of g(lambda) = sum ht_i / (1 + lambda ht_i) on the open bracket
// (-1/max ht, -1/min ht), where g decreases from +inf to -inf. Requires
// min ht < 0 < max ht. Safeguarded Newton: g' = -dg.
double solve_lambda(std::span<const double> ht, double ht_min, double ht_max, double start) {
    const auto& k = kernels::active();
    double lo = -1.0 / ht_max;
    double hi = -1.0 / ht_min;
    double lambda = (start > lo && start < hi) ? start : 0.0;
    const double scale = hi - lo;
    for (int it = 0; it < kMaxIterations; ++it) {
        const auto m = k.el_moments(ht, lambda);
        if (m.g == 0.0) return lambda;
        if (m.g > 0.0) lo = lambda; else hi = lambda;
        double next = lambda + m.g / m.dg;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - lambda) <= 1e-15 * std::max(std::abs(lambda), scale) || hi - lo <= 1e-16 * scale)
            return next;
        lambda = next;
    }
    return lambda;
}

double sum_log1p(std::span<const double> ht, double lambda) {
    double s = 0.0;
    for (double v : ht) s += std::log1p(lambda * v);
    return s;
}

// Profile log-ratio for mu strictly inside (min, max); ht is scratch space.
LambdaRoot interior_logratio(std::span<const double> values, double mu, std::vector<double>& ht, double start) {
    ht.resize(values.size());
    double ht_min = INFINITY, ht_max = -INFINITY;
    for (std::size_t i = 0; i < values.size(); ++i) {
        ht[i] = values[i] - mu;
        ht_min = std::min(ht_min, ht[i]);
        ht_max = std::max(ht_max, ht[i]);
    }
    LambdaRoot r;
    r.lambda = solve_lambda(ht, ht_min, ht_max, start);
    r.logratio = std::max(0.0, 2.0 * sum_log1p(ht, r.lambda));
    return r;
}

// Upper endpoint sup{ mu : -2 log R(mu) <= kappa } for nondegenerate values.
// The log-ratio is convex in mu with derivative -2 n lambda(mu), so Newton
// steps are taken inside a bisection bracket [a, b] with f(a) <= kappa < f(b).
// Newton approaches the root from the right and never crosses it, so the
// converged iterate is returned rather than the bracket end.
double upper_endpoint(std::span<const double> values, double mean, double vmax, double sd, double kappa) {
    const double n = static_cast<double>(values.size());
    const double range = vmax - *std::min_element(values.begin(), values.end());
    double a = mean;
    double b = vmax;
    std::vector<double> ht;
    double mu = mean + std::sqrt(kappa / n) * sd;
    if (!(mu > a && mu < b)) mu = 0.5 * (a + b);
    double lambda = 0.0;
    for (int it = 0; it < kMaxIterations; ++it) {
        const LambdaRoot r = interior_logratio(values, mu, ht, lambda);
        lambda = r.lambda;
        const double f = r.logratio - kappa;
        if (std::abs(f) <= 1e-14 * std::max(1.0, kappa)) return mu;
        if (f <= 0.0) a = mu; else b = mu;
        const double slope = -2.0 * n * lambda;
        double next = slope > 0.0 ? mu - f / slope : 0.5 * (a + b);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (b - a <= 1e-15 * (std::abs(mu) + range)) return a;
        if (std::abs(next - mu) <= 1e-15 * (std::abs(mu) + range)) return next;
        mu = next;
    }
    return mu;
}

void check_radius(double eta, const char* who) {
    if (!(eta >= 0.0) || std::isnan(eta)) throw DomainError(std::string(who) + ": radius must be >= 0");
}

} // namespace

EvaluatedLoss::EvaluatedLoss(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("EvaluatedLoss: at least one value required");
    for (double v : values_)
        if (!std::isfinite(v)) throw DomainError("EvaluatedLoss: non-finite loss value");
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    min_ = *lo;
    max_ = *hi;
    mean_ = kernels::active().sum(values_) / static_cast<double>(values_.size());
    // Rounding can push the mean of nearly equal values just outside the hull.
    mean_ = std::clamp(mean_, min_, max_);
}

double EvaluatedLoss::stddev_n() const {
    const auto m = kernels::active().cross_moments(values_, values_, mean_, mean_);
    return std::sqrt(m.sxx / static_cast<double>(values_.size()));
}

ElSolution profile_el_logratio(const EvaluatedLoss& loss, double mu) {
    if (!std::isfinite(mu)) throw DomainError("profile_el_logratio: mean must be finite");
    const std::size_t n = loss.n();
    ElSolution sol;
    if (mu < loss.min() || mu > loss.max() || ((mu == loss.min() || mu == loss.max()) && !loss.degenerate())) {
        // No strictly positive weight vector attains mu (a zero weight already
        // sends -2 log R to infinity).
        sol.logratio = kInfiniteLogRatio;
        return sol;
    }
    if (loss.degenerate()) {
        sol.weights.assign(n, 1.0 / static_cast<double>(n));
        return sol;
    }
    std::vector<double> ht;
    const LambdaRoot r = interior_logratio(loss.values(), mu, ht, 0.0);
    sol.lambda = r.lambda;
    sol.logratio = r.logratio;
    sol.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) sol.weights[i] = 1.0 / (static_cast<double>(n) * (1.0 + r.lambda * ht[i]));
    // The root equation forces sum w = 1 exactly in exact arithmetic; remove the
    // residual rounding so the simplex constraint holds to machine precision.
    const double total = std::accumulate(sol.weights.begin(), sol.weights.end(), 0.0);
    for (auto& w : sol.weights) w /= total;
    return sol;
}

double profile_el_logratio_value(const EvaluatedLoss& loss, double mu) {
    if (!std::isfinite(mu)) throw DomainError("profile_el_logratio_value: mean must be finite");
    if (mu < loss.min() || mu > loss.max()) return kInfiniteLogRatio;
    if (loss.degenerate()) return 0.0;
    if (mu == loss.min() || mu == loss.max()) return kInfiniteLogRatio;
    std::vector<double> ht;
    return interior_logratio(loss.values(), mu, ht, 0.0).logratio;
}

Band band_from_radius(const EvaluatedLoss& loss, double eta) {
    check_radius(eta, "band_from_radius");
    if (eta == 0.0 || loss.degenerate()) return {loss.mean(), loss.mean()};
    const double kappa = 2.0 * static_cast<double>(loss.n()) * eta;
    const double sd = loss.stddev_n();
    Band band;
    band.upper = upper_endpoint(loss.values(), loss.mean(), loss.max(), sd, kappa);
    std::vector<double> negated(loss.values().begin(), loss.values().end());
    for (auto& v : negated) v = -v;
    band.lower = -upper_endpoint(negated, -loss.mean(), -loss.min(), sd, kappa);
    return band;
}

namespace detail {

double burg_dual_sup(std::span<const double> values, std::span<const double> weights, double eta) {
    const auto& k = kernels::active();
    const std::size_t n = values.size();
    const double vmax = *std::max_element(values.begin(), values.end());
    const double vmin = *std::min_element(values.begin(), values.end());
    const double range = vmax - vmin;
    // Gap form: with d_i = vmax - v_i and s = lambda - vmax - gamma > 0 the
    // optimal weights are p_i = w_i lambda / (s + d_i), the inner condition
    // sum p = 1 fixes s(lambda), and the dual objective becomes
    //   lambda (eta - D(lambda)) - lambda + vmax + s,  D = sum w_i log((s + d_i)/lambda),
    // whose lambda-derivative is eta - D. D decreases in lambda.
    std::vector<double> d(n);
    double top_mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = vmax - values[i];
        if (d[i] == 0.0) top_mass += weights[i];
    }

    auto inner_gap = [&](double lambda) {
        // lambda * sum w/(s+d) - 1 is convex decreasing in s; Newton from the
        // left end s = lambda * top_mass increases monotonically to the root.
        double s = lambda * top_mass;
        for (int it = 0; it < kMaxIterations; ++it) {
            const auto m = k.dual_moments(d, weights, s);
            const double f = lambda * m.mass - 1.0;
            if (f <= 0.0) break;
            const double step = f / (lambda * m.dmass);
            s += step;
            if (step <= 1e-16 * s) break;
        }
        return std::min(s, lambda);
    };
    auto divergence = [&](double lambda, double s) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += weights[i] * std::log((s + d[i]) / lambda);
        return acc;
    };

    double lo = range, hi = range;
    while (divergence(lo, inner_gap(lo)) < eta) {
        lo *= 0.5;
        if (lo < 1e-300) throw NumericalError("burg_dual_sup: failed to bracket the multiplier from below");
    }
    while (divergence(hi, inner_gap(hi)) > eta) {
        hi *= 2.0;
        if (hi > 1e300) throw NumericalError("burg_dual_sup: failed to bracket the multiplier from above");
    }
    // Bisection in log(lambda) on the sign of the dual derivative.
    for (int it = 0; it < kMaxIterations && hi > lo * (1.0 + 1e-15); ++it) {
        const double mid = std::sqrt(lo * hi);
        if (mid <= lo || mid >= hi) break;
        if (divergence(mid, inner_gap(mid)) > eta) lo = mid; else hi = mid;
    }
    auto objective = [&](double lambda) {
        const double s = inner_gap(lambda);
        return lambda * (eta - divergence(lambda, s)) - lambda + vmax + s;
    };
    return std::min(objective(lo), objective(hi));
}

} // namespace detail

double dro_dual_upper(const EvaluatedLoss& loss, double eta) {
    check_radius(eta, "dro_dual_upper");
    if (eta == 0.0 || loss.degenerate()) return loss.mean();
    const std::vector<double> w(loss.n(), 1.0 / static_cast<double>(loss.n()));
    return detail::burg_dual_sup(loss.values(), w, eta);
}

double dro_dual_lower(const EvaluatedLoss& loss, double eta) {
    check_radius(eta, "dro_dual_lower");
    if (eta == 0.0 || loss.degenerate()) return loss.mean();
    std::vector<double> negated(loss.values().begin(), loss.values().end());
    for (auto& v : negated) v = -v;
    const std::vector<double> w(loss.n(), 1.0 / static_cast<double>(loss.n()));
    return -detail::burg_dual_sup(negated, w, eta);
}

Band histogram_band(std::span<const double> support_losses, std::span<const std::size_t> counts, double eta) {
    check_radius(eta, "histogram_band");
    if (support_losses.size() != counts.size())
        throw DomainError("histogram_band: support_losses and counts differ in length");
    const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    if (total == 0) throw DomainError("histogram_band: all counts are zero");
    std::vector<double> v, w;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) continue;
        if (!std::isfinite(support_losses[i])) throw DomainError("histogram_band: non-finite loss value");
        v.push_back(support_losses[i]);
        w.push_back(static_cast<double>(counts[i]) / static_cast<double>(total));
    }
    double center = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) center += w[i] * v[i];
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (eta == 0.0 || *lo == *hi) return {center, center};
    Band band;
    band.upper = detail::burg_dual_sup(v, w, eta);
    for (auto& x : v) x = -x;
    band.lower = -detail::burg_dual_sup(v, w, eta);
    return band;
}

} // namespace eldro
