#include "eldro/calibration.hpp"

#include "eldro/error.hpp"
#include "eldro/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace eldro {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("calibration: alpha must lie in (0,1)");
}

void check_n(std::size_t n) {
    if (n < 1) throw DomainError("calibration: sample size must be >= 1");
}

// Loss values at x, centered, together with their sum of squares.
struct CenteredColumn {
    std::vector<double> values;
    double mean = 0.0;
    double ss = 0.0;
};

CenteredColumn column_at(std::span<const double> data, const LossModel& loss, double x) {
    CenteredColumn c;
    c.values = loss.evaluate_at(x, data);
    const auto& k = kernels::active();
    c.mean = k.sum(c.values) / static_cast<double>(c.values.size());
    c.ss = k.cross_moments(c.values, c.values, c.mean, c.mean).sxx;
    return c;
}

bool has_variance(const CenteredColumn& c) {
    // Exact zero or pure rounding noise relative to the magnitude of the values.
    double scale = 0.0;
    for (double v : c.values) scale = std::max(scale, std::abs(v));
    const double n = static_cast<double>(c.values.size());
    return c.ss > n * std::pow(1e-13 * std::max(scale, 1e-300), 2);
}

double correlation(const CenteredColumn& a, const CenteredColumn& b) {
    const auto m = kernels::active().cross_moments(a.values, b.values, a.mean, b.mean);
    const double r = m.sxy / std::sqrt(m.sxx * m.syy);
    return std::clamp(r, -1.0, 1.0);
}

CalibrationResult finish(double q, std::size_t n, std::string method) {
    CalibrationResult res;
    res.q = q;
    res.eta = q / (2.0 * static_cast<double>(n));
    res.method = std::move(method);
    return res;
}

} // namespace

void RadiusPolicy::validate() const {
    check_alpha(alpha);
    if (const auto* h = std::get_if<HistogramChi2>(&variant); h && h->k < 2)
        throw DomainError("HistogramChi2: k must be >= 2");
    if (const auto* e = std::get_if<ExcursionEuler>(&variant); e && e->delta < 0.0)
        throw DomainError("ExcursionEuler: delta must be positive (or 0 for the default)");
    if (const auto* m = std::get_if<ExcursionMC>(&variant); m && m->reps < 1000)
        throw DomainError("ExcursionMC: reps must be >= 1000");
}

std::string RadiusPolicy::tag() const {
    struct Visitor {
        std::string operator()(const PointwiseChi2&) const { return "chi2-1"; }
        std::string operator()(const HistogramChi2&) const { return "chi2-k"; }
        std::string operator()(const ExcursionEuler&) const { return "euler"; }
        std::string operator()(const ExcursionMC&) const { return "mc"; }
    };
    return std::visit(Visitor{}, variant);
}

CalibrationResult pointwise_radius(double alpha, std::size_t n) {
    check_alpha(alpha);
    check_n(n);
    return finish(chi2_quantile(1, 1.0 - alpha), n, "chi2-1");
}

CalibrationResult histogram_radius(double alpha, std::size_t n, int k) {
    check_alpha(alpha);
    check_n(n);
    if (k < 2) throw DomainError("histogram_radius: k must be >= 2");
    return finish(chi2_quantile(k - 1, 1.0 - alpha), n, "chi2-k");
}

double empirical_correlation(std::span<const double> data, const LossModel& loss, double x1, double x2) {
    if (data.size() < 2) throw DomainError("empirical_correlation: need at least two data points");
    const CenteredColumn a = column_at(data, loss, x1);
    const CenteredColumn b = column_at(data, loss, x2);
    if (!has_variance(a) || !has_variance(b))
        throw DegenerateFieldError("empirical_correlation: zero sample variance of the loss");
    if (x1 == x2) return 1.0;
    return correlation(a, b);
}

double lambda_x(std::span<const double> data, const LossModel& loss, double x, double delta) {
    if (!(delta > 0.0)) throw DomainError("lambda_x: delta must be positive");
    if (!loss.domain.contains(x - delta) || !loss.domain.contains(x + delta))
        throw DomainError("lambda_x: stencil x +- delta leaves the decision domain");
    const double r = empirical_correlation(data, loss, x + delta, x - delta);
    return std::max(0.0, (1.0 - r) / (2.0 * delta * delta));
}

double default_delta(const DecisionGrid& grid, Interval domain) {
    if (grid.size() < 2) return 0.01 * domain.length();
    return 0.5 * (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
}

CurvatureEstimate lk_curvature(std::span<const double> data, const LossModel& loss, const DecisionGrid& grid,
                               double delta) {
    if (!(delta > 0.0)) throw DomainError("lk_curvature: delta must be positive");
    if (!grid.within(loss.domain)) throw DomainError("lk_curvature: grid leaves the decision domain");
    if (2.0 * delta > loss.domain.length()) throw DomainError("lk_curvature: stencil wider than the domain");
    CurvatureEstimate est;
    std::vector<double> xs, roots;
    for (double x : grid.points()) {
        // Same-width stencil, shifted inward at the domain ends.
        double a = x - delta;
        double b = x + delta;
        if (a < loss.domain.lo) { a = loss.domain.lo; b = a + 2.0 * delta; }
        if (b > loss.domain.hi) { b = loss.domain.hi; a = b - 2.0 * delta; }
        const CenteredColumn ca = column_at(data, loss, a);
        const CenteredColumn cb = column_at(data, loss, b);
        if (!has_variance(ca) || !has_variance(cb)) {
            std::ostringstream msg;
            msg << "dropped grid point x=" << x << " (zero loss variance)";
            est.warnings.push_back(msg.str());
            continue;
        }
        const double r = correlation(ca, cb);
        const double lam = std::max(0.0, (1.0 - r) / (2.0 * delta * delta));
        xs.push_back(x);
        roots.push_back(std::sqrt(lam));
    }
    if (xs.empty() && data.size() >= 1)
        throw DegenerateFieldError("lk_curvature: every grid point has zero loss variance");
    for (std::size_t j = 1; j < xs.size(); ++j) est.L1 += 0.5 * (roots[j] + roots[j - 1]) * (xs[j] - xs[j - 1]);
    return est;
}

double lk_curvature_L1(std::span<const double> data, const LossModel& loss, const DecisionGrid& grid,
                       double delta) {
    return lk_curvature(data, loss, grid, delta).L1;
}

double euler_tail(double u, double L1) {
    if (!(u > 0.0)) throw DomainError("euler_tail: level must be positive");
    if (!(L1 >= 0.0)) throw DomainError("euler_tail: L1 must be nonnegative");
    return chi2_sf(1, u) + L1 * std::exp(-0.5 * u) / std::numbers::pi;
}

double solve_qn(double L1, double alpha) {
    check_alpha(alpha);
    if (!(L1 >= 0.0)) throw DomainError("solve_qn: L1 must be nonnegative");
    const double base = chi2_quantile(1, 1.0 - alpha);
    if (L1 == 0.0) return base;
    double lo = base;
    double hi = base + 1.0;
    while (euler_tail(hi, L1) >= alpha) {
        lo = hi;
        hi = base + 2.0 * (hi - base);
        if (hi > 1e6) throw NumericalError("solve_qn: failed to bracket the root");
    }
    while (hi - lo > 1e-12 * (1.0 + hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (euler_tail(mid, L1) >= alpha) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> grid_correlation(std::span<const double> data, const LossModel& loss, const DecisionGrid& grid,
                                     std::vector<std::size_t>& kept) {
    kept.clear();
    std::vector<CenteredColumn> cols;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        CenteredColumn c = column_at(data, loss, grid.points()[j]);
        if (!has_variance(c)) continue;
        kept.push_back(j);
        cols.push_back(std::move(c));
    }
    if (cols.empty()) throw DegenerateFieldError("grid_correlation: every grid point has zero loss variance");
    const std::size_t m = cols.size();
    std::vector<double> r(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        r[i * m + i] = 1.0;
        for (std::size_t j = 0; j < i; ++j) r[i * m + j] = r[j * m + i] = correlation(cols[i], cols[j]);
    }
    return r;
}

std::vector<double> cholesky_with_jitter(std::vector<double> matrix, std::size_t dim, double* jitter_used) {
    if (matrix.size() != dim * dim) throw DomainError("cholesky_with_jitter: matrix size mismatch");
    auto attempt = [&](double jitter, std::vector<double>& L) {
        L.assign(dim * dim, 0.0);
        for (std::size_t j = 0; j < dim; ++j) {
            double diag = matrix[j * dim + j] + jitter;
            for (std::size_t k = 0; k < j; ++k) diag -= L[j * dim + k] * L[j * dim + k];
            if (!(diag > 0.0)) return false;
            const double ljj = std::sqrt(diag);
            L[j * dim + j] = ljj;
            for (std::size_t i = j + 1; i < dim; ++i) {
                double v = matrix[i * dim + j];
                for (std::size_t k = 0; k < j; ++k) v -= L[i * dim + k] * L[j * dim + k];
                L[i * dim + j] = v / ljj;
            }
        }
        return true;
    };
    std::vector<double> L;
    if (attempt(0.0, L)) {
        if (jitter_used) *jitter_used = 0.0;
        return L;
    }
    for (double jitter = 1e-8; jitter <= 1e-4 * (1.0 + 1e-9); jitter *= 10.0) {
        if (attempt(jitter, L)) {
            if (jitter_used) *jitter_used = jitter;
            return L;
        }
    }
    throw DegenerateFieldError("cholesky_with_jitter: matrix not positive definite even with jitter 1e-4");
}

double mc_sup_quantile(std::span<const double> data, const LossModel& loss, const DecisionGrid& grid, double alpha,
                       std::size_t reps, Rng& rng) {
    check_alpha(alpha);
    if (reps < 1000) throw DomainError("mc_sup_quantile: reps must be >= 1000");
    std::vector<std::size_t> kept;
    const std::vector<double> R = grid_correlation(data, loss, grid, kept);
    const std::size_t m = kept.size();
    const std::vector<double> L = cholesky_with_jitter(R, m);
    std::vector<double> z(m), maxima(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        for (auto& v : z) v = rng.normal();
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double g = 0.0;
            for (std::size_t k = 0; k <= i; ++k) g += L[i * m + k] * z[k];
            best = std::max(best, g * g);
        }
        maxima[r] = best;
    }
    const auto idx = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(reps)));
    const std::size_t pos = std::clamp<std::size_t>(idx, 1, reps) - 1;
    std::nth_element(maxima.begin(), maxima.begin() + static_cast<std::ptrdiff_t>(pos), maxima.end());
    return maxima[pos];
}

double mc_sup_quantile(std::span<const double> data, const LossModel& loss, const DecisionGrid& grid, double alpha,
                       std::size_t reps, RandomSeed seed) {
    Rng rng(seed);
    return mc_sup_quantile(data, loss, grid, alpha, reps, rng);
}

namespace {

CalibrationResult calibrate_impl(const RadiusPolicy& policy, std::span<const double> data, const LossModel& loss,
                                 Rng* rng) {
    policy.validate();
    const std::size_t n = data.size();
    check_n(n);
    if (std::holds_alternative<PointwiseChi2>(policy.variant)) return pointwise_radius(policy.alpha, n);
    if (const auto* h = std::get_if<HistogramChi2>(&policy.variant)) return histogram_radius(policy.alpha, n, h->k);
    if (const auto* e = std::get_if<ExcursionEuler>(&policy.variant)) {
        const double delta = e->delta > 0.0 ? e->delta : default_delta(e->grid, loss.domain);
        CurvatureEstimate est = lk_curvature(data, loss, e->grid, delta);
        CalibrationResult res = finish(solve_qn(est.L1, policy.alpha), n, "euler");
        res.L1 = est.L1;
        res.warnings = std::move(est.warnings);
        return res;
    }
    const auto& mc = std::get<ExcursionMC>(policy.variant);
    const double q = rng ? mc_sup_quantile(data, loss, mc.grid, policy.alpha, mc.reps, *rng)
                         : mc_sup_quantile(data, loss, mc.grid, policy.alpha, mc.reps, mc.seed);
    return finish(q, n, "mc");
}

} // namespace

CalibrationResult calibrate(const RadiusPolicy& policy, std::span<const double> data, const LossModel& loss) {
    return calibrate_impl(policy, data, loss, nullptr);
}

CalibrationResult calibrate(const RadiusPolicy& policy, std::span<const double> data, const LossModel& loss,
                            Rng& rng) {
    return calibrate_impl(policy, data, loss, &rng);
}

} // namespace eldro
