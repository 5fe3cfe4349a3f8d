#include "eldro/losses.hpp"

#include "eldro/error.hpp"

#include <algorithm>
#include <cmath>

namespace eldro {

std::vector<double> LossModel::evaluate_at(double x, std::span<const double> data) const {
    std::vector<double> out(data.size());
    std::transform(data.begin(), data.end(), out.begin(), [&](double xi) { return evaluate(x, xi); });
    return out;
}

double newsvendor_eval(const NewsvendorParams& p, double x, double xi) {
    return -p.price * std::min(x, xi) - p.salvage * std::max(x - xi, 0.0) + p.shortage * std::max(xi - x, 0.0) +
           p.cost * x + p.threshold;
}

LossModel newsvendor_loss(const NewsvendorParams& p, Interval domain) {
    return LossModel{[p](double x, double xi) { return newsvendor_eval(p, x, xi); }, domain};
}

DecisionGrid::DecisionGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) throw DomainError("DecisionGrid: empty grid");
    for (std::size_t i = 1; i < points_.size(); ++i)
        if (!(points_[i] > points_[i - 1])) throw DomainError("DecisionGrid: points must be strictly increasing");
}

DecisionGrid DecisionGrid::linspace(double lo, double hi, std::size_t steps) {
    if (steps == 0) throw DomainError("DecisionGrid::linspace: steps must be >= 1");
    if (steps == 1) return DecisionGrid({lo});
    if (!(hi > lo)) throw DomainError("DecisionGrid::linspace: hi must exceed lo");
    std::vector<double> pts(steps);
    const double den = static_cast<double>(steps - 1);
    for (std::size_t j = 0; j < steps; ++j) pts[j] = lo + (hi - lo) * static_cast<double>(j) / den;
    pts.back() = hi;
    return DecisionGrid(std::move(pts));
}

DecisionGrid DecisionGrid::newsvendor_default() {
    std::vector<double> pts(20);
    for (int j = 1; j <= 20; ++j) pts[j - 1] = 50.0 * j / 20.0;
    return DecisionGrid(std::move(pts));
}

bool DecisionGrid::within(Interval domain) const {
    return domain.contains(points_.front()) && domain.contains(points_.back());
}

double true_mean_discrete(const LossModel& loss, const Pmf& pmf, double x) {
    double z = 0.0;
    for (std::size_t j = 0; j < pmf.size(); ++j) z += pmf.probs()[j] * loss(x, pmf.support()[j]);
    return z;
}

double true_mean_exponential(const NewsvendorParams& p, double rate, double x) {
    if (!(rate > 0.0)) throw DomainError("true_mean_exponential: rate must be positive");
    // With mean m = 1/rate and t = max(x, 0):
    //   E[(xi - x)^+] = m e^{-t/m} + (t - x)
    //   E[min(x, xi)] = E[xi] - E[(xi - x)^+] = m - E[(xi - x)^+]
    //   E[(x - xi)^+] = x - E[min(x, xi)]
    // and h is affine in those three terms.
    const double m = 1.0 / rate;
    const double t = std::max(x, 0.0);
    const double tail = m * std::exp(-t / m) + (t - x);
    const double expected_min = m - tail;
    const double overage = x - expected_min;
    return -p.price * expected_min - p.salvage * overage + p.shortage * tail + p.cost * x + p.threshold;
}

} // namespace eldro
