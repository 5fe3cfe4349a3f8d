#pragma once

#include "eldro/stats.hpp"

#include <functional>
#include <span>
#include <vector>

namespace eldro {

/// Closed decision interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
    [[nodiscard]] double length() const { return hi - lo; }
};

/// A loss h(x; xi) with its decision domain. Solvers only ever see the values
/// h(x; xi_i) at the data, so any pure function plugs in.
struct LossModel {
    std::function<double(double x, double xi)> evaluate;
    Interval domain;

    double operator()(double x, double xi) const { return evaluate(x, xi); }

    /// h(x; xi_i) for every data point.
    [[nodiscard]] std::vector<double> evaluate_at(double x, std::span<const double> data) const;
};

/// Newsvendor loss in excess of a threshold:
///   h(x; xi) = -v min(x, xi) - s (x - xi)^+ + l (xi - x)^+ + c x + rho
struct NewsvendorParams {
    double price = 10.0;    // v
    double salvage = 5.0;   // s
    double shortage = 4.0;  // l
    double cost = 3.0;      // c
    double threshold = 40.0; // rho
};

double newsvendor_eval(const NewsvendorParams& p, double x, double xi);

/// Default decision domain of the newsvendor experiments.
inline constexpr Interval kNewsvendorDomain{2.5, 50.0};

LossModel newsvendor_loss(const NewsvendorParams& p = {}, Interval domain = kNewsvendorDomain);

/// Strictly increasing, nonempty list of decisions.
class DecisionGrid {
public:
    explicit DecisionGrid(std::vector<double> points);

    /// steps points evenly spaced on [lo, hi], endpoints included (steps >= 1;
    /// steps == 1 yields {lo}).
    static DecisionGrid linspace(double lo, double hi, std::size_t steps);

    /// {50 j / 20 : j = 1..20}.
    static DecisionGrid newsvendor_default();

    [[nodiscard]] const std::vector<double>& points() const { return points_; }
    [[nodiscard]] std::size_t size() const { return points_.size(); }
    [[nodiscard]] double front() const { return points_.front(); }
    [[nodiscard]] double back() const { return points_.back(); }
    [[nodiscard]] bool within(Interval domain) const;

private:
    std::vector<double> points_;
};

/// Z0(x) = sum_j probs_j h(x, support_j).
double true_mean_discrete(const LossModel& loss, const Pmf& pmf, double x);

/// Z0(x) for xi ~ Exp(rate), in closed form.
double true_mean_exponential(const NewsvendorParams& p, double rate, double x);

} // namespace eldro
