#pragma once

// Monte Carlo coverage experiments for the newsvendor loss, plus the CLT baseline
// and CSV reporting used by the el-dro CLI.

#include "eldro/calibration.hpp"
#include "eldro/el_dro.hpp"
#include "eldro/losses.hpp"
#include "eldro/stats.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace eldro {

enum class CoverageMode { Pointwise, Simultaneous };
enum class DemandLaw { Discrete, Continuous };

struct ExperimentConfig {
    CoverageMode mode = CoverageMode::Pointwise;
    DemandLaw dist = DemandLaw::Discrete;
    int k = 5;                  // discretization size, Discrete only
    double rate = 1.0 / 20.0;
    double upper = 50.0;
    std::size_t n = 30;
    std::size_t reps = 1000;
    double alpha = 0.05;
    RadiusPolicy policy{PointwiseChi2{}, 0.05};
    NewsvendorParams loss{};
    double x0 = 30.0;
    DecisionGrid grid = DecisionGrid::newsvendor_default();
    RandomSeed seed{20160101};
    unsigned threads = 1;       // results do not depend on this
    bool keep_replications = false;

    /// Throws DomainError on invalid settings (reps >= 1, n >= 2, alpha in (0,1), ...).
    void validate() const;
    /// Stable textual form of every field that affects results.
    [[nodiscard]] std::string canonical() const;
    /// FNV-1a 64 of canonical().
    [[nodiscard]] std::uint64_t hash() const;
};

struct ProportionInterval {
    double lo = 0.0;
    double hi = 0.0;
};

struct ReplicationSummary {
    bool aborted = false;
    bool covered_two = false;
    bool covered_one = false;
    double q = 0.0;
    double min_width = 0.0; // narrowest band over the evaluated decisions
};

struct CoverageReport {
    ExperimentConfig config;
    std::string calib;          // policy tag, or "clt"
    std::size_t reps = 0;
    std::size_t completed = 0;
    std::size_t aborts = 0;
    std::size_t successes_two = 0;
    std::size_t successes_one = 0;
    double coverage_two_sided = 0.0;
    double coverage_one_sided = 0.0;
    ProportionInterval ci_two;
    ProportionInterval ci_one;
    double mean_qn = 0.0;
    std::vector<std::string> abort_messages; // first few, for diagnostics
    std::vector<ReplicationSummary> replications; // filled when keep_replications
};

/// [hbar -+ z_{1-alpha/2} sigma / sqrt(n)] with the (n-1)-divisor sigma.
Band clt_interval(std::span<const double> data, const LossModel& loss, double x, double alpha);

/// Wald interval phat -+ z sqrt(phat (1-phat) / reps), clipped to [0, 1].
ProportionInterval binomial_ci(std::size_t successes, std::size_t reps, double level = 0.95);

/// The demand law selected by the config (discretized Pmf for Discrete).
Pmf demand_pmf(const ExperimentConfig& config);

/// Z0(x) under the config's demand law.
double true_mean(const ExperimentConfig& config, double x);

/// Draws replication r's sample; the stream is Rng(seed ^ r).
std::vector<double> replication_sample(const ExperimentConfig& config, Rng& rng);

/// Coverage of the DRO band at x0.
CoverageReport run_pointwise(const ExperimentConfig& config);

/// Coverage of the CLT interval at x0 on the same data streams.
CoverageReport run_pointwise_clt(const ExperimentConfig& config);

/// Simultaneous coverage over config.grid with one calibration per replication.
CoverageReport run_simultaneous(const ExperimentConfig& config);

/// Dispatches on config.mode.
CoverageReport run_coverage(const ExperimentConfig& config);

/// The CSV header line (no trailing newline).
const std::string& csv_header();

/// One CSV row (no trailing newline), six significant digits.
std::string csv_row(const CoverageReport& report);

void write_csv(std::ostream& out, const std::vector<CoverageReport>& reports);

} // namespace eldro
