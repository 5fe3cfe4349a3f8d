#include "eldro/experiments.hpp"

#include "eldro/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

namespace eldro {

namespace {

constexpr std::size_t kMaxAbortMessages = 5;

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RadiusPolicy effective_policy(const ExperimentConfig& config) {
    RadiusPolicy p = config.policy;
    p.alpha = config.alpha;
    if (auto* e = std::get_if<ExcursionEuler>(&p.variant);
        e && config.mode == CoverageMode::Simultaneous)
        e->grid = config.grid;
    if (auto* m = std::get_if<ExcursionMC>(&p.variant); m && config.mode == CoverageMode::Simultaneous)
        m->grid = config.grid;
    return p;
}

using ReplicationFn = std::function<ReplicationSummary(std::size_t r)>;

// Runs every replication (optionally on several threads) and reduces the
// summaries in replication order, so the report never depends on scheduling.
CoverageReport aggregate(const ExperimentConfig& config, std::string calib, const ReplicationFn& run_one) {
    std::vector<ReplicationSummary> summaries(config.reps);
    std::vector<std::string> errors(config.reps);
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t r = begin; r < config.reps; r += stride) {
            try {
                summaries[r] = run_one(r);
            } catch (const std::exception& e) {
                summaries[r] = ReplicationSummary{};
                summaries[r].aborted = true;
                errors[r] = e.what();
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(config.reps)));
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
        for (auto& th : pool) th.join();
    }

    CoverageReport rep;
    rep.config = config;
    rep.calib = std::move(calib);
    rep.reps = config.reps;
    double q_sum = 0.0;
    for (std::size_t r = 0; r < config.reps; ++r) {
        const auto& s = summaries[r];
        if (s.aborted) {
            ++rep.aborts;
            if (rep.abort_messages.size() < kMaxAbortMessages)
                rep.abort_messages.push_back("replication " + std::to_string(r) + ": " + errors[r]);
            continue;
        }
        ++rep.completed;
        rep.successes_two += s.covered_two ? 1 : 0;
        rep.successes_one += s.covered_one ? 1 : 0;
        q_sum += s.q;
    }
    if (rep.completed > 0) {
        const double c = static_cast<double>(rep.completed);
        rep.coverage_two_sided = static_cast<double>(rep.successes_two) / c;
        rep.coverage_one_sided = static_cast<double>(rep.successes_one) / c;
        rep.ci_two = binomial_ci(rep.successes_two, rep.completed, 0.95);
        rep.ci_one = binomial_ci(rep.successes_one, rep.completed, 0.95);
        rep.mean_qn = q_sum / c;
    }
    if (config.keep_replications) rep.replications = std::move(summaries);
    return rep;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

void ExperimentConfig::validate() const {
    if (reps < 1) throw DomainError("config: reps must be >= 1");
    if (n < 2) throw DomainError("config: n must be >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("config: alpha must lie in (0,1)");
    if (!(rate > 0.0)) throw DomainError("config: rate must be positive");
    if (!(upper > 0.0)) throw DomainError("config: upper must be positive");
    if (dist == DemandLaw::Discrete && k < 2) throw DomainError("config: k must be >= 2");
    if (dist == DemandLaw::Continuous && std::holds_alternative<HistogramChi2>(policy.variant))
        throw DomainError("config: chi2-k calibration needs a discrete demand law");
    if (!std::isfinite(x0)) throw DomainError("config: x0 must be finite");
    RadiusPolicy p = policy;
    p.alpha = alpha;
    p.validate();
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream s;
    s << "mode=" << (mode == CoverageMode::Pointwise ? "pointwise" : "simultaneous")
      << ";dist=" << (dist == DemandLaw::Discrete ? "discrete" : "continuous") << ";k=" << k
      << ";rate=" << fmt17(rate) << ";upper=" << fmt17(upper) << ";n=" << n << ";reps=" << reps
      << ";alpha=" << fmt17(alpha) << ";calib=" << policy.tag();
    if (const auto* h = std::get_if<HistogramChi2>(&policy.variant)) s << ";hk=" << h->k;
    if (const auto* e = std::get_if<ExcursionEuler>(&policy.variant)) s << ";delta=" << fmt17(e->delta);
    if (const auto* m = std::get_if<ExcursionMC>(&policy.variant)) s << ";mcreps=" << m->reps;
    s << ";v=" << fmt17(loss.price) << ";s=" << fmt17(loss.salvage) << ";l=" << fmt17(loss.shortage)
      << ";c=" << fmt17(loss.cost) << ";rho=" << fmt17(loss.threshold) << ";x0=" << fmt17(x0) << ";grid=";
    for (double x : grid.points()) s << fmt17(x) << ',';
    s << ";seed=" << seed.value;
    return s.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical()); }

Band clt_interval(std::span<const double> data, const LossModel& loss, double x, double alpha) {
    if (data.size() < 2) throw DomainError("clt_interval: need n >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("clt_interval: alpha must lie in (0,1)");
    const std::vector<double> h = loss.evaluate_at(x, data);
    const double n = static_cast<double>(h.size());
    double mean = 0.0;
    for (double v : h) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : h) ss += (v - mean) * (v - mean);
    const double half = std_normal_quantile(1.0 - alpha / 2.0) * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return {mean - half, mean + half};
}

ProportionInterval binomial_ci(std::size_t successes, std::size_t reps, double level) {
    if (reps == 0 || successes > reps) throw DomainError("binomial_ci: need 0 <= successes <= reps, reps >= 1");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("binomial_ci: level must lie in (0,1)");
    const double p = static_cast<double>(successes) / static_cast<double>(reps);
    const double half = std_normal_quantile(0.5 * (1.0 + level)) * std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
    return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

Pmf demand_pmf(const ExperimentConfig& config) { return discretize_exponential(config.rate, config.k, config.upper); }

double true_mean(const ExperimentConfig& config, double x) {
    if (config.dist == DemandLaw::Continuous) return true_mean_exponential(config.loss, config.rate, x);
    return true_mean_discrete(newsvendor_loss(config.loss), demand_pmf(config), x);
}

std::vector<double> replication_sample(const ExperimentConfig& config, Rng& rng) {
    if (config.dist == DemandLaw::Continuous) return sample_exponential(config.rate, config.n, rng);
    return sample_discrete(demand_pmf(config), config.n, rng);
}

CoverageReport run_pointwise(const ExperimentConfig& config) {
    config.validate();
    const LossModel loss = newsvendor_loss(config.loss);
    const RadiusPolicy policy = effective_policy(config);
    const double z0 = true_mean(config, config.x0);
    return aggregate(config, policy.tag(), [&](std::size_t r) {
        Rng rng(config.seed.for_replication(r));
        const std::vector<double> data = replication_sample(config, rng);
        const CalibrationResult cal = calibrate(policy, data, loss, rng);
        const EvaluatedLoss values(loss.evaluate_at(config.x0, data));
        const Band band = band_from_radius(values, cal.eta);
        ReplicationSummary s;
        s.q = cal.q;
        s.covered_two = band.contains(z0);
        s.covered_one = z0 <= band.upper;
        s.min_width = band.width();
        return s;
    });
}

CoverageReport run_pointwise_clt(const ExperimentConfig& config) {
    config.validate();
    const LossModel loss = newsvendor_loss(config.loss);
    const double z0 = true_mean(config, config.x0);
    const double zcrit = std_normal_quantile(1.0 - config.alpha / 2.0);
    return aggregate(config, "clt", [&](std::size_t r) {
        Rng rng(config.seed.for_replication(r));
        const std::vector<double> data = replication_sample(config, rng);
        const Band band = clt_interval(data, loss, config.x0, config.alpha);
        ReplicationSummary s;
        s.q = zcrit * zcrit;
        s.covered_two = band.contains(z0);
        s.covered_one = z0 <= band.upper;
        s.min_width = band.width();
        return s;
    });
}

CoverageReport run_simultaneous(const ExperimentConfig& config) {
    config.validate();
    const LossModel loss = newsvendor_loss(config.loss);
    if (!config.grid.within(loss.domain)) throw DomainError("config: grid leaves the decision domain");
    const RadiusPolicy policy = effective_policy(config);
    std::vector<double> z0(config.grid.size());
    for (std::size_t j = 0; j < z0.size(); ++j) z0[j] = true_mean(config, config.grid.points()[j]);
    return aggregate(config, policy.tag(), [&](std::size_t r) {
        Rng rng(config.seed.for_replication(r));
        const std::vector<double> data = replication_sample(config, rng);
        const CalibrationResult cal = calibrate(policy, data, loss, rng);
        ReplicationSummary s;
        s.q = cal.q;
        s.covered_two = true;
        s.covered_one = true;
        s.min_width = INFINITY;
        for (std::size_t j = 0; j < z0.size(); ++j) {
            const EvaluatedLoss values(loss.evaluate_at(config.grid.points()[j], data));
            const Band band = band_from_radius(values, cal.eta);
            s.covered_two = s.covered_two && band.contains(z0[j]);
            s.covered_one = s.covered_one && z0[j] <= band.upper;
            s.min_width = std::min(s.min_width, band.width());
        }
        return s;
    });
}

CoverageReport run_coverage(const ExperimentConfig& config) {
    return config.mode == CoverageMode::Pointwise ? run_pointwise(config) : run_simultaneous(config);
}

const std::string& csv_header() {
    static const std::string header =
        "config_hash,mode,dist,k,n,reps,alpha,calib,coverage2,ci2_lo,ci2_hi,coverage1,ci1_lo,ci1_hi,mean_qn,aborts";
    return header;
}

std::string csv_row(const CoverageReport& r) {
    const auto& c = r.config;
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(c.hash()));
    std::ostringstream s;
    s << hash << ',' << (c.mode == CoverageMode::Pointwise ? "pointwise" : "simultaneous") << ','
      << (c.dist == DemandLaw::Discrete ? "discrete" : "continuous") << ','
      << (c.dist == DemandLaw::Discrete ? std::to_string(c.k) : std::string("NA")) << ',' << c.n << ',' << c.reps
      << ',' << fmt6(c.alpha) << ',' << r.calib << ',' << fmt6(r.coverage_two_sided) << ',' << fmt6(r.ci_two.lo)
      << ',' << fmt6(r.ci_two.hi) << ',' << fmt6(r.coverage_one_sided) << ',' << fmt6(r.ci_one.lo) << ','
      << fmt6(r.ci_one.hi) << ',' << fmt6(r.mean_qn) << ',' << r.aborts;
    return s.str();
}

void write_csv(std::ostream& out, const std::vector<CoverageReport>& reports) {
    out << csv_header() << '\n';
    for (const auto& r : reports) out << csv_row(r) << '\n';
}

} // namespace eldro
