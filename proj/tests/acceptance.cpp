// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Usage: acceptance [path-to-el-dro-cli]

#include "eldro/calibration.hpp"
#include "eldro/el_dro.hpp"
#include "eldro/experiments.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

using namespace eldro;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string pct(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * p);
    return buf;
}

ExperimentConfig make(CoverageMode mode, DemandLaw dist, RadiusVariant v, std::size_t n, int k = 5) {
    ExperimentConfig c;
    c.mode = mode;
    c.dist = dist;
    c.k = k;
    c.n = n;
    c.reps = 1000;
    c.policy = RadiusPolicy{std::move(v), 0.05};
    return c;
}

const std::vector<std::size_t> kSizes{20, 30, 40, 50, 60, 80};

void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_coverage(make(CoverageMode::Pointwise, DemandLaw::Discrete, HistogramChi2{5}, 30));
    const double secs = seconds_since(t0);
    const bool ok = std::abs(r.coverage_two_sided - 0.996) <= 0.010 && secs < 60.0 && r.aborts == 0;
    report(1, ok, "pointwise discrete k=5 n=30 chi2-k coverage " + pct(r.coverage_two_sided) +
                      " (target 99.6% +- 1.0pp), " + std::to_string(secs) + " s");
}

void criterion2() {
    bool ok = true;
    std::string detail = "pointwise discrete n=30 chi2-k coverage";
    for (int k : {10, 15, 20}) {
        const auto r = run_coverage(make(CoverageMode::Pointwise, DemandLaw::Discrete, HistogramChi2{k}, 30, k));
        ok = ok && r.coverage_two_sided >= 0.995 && r.aborts == 0;
        detail += " k=" + std::to_string(k) + ": " + pct(r.coverage_two_sided);
    }
    report(2, ok, detail + " (target >= 99.5%)");
}

void criterion3() {
    const auto r = run_coverage(make(CoverageMode::Pointwise, DemandLaw::Discrete, PointwiseChi2{}, 30));
    const bool ok = std::abs(r.coverage_two_sided - 0.941) <= 0.020 && r.aborts == 0;
    report(3, ok, "pointwise discrete k=5 n=30 chi2-1 coverage " + pct(r.coverage_two_sided) +
                      " (target 94.1% +- 2.0pp)");
}

void criterion4() {
    const auto r50 = run_coverage(make(CoverageMode::Pointwise, DemandLaw::Continuous, PointwiseChi2{}, 50));
    const auto r80 = run_coverage(make(CoverageMode::Pointwise, DemandLaw::Continuous, PointwiseChi2{}, 80));
    const auto r20 = run_coverage(make(CoverageMode::Pointwise, DemandLaw::Continuous, PointwiseChi2{}, 20));
    const bool ok = std::abs(r50.coverage_two_sided - 0.945) <= 0.020 &&
                    std::abs(r80.coverage_two_sided - 0.944) <= 0.020 && r20.coverage_two_sided <= 0.935;
    report(4, ok, "pointwise continuous chi2-1 coverage n=50 " + pct(r50.coverage_two_sided) + " (94.5% +- 2.0pp), n=80 " +
                      pct(r80.coverage_two_sided) + " (94.4% +- 2.0pp), n=20 " + pct(r20.coverage_two_sided) +
                      " (<= 93.5%)");
}

void criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string chi1 = "chi2-1", chik = "chi2-k", eu = "euler";
    for (std::size_t n : kSizes) {
        const auto a = run_coverage(make(CoverageMode::Simultaneous, DemandLaw::Discrete, PointwiseChi2{}, n));
        const auto b = run_coverage(make(CoverageMode::Simultaneous, DemandLaw::Discrete, HistogramChi2{5}, n));
        const auto c = run_coverage(make(CoverageMode::Simultaneous, DemandLaw::Discrete, ExcursionEuler{}, n));
        ok = ok && a.coverage_two_sided >= 0.84 && a.coverage_two_sided <= 0.89;
        ok = ok && b.coverage_two_sided >= 0.978 && b.coverage_two_sided <= 0.995;
        ok = ok && std::abs(c.coverage_two_sided - 0.95) <= 0.020;
        ok = ok && a.aborts == 0 && b.aborts == 0 && c.aborts == 0;
        const std::string tag = " n=" + std::to_string(n) + ":";
        chi1 += tag + pct(a.coverage_two_sided);
        chik += tag + pct(b.coverage_two_sided);
        eu += tag + pct(c.coverage_two_sided);
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 600.0;
    report(5, ok, "simultaneous discrete k=5 two-sided; " + chi1 + " [84%, 89%]; " + chik + " [97.8%, 99.5%]; " + eu +
                      " (95.0% +- 2.0pp); " + std::to_string(secs) + " s");
}

void criterion6() {
    const std::vector<double> two{0.928, 0.936, 0.944, 0.944, 0.957, 0.953};
    const std::vector<double> one{0.936, 0.944, 0.952, 0.952, 0.965, 0.961};
    bool ok = true;
    std::string d2 = "two-sided", d1 = "one-sided";
    for (std::size_t i = 0; i < kSizes.size(); ++i) {
        const auto r = run_coverage(make(CoverageMode::Simultaneous, DemandLaw::Continuous, ExcursionEuler{}, kSizes[i]));
        ok = ok && std::abs(r.coverage_two_sided - two[i]) <= 0.020 && std::abs(r.coverage_one_sided - one[i]) <= 0.020 &&
             r.aborts == 0;
        const std::string tag = " n=" + std::to_string(kSizes[i]) + ":";
        d2 += tag + pct(r.coverage_two_sided) + "/" + pct(two[i]);
        d1 += tag + pct(r.coverage_one_sided) + "/" + pct(one[i]);
    }
    report(6, ok, "simultaneous continuous euler (measured/target, +- 2.0pp) " + d2 + "; " + d1);
}

std::vector<double> random_values(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = -50.0 + 100.0 * rng.uniform_open();
    return v;
}

void criterion7() {
    Rng rng(RandomSeed{2024});
    double worst_rel = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng.next_u64() % 49;
        const EvaluatedLoss loss(random_values(rng, n));
        const double eta = 0.001 + 3.0 * rng.uniform_open();
        const Band b = band_from_radius(loss, eta);
        const double scale = std::max({1.0, std::abs(b.lower), std::abs(b.upper)});
        worst_rel = std::max(worst_rel, std::abs(b.upper - dro_dual_upper(loss, eta)) / scale);
        worst_rel = std::max(worst_rel, std::abs(b.lower - dro_dual_lower(loss, eta)) / scale);
    }
    double worst_abs = 0.0;
    for (int t = 0; t < 10; ++t) {
        const auto v = random_values(rng, 3);
        const double eta = 0.01 + 1.0 * rng.uniform_open();
        const Band b = band_from_radius(EvaluatedLoss(v), eta);
        const double up = oracle::simplex_max3({v[0], v[1], v[2]}, eta);
        const double lo = -oracle::simplex_max3({-v[0], -v[1], -v[2]}, eta);
        worst_abs = std::max({worst_abs, std::abs(b.upper - up), std::abs(b.lower - lo)});
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "EL vs dual worst relative gap %.3g (<= 1e-6); n=3 simplex oracle worst gap %.3g (<= 1e-4)",
                  worst_rel, worst_abs);
    report(7, worst_rel <= 1e-6 && worst_abs <= 1e-4, buf);
}

void criterion8() {
    Rng rng(RandomSeed{88});
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t k = 2 + rng.next_u64() % 9;
        const std::size_t n = 5 + rng.next_u64() % 60;
        const auto support = random_values(rng, k);
        std::vector<std::size_t> counts(k, 0);
        std::vector<double> expanded;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = rng.next_u64() % k;
            ++counts[j];
            expanded.push_back(support[j]);
        }
        const double eta = 0.001 + 3.0 * rng.uniform_open();
        const Band h = histogram_band(support, counts, eta);
        const Band e = band_from_radius(EvaluatedLoss(expanded), eta);
        worst = std::max({worst, std::abs(h.lower - e.lower), std::abs(h.upper - e.upper)});
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "empirical vs histogram ball worst gap %.3g over 50 instances (<= 1e-8)", worst);
    report(8, worst <= 1e-8, buf);
}

double mean_expansion_residual(std::size_t n, int seeds) {
    const LossModel loss = newsvendor_loss();
    const double q = chi2_quantile(1, 0.95);
    double total = 0.0;
    for (int s = 0; s < seeds; ++s) {
        const auto data = sample_exponential(1.0 / 20.0, n, RandomSeed{static_cast<std::uint64_t>(5000 + s)});
        const EvaluatedLoss values(loss.evaluate_at(30.0, data));
        const Band b = band_from_radius(values, q / (2.0 * static_cast<double>(n)));
        const double approx = values.mean() + std::sqrt(q) * values.stddev_n() / std::sqrt(static_cast<double>(n));
        total += std::abs(b.upper - approx);
    }
    return total / seeds;
}

void criterion9() {
    const double r3 = mean_expansion_residual(1000, 20);
    const double r4 = mean_expansion_residual(10000, 20);
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean |upper - (hbar + sqrt(q) sigma/sqrt(n))| n=1e3: %.4g, n=1e4: %.4g, ratio %.2f (>= 5)",
                  r3, r4, r3 / r4);
    report(9, r4 <= r3 / 5.0, buf);
}

void criterion10() {
    const LossModel loss = newsvendor_loss();
    const DecisionGrid grid = DecisionGrid::newsvendor_default();
    const double base = chi2_quantile(1, 0.95);
    bool ok = true;
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) {
        const auto data = sample_exponential(1.0 / 20.0, 50, RandomSeed{static_cast<std::uint64_t>(700 + s)});
        const auto eu = calibrate(RadiusPolicy{ExcursionEuler{grid, 0.0}, 0.05}, data, loss);
        const auto mc = calibrate(
            RadiusPolicy{ExcursionMC{grid, 100000, RandomSeed{static_cast<std::uint64_t>(900 + s)}}, 0.05}, data, loss);
        const double rel = std::abs(eu.q - mc.q) / mc.q;
        worst = std::max(worst, rel);
        ok = ok && rel <= 0.10 && eu.q > base && mc.q > base;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "euler vs mc (1e5 reps) on n=50 newsvendor field, 5 runs, worst relative gap %.3f (<= 0.10), q > chi2_1 quantile",
                  worst);
    report(10, ok, buf);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion11(const char* cli) {
    if (!cli) {
        report(11, false, "no CLI path given");
        return;
    }
    const auto dir = std::filesystem::temp_directory_path() / "eldro_acceptance";
    std::filesystem::create_directories(dir);
    const std::vector<std::string> invocations{
        "coverage --mode pointwise --dist discrete --n 30 --reps 200 --calib chi2-k --k 5 --seed 11",
        "coverage --mode simultaneous --dist continuous --n 40 --reps 200 --calib euler --seed 12 --threads 3",
        "coverage --mode simultaneous --dist discrete --n 20 --reps 20 --calib mc --mc-reps 2000 --seed 13",
    };
    bool ok = true;
    int idx = 0;
    for (const auto& args : invocations) {
        std::string first;
        for (int rep = 0; rep < 2; ++rep) {
            const auto out = dir / ("run" + std::to_string(idx) + "_" + std::to_string(rep) + ".csv");
            const std::string cmd = std::string("\"") + cli + "\" " + args + " --out \"" + out.string() + "\"";
            ok = ok && std::system(cmd.c_str()) == 0;
            const std::string text = slurp(out);
            ok = ok && !text.empty();
            if (rep == 0) first = text; else ok = ok && text == first;
        }
        ++idx;
    }
    report(11, ok, "CLI coverage runs repeated with the same seed produce byte-identical CSV (3 invocations)");
}

} // namespace

int main(int argc, char** argv) {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11(argc > 1 ? argv[1] : nullptr);
    std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "OK", failures);
    return failures ? 1 : 0;
}
