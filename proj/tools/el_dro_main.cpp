// el-dro: confidence bands from the empirical Burg-entropy DRO.
//
//   el-dro coverage  --mode pointwise|simultaneous --dist discrete|continuous ...
//   el-dro bounds    --data PATH --x FLOAT --calib chi2-1|chi2-k|euler|mc
//   el-dro calibrate --data PATH --calib euler --grid lo:hi:steps
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "eldro/calibration.hpp"
#include "eldro/el_dro.hpp"
#include "eldro/error.hpp"
#include "eldro/experiments.hpp"
#include "eldro/losses.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> read_data(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open data file '" + path + "'");
    std::vector<double> data;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        double v = 0.0;
        std::string rest;
        if (!(ls >> v) || (ls >> rest)) throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number");
        data.push_back(v);
    }
    if (data.empty()) throw ConfigError("data file '" + path + "' holds no values");
    return data;
}

eldro::DecisionGrid parse_grid(const std::string& text) {
    double lo = 0.0, hi = 0.0;
    unsigned long steps = 0;
    char c1 = 0, c2 = 0;
    std::istringstream s(text);
    std::string rest;
    if (!(s >> lo >> c1 >> hi >> c2 >> steps) || c1 != ':' || c2 != ':' || (s >> rest))
        throw ConfigError("grid must look like lo:hi:steps, got '" + text + "'");
    return eldro::DecisionGrid::linspace(lo, hi, steps);
}

struct CalibOptions {
    std::string calib = "chi2-1";
    double alpha = 0.05;
    int k = 5;
    std::string grid = "2.5:50:20";
    double delta = 0.0;
    std::size_t mc_reps = 100000;
    std::uint64_t seed = 20160101;
};

eldro::RadiusPolicy make_policy(const CalibOptions& o) {
    eldro::RadiusPolicy p;
    p.alpha = o.alpha;
    if (o.calib == "chi2-1") p.variant = eldro::PointwiseChi2{};
    else if (o.calib == "chi2-k") p.variant = eldro::HistogramChi2{o.k};
    else if (o.calib == "euler") p.variant = eldro::ExcursionEuler{parse_grid(o.grid), o.delta};
    else if (o.calib == "mc") p.variant = eldro::ExcursionMC{parse_grid(o.grid), o.mc_reps, {o.seed}};
    else throw ConfigError("unknown calibration '" + o.calib + "'");
    p.validate();
    return p;
}

void add_calib_options(CLI::App* cmd, CalibOptions& o, bool with_clt) {
    std::vector<std::string> choices{"chi2-1", "chi2-k", "euler", "mc"};
    if (with_clt) choices.push_back("clt");
    cmd->add_option("--calib", o.calib, "Radius calibration")->check(CLI::IsMember(choices));
    cmd->add_option("--alpha", o.alpha, "Significance level");
    cmd->add_option("--k", o.k, "Support size (chi2-k radius / discretized demand)");
    cmd->add_option("--grid", o.grid, "Decision grid lo:hi:steps for euler/mc");
    cmd->add_option("--delta", o.delta, "Finite-difference half-step for euler (0 = half grid spacing)");
    cmd->add_option("--mc-reps", o.mc_reps, "Gaussian field replications for mc");
    cmd->add_option("--seed", o.seed, "Seed");
}

void print_calibration(std::ostream& out, const eldro::CalibrationResult& cal) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "method=%s q=%.10g eta=%.10g", cal.method.c_str(), cal.q, cal.eta);
    out << buf;
    if (cal.L1) {
        std::snprintf(buf, sizeof buf, " L1=%.10g", *cal.L1);
        out << buf;
    }
    out << '\n';
    for (const auto& w : cal.warnings) out << "warning: " << w << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Confidence bands from the empirical Burg-entropy DRO"};
    app.require_subcommand(1);

    CalibOptions cov_calib;
    std::string mode = "pointwise", dist = "discrete", out_path;
    std::size_t n = 30, reps = 1000;
    double x0 = 30.0;
    unsigned threads = 1;
    auto* coverage = app.add_subcommand("coverage", "Monte Carlo coverage experiment, CSV output");
    coverage->add_option("--mode", mode)->check(CLI::IsMember({"pointwise", "simultaneous"}));
    coverage->add_option("--dist", dist)->check(CLI::IsMember({"discrete", "continuous"}));
    coverage->add_option("--n", n, "Sample size");
    coverage->add_option("--reps", reps, "Replications");
    coverage->add_option("--x0", x0, "Decision for pointwise mode");
    coverage->add_option("--out", out_path, "CSV output path (stdout when omitted)");
    coverage->add_option("--threads", threads, "Worker threads (results are identical for any value)");
    add_calib_options(coverage, cov_calib, true);

    CalibOptions bounds_calib;
    std::string bounds_data;
    double bounds_x = 30.0;
    auto* bounds = app.add_subcommand("bounds", "Band at one decision for a demand data file (newsvendor loss)");
    bounds->add_option("--data", bounds_data, "Newline-delimited demand values")->required();
    bounds->add_option("--x", bounds_x, "Decision");
    add_calib_options(bounds, bounds_calib, false);

    CalibOptions cal_calib;
    cal_calib.calib = "euler";
    std::string cal_data;
    auto* calibrate = app.add_subcommand("calibrate", "Radius calibration for a demand data file");
    calibrate->add_option("--data", cal_data, "Newline-delimited demand values")->required();
    add_calib_options(calibrate, cal_calib, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*coverage) {
            eldro::ExperimentConfig cfg;
            cfg.mode = mode == "pointwise" ? eldro::CoverageMode::Pointwise : eldro::CoverageMode::Simultaneous;
            cfg.dist = dist == "discrete" ? eldro::DemandLaw::Discrete : eldro::DemandLaw::Continuous;
            cfg.k = cov_calib.k;
            cfg.n = n;
            cfg.reps = reps;
            cfg.alpha = cov_calib.alpha;
            cfg.x0 = x0;
            cfg.seed = {cov_calib.seed};
            cfg.threads = threads;
            cfg.grid = parse_grid(cov_calib.grid);
            eldro::CoverageReport report;
            if (cov_calib.calib == "clt") {
                if (cfg.mode != eldro::CoverageMode::Pointwise) throw ConfigError("clt is available in pointwise mode only");
                report = eldro::run_pointwise_clt(cfg);
            } else {
                cfg.policy = make_policy(cov_calib);
                report = eldro::run_coverage(cfg);
            }
            for (const auto& m : report.abort_messages) std::cerr << "aborted " << m << '\n';
            if (out_path.empty()) {
                eldro::write_csv(std::cout, {report});
            } else {
                std::ofstream out(out_path, std::ios::binary);
                if (!out) throw ConfigError("cannot write '" + out_path + "'");
                eldro::write_csv(out, {report});
            }
            if (report.completed == 0) return kExitNumerical;
            return 0;
        }

        const eldro::LossModel loss = eldro::newsvendor_loss();
        if (*bounds) {
            const std::vector<double> data = read_data(bounds_data);
            const eldro::RadiusPolicy policy = make_policy(bounds_calib);
            const eldro::CalibrationResult cal = eldro::calibrate(policy, data, loss);
            const eldro::EvaluatedLoss values(loss.evaluate_at(bounds_x, data));
            const eldro::Band band = eldro::band_from_radius(values, cal.eta);
            std::printf("x=%.10g n=%zu mean=%.10g lower=%.10g upper=%.10g\n", bounds_x, data.size(), values.mean(),
                        band.lower, band.upper);
            print_calibration(std::cout, cal);
            return 0;
        }

        if (*calibrate) {
            const std::vector<double> data = read_data(cal_data);
            const eldro::RadiusPolicy policy = make_policy(cal_calib);
            print_calibration(std::cout, eldro::calibrate(policy, data, loss));
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const eldro::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
