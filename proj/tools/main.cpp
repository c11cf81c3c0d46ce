// nhsr — batch driver for the superradiance studies: deterministic seeding,
// parallel realization farming, plot-ready CSV emission.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure (the
// manifest records the reproduction seed/index).

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "nhsr/ensemble.hpp"
#include "nhsr/exceptional_points.hpp"
#include "nhsr/io.hpp"
#include "nhsr/open_system.hpp"
#include "nhsr/quasispin.hpp"
#include "nhsr/stats.hpp"
#include "nhsr/sweep.hpp"
#include "nhsr/two_level.hpp"

namespace fs = std::filesystem;
using nhsr::io::format_double;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

int default_workers() {
    if (const char* env = std::getenv("NHSR_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

nhsr::GammaGrid parse_grid(const std::string& text) {
    // min:max:Npoints[log|lin]
    nhsr::GammaGrid grid;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw CLI::ValidationError("gamma", "grid must be min:max:Npoints[log|lin], got '" + text + "'");
    try {
        grid.gamma_min = std::stod(text.substr(0, c1));
        grid.gamma_max = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        std::string tail = text.substr(c2 + 1);
        if (tail.ends_with("log")) {
            grid.spacing = nhsr::GammaGrid::Spacing::Log;
            tail.resize(tail.size() - 3);
        } else if (tail.ends_with("lin")) {
            grid.spacing = nhsr::GammaGrid::Spacing::Linear;
            tail.resize(tail.size() - 3);
        }
        grid.points = std::stoi(tail);
    } catch (const std::exception&) {
        throw CLI::ValidationError("gamma", "cannot parse grid '" + text + "'");
    }
    (void)grid.values();  // validates
    return grid;
}

struct RunContext {
    fs::path outdir;
    json manifest;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void emit(const std::string& name, const std::string& content) const {
        nhsr::io::write_atomic(outdir / name, content);
    }
    void finish() {
        json m = manifest;
        m["version"] = kVersion;
        m["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        nhsr::io::write_atomic(outdir / "manifest.json", m.dump(2) + "\n");
    }
};

RunContext make_context(const std::string& command, const std::string& outdir,
                        const json& config) {
    RunContext ctx;
    ctx.outdir = outdir;
    fs::create_directories(ctx.outdir);
    ctx.manifest["command"] = command;
    ctx.manifest["config"] = config;
    return ctx;
}

// Farms realizations 0..nr-1 across a worker pool. Each realization yields a
// deterministic payload string, cached in parts/ so an interrupted batch can
// resume; payloads are merged in index order, so the output is byte-identical
// for any worker count.
struct FarmOutcome {
    std::vector<std::string> payloads;
    int computed = 0;
    int cached = 0;
    std::vector<int> skipped;           // realizations skipped by design (EP deficits)
    std::optional<std::string> fatal;   // numerical failure; reproduction info
};

FarmOutcome farm(const fs::path& outdir, const std::string& config_key, int nr,
                 int workers,
                 const std::function<std::optional<std::string>(int)>& produce) {
    FarmOutcome out;
    out.payloads.resize(nr);

    const fs::path parts = outdir / "parts";
    fs::create_directories(parts);
    const fs::path keyfile = parts / "config.key";
    bool reuse = false;
    if (fs::exists(keyfile)) {
        std::ifstream in(keyfile);
        std::stringstream ss;
        ss << in.rdbuf();
        reuse = (ss.str() == config_key);
    }
    if (!reuse) {
        for (const auto& e : fs::directory_iterator(parts)) fs::remove(e.path());
        nhsr::io::write_atomic(keyfile, config_key);
    }

    auto part_name = [&](int r) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "part_%06d.csv", r);
        return parts / buf;
    };

    std::mutex mtx;
    std::atomic<int> next{0};
    std::atomic<bool> abort{false};
    auto work = [&]() {
        for (;;) {
            if (abort.load()) break;
            const int r = next.fetch_add(1);
            if (r >= nr) break;
            const fs::path part = part_name(r);
            if (reuse && fs::exists(part)) {
                std::ifstream in(part, std::ios::binary);
                std::stringstream ss;
                ss << in.rdbuf();
                const std::lock_guard<std::mutex> lock(mtx);
                out.payloads[r] = ss.str();
                ++out.cached;
                continue;
            }
            try {
                const std::optional<std::string> payload = produce(r);
                const std::lock_guard<std::mutex> lock(mtx);
                if (payload) {
                    out.payloads[r] = *payload;
                    nhsr::io::write_atomic(part, *payload);
                    ++out.computed;
                } else {
                    out.skipped.push_back(r);
                    nhsr::io::write_atomic(part, "");
                }
            } catch (const nhsr::SolverError& err) {
                const std::lock_guard<std::mutex> lock(mtx);
                out.fatal = std::string(err.what()) + " [realization " +
                            std::to_string(r) + ", seed " + std::to_string(err.seed) +
                            ", index " + std::to_string(err.index) + "]";
                abort.store(true);
            } catch (const std::exception& err) {
                const std::lock_guard<std::mutex> lock(mtx);
                out.fatal = std::string(err.what()) + " [realization " +
                            std::to_string(r) + "]";
                abort.store(true);
            }
        }
    };
    workers = std::max(1, workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    std::sort(out.skipped.begin(), out.skipped.end());
    return out;
}

// ----------------------------------------------------------------------------

struct CommonOpts {
    std::string model = "ho";
    int d = 16;
    int n = 8;
    double eps = 0.0;
    int nr = 100;
    std::uint64_t seed = 42;
    int workers = default_workers();
    std::string outdir = ".";
};

void add_common(CLI::App* cmd, CommonOpts& opt, bool with_n = true) {
    cmd->add_option("--model", opt.model, "initial Hamiltonian: ho, pt1 or pt2")
        ->check(CLI::IsMember({"ho", "pt1", "pt2"}));
    cmd->add_option("--d", opt.d, "Hilbert-space dimension")->check(CLI::PositiveNumber);
    if (with_n)
        cmd->add_option("--n", opt.n, "decaying-subspace dimension (1..d-1)");
    cmd->add_option("--nr", opt.nr, "number of GOE realizations")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", opt.seed, "master seed");
    cmd->add_option("--workers", opt.workers, "worker threads (default: NHSR_WORKERS or all cores)");
    cmd->add_option("-o,--out", opt.outdir, "output directory");
}

void validate_common(const CommonOpts& o, bool with_n = true) {
    if (o.d < 2 || o.d > nhsr::kMaxDimension)
        throw std::invalid_argument("--d must lie in [2, " +
                                    std::to_string(nhsr::kMaxDimension) + "], got " +
                                    std::to_string(o.d));
    if (with_n && (o.n < 1 || o.n > o.d - 1))
        throw std::invalid_argument("--n must lie in [1, d-1], got " +
                                    std::to_string(o.n));
}

json common_json(const CommonOpts& o) {
    return {{"model", o.model}, {"d", o.d},       {"n", o.n},
            {"nr", o.nr},       {"seed", o.seed}, {"workers", o.workers}};
}

double j_of(int d) { return (d - 1) / 2.0; }

int finish_farm(RunContext& ctx, const FarmOutcome& outcome) {
    ctx.manifest["computed"] = outcome.computed;
    ctx.manifest["cached"] = outcome.cached;
    ctx.manifest["skipped_realizations"] = outcome.skipped;
    if (outcome.fatal) {
        ctx.manifest["error"] = *outcome.fatal;
        ctx.finish();
        std::cerr << "numerical failure: " << *outcome.fatal << "\n";
        return 2;
    }
    return 0;
}

// --------------------------------- spectrum ---------------------------------

int run_spectrum(const CommonOpts& opt) {
    validate_common(opt, false);
    const nhsr::Model model = nhsr::model_from_string(opt.model);
    const nhsr::InitialSpectrum s = nhsr::build_initial(model, j_of(opt.d));
    const nhsr::Cumulants cum = nhsr::spectrum_cumulants(s);

    RunContext ctx = make_context("spectrum", opt.outdir,
                                  {{"model", opt.model}, {"d", opt.d}});
    std::string csv = "k,energy\n";
    for (int k = 0; k < s.d; ++k)
        csv += std::to_string(k + 1) + "," + format_double(s.energies[k]) + "\n";
    ctx.emit("spectrum.csv", csv);

    const json sidecar = {{"model", opt.model},
                          {"j", s.j},
                          {"d", s.d},
                          {"s", s.scale},
                          {"a", s.shift},
                          {"mean", cum.mean},
                          {"variance", cum.variance},
                          {"skewness", cum.skewness}};
    ctx.emit("spectrum.json", sidecar.dump(2) + "\n");
    ctx.finish();
    return 0;
}

// --------------------------------- two-level --------------------------------

int run_two_level(double e1, double e2, double theta,
                  const std::vector<double>& eps_values,
                  const nhsr::GammaGrid& grid, const std::string& outdir) {
    if (!(theta > 0.0) || !(theta < 3.14159265358979323846))
        throw std::invalid_argument("--theta must lie strictly inside (0, pi)");
    const nhsr::TwoLevelModel model{e1, e2, theta};
    RunContext ctx = make_context("two-level", outdir,
                                  {{"e1", e1},
                                   {"e2", e2},
                                   {"theta", theta},
                                   {"eps", eps_values},
                                   {"points", grid.points}});
    std::string csv = "eps,gamma,width1,width2,energy1,energy2\n";
    for (const double eps : eps_values) {
        for (const double gamma : grid.values()) {
            const auto [a, b] =
                nhsr::analytic_eigenvalues(model, nhsr::Complex(eps, -gamma));
            csv += format_double(eps) + "," + format_double(gamma) + "," +
                   format_double(-a.imag()) + "," + format_double(-b.imag()) + "," +
                   format_double(a.real()) + "," + format_double(b.real()) + "\n";
        }
    }
    ctx.emit("two_level.csv", csv);
    const auto [ep_plus, ep_minus] = nhsr::analytic_eps(model);
    ctx.manifest["ep_plus"] = {ep_plus.real(), ep_plus.imag()};
    ctx.manifest["ep_minus"] = {ep_minus.real(), ep_minus.imag()};
    ctx.finish();
    return 0;
}

// ----------------------------------- sweep ----------------------------------

int run_sweep_cmd(const CommonOpts& opt, double eps, const nhsr::GammaGrid& grid) {
    validate_common(opt);
    const nhsr::InitialSpectrum h0 =
        nhsr::build_initial(nhsr::model_from_string(opt.model), j_of(opt.d));

    json config = common_json(opt);
    config["eps"] = eps;
    config["grid"] = {{"min", grid.gamma_min},
                      {"max", grid.gamma_max},
                      {"points", grid.points},
                      {"spacing", grid.spacing == nhsr::GammaGrid::Spacing::Log ? "log" : "lin"}};
    RunContext ctx = make_context("sweep", opt.outdir, config);

    const std::vector<double> gammas = grid.values();
    const FarmOutcome outcome = farm(
        ctx.outdir, ctx.manifest["config"].dump(), opt.nr, opt.workers,
        [&](int r) -> std::optional<std::string> {
            const nhsr::DecayingSubspace sub =
                nhsr::sample_subspace(opt.d, opt.n, opt.seed, r);
            const nhsr::SweepResult res = nhsr::run_sweep(h0, sub, eps, grid);
            std::string rows;
            for (int k = 0; k < opt.d; ++k) {
                for (std::size_t i = 0; i < gammas.size(); ++i) {
                    const nhsr::Complex e = res.trajectories(k, i);
                    const double slope = res.slopes(k, i);
                    rows += std::to_string(r) + "," + std::to_string(k + 1) + "," +
                            format_double(gammas[i]) + "," +
                            format_double(e.real()) + "," +
                            format_double(-e.imag()) + "," +
                            (std::isnan(slope) ? std::string() : format_double(slope)) +
                            "\n";
                }
            }
            return rows;
        });
    if (const int rc = finish_farm(ctx, outcome)) return rc;

    std::string csv = "realization,kappa,gamma,energy,width,slope\n";
    for (const auto& p : outcome.payloads) csv += p;
    ctx.emit("trajectories.csv", csv);
    ctx.finish();
    return 0;
}

// ----------------------------------- widths ---------------------------------

int run_widths(const CommonOpts& opt, double eps, double gamma, int bins) {
    validate_common(opt);
    if (gamma < 0) throw std::invalid_argument("--gamma must be non-negative");
    if (bins < 1) throw std::invalid_argument("--bins must be positive");
    const nhsr::InitialSpectrum h0 =
        nhsr::build_initial(nhsr::model_from_string(opt.model), j_of(opt.d));

    json config = common_json(opt);
    config["eps"] = eps;
    config["gamma"] = gamma;
    config["bins"] = bins;
    RunContext ctx = make_context("widths", opt.outdir, config);

    const FarmOutcome outcome = farm(
        ctx.outdir, ctx.manifest["config"].dump(), opt.nr, opt.workers,
        [&](int r) -> std::optional<std::string> {
            const nhsr::DecayingSubspace sub =
                nhsr::sample_subspace(opt.d, opt.n, opt.seed, r);
            const nhsr::ComplexSpectrum sp =
                nhsr::eig(nhsr::assemble(h0, sub, eps, gamma), false);
            std::string rows;
            for (int k = 0; k < sp.size(); ++k)
                rows += format_double(sp.width(k)) + "\n";
            return rows;
        });
    if (const int rc = finish_farm(ctx, outcome)) return rc;

    // pool the widths and histogram them
    std::vector<Eigen::VectorXcd> spectra;
    spectra.reserve(outcome.payloads.size());
    for (const auto& payload : outcome.payloads) {
        std::istringstream in(payload);
        std::vector<double> widths;
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) widths.push_back(std::stod(line));
        Eigen::VectorXcd vals(widths.size());
        for (std::size_t k = 0; k < widths.size(); ++k)
            vals[k] = nhsr::Complex(0, -widths[k]);
        spectra.push_back(std::move(vals));
    }
    const nhsr::WidthHistogram hist =
        nhsr::width_histogram(spectra, bins, eps, gamma, opt.d, opt.n);
    const nhsr::ModeInfo modes = nhsr::detect_modes(hist);

    std::string csv = "log10_gamma_bin_center,density\n";
    for (std::size_t b = 0; b < hist.bin_centers.size(); ++b)
        csv += format_double(hist.bin_centers[b]) + "," +
               format_double(hist.density[b]) + "\n";
    ctx.emit("widths.csv", csv);
    ctx.manifest["counted"] = hist.counted;
    ctx.manifest["underflow"] = hist.underflow;
    ctx.manifest["modes"] = modes.mode_locations;
    ctx.manifest["bimodal"] = modes.bimodal;
    ctx.finish();
    return 0;
}

// ----------------------------------- ep-map ---------------------------------

int run_ep_map(const CommonOpts& opt, int bins) {
    validate_common(opt);
    if (bins < 1) throw std::invalid_argument("--bins must be positive");
    const nhsr::InitialSpectrum h0 =
        nhsr::build_initial(nhsr::model_from_string(opt.model), j_of(opt.d));
    const nhsr::DensitySpec spec = nhsr::DensitySpec::standard(h0, opt.n, bins);

    json config = common_json(opt);
    config["bins"] = bins;
    RunContext ctx = make_context("ep-map", opt.outdir, config);

    const FarmOutcome outcome = farm(
        ctx.outdir, ctx.manifest["config"].dump(), opt.nr, opt.workers,
        [&](int r) -> std::optional<std::string> {
            nhsr::EpSet set;
            try {
                set = nhsr::find_eps(h0, nhsr::sample_subspace(opt.d, opt.n, opt.seed, r));
            } catch (const nhsr::EpCountError& err) {
                (void)err;
                return std::nullopt;  // realization skipped, counted in manifest
            }
            std::string rows;
            for (const auto& p : set.points)
                rows += std::to_string(r) + "," + format_double(p.lambda.real()) +
                        "," + format_double(p.lambda.imag()) + "," +
                        format_double(p.residual_gap) + "," +
                        (p.converged ? "1" : "0") + "\n";
            return rows;
        });
    if (const int rc = finish_farm(ctx, outcome)) return rc;

    std::string csv = "realization,re_lambda,im_lambda,residual_gap,converged\n";
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(spec.im_bins, spec.re_bins);
    long long total = 0;
    for (const auto& payload : outcome.payloads) {
        csv += payload;
        std::istringstream in(payload);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream fields(line);
            std::string f;
            std::getline(fields, f, ',');
            std::getline(fields, f, ',');
            const double re = std::stod(f);
            std::getline(fields, f, ',');
            const double im = std::stod(f);
            ++total;
            const int bi = static_cast<int>(std::floor(
                (im - spec.im_min) / (spec.im_max - spec.im_min) * spec.im_bins));
            const int bj = static_cast<int>(std::floor(
                (re - spec.re_min) / (spec.re_max - spec.re_min) * spec.re_bins));
            if (bi >= 0 && bi < spec.im_bins && bj >= 0 && bj < spec.re_bins)
                counts(bi, bj) += 1.0;
        }
    }
    ctx.emit("eps.csv", csv);

    std::string density;
    for (int i = 0; i < spec.im_bins; ++i) {
        for (int j2 = 0; j2 < spec.re_bins; ++j2) {
            density += format_double(counts(i, j2));
            density += (j2 + 1 < spec.re_bins) ? "," : "\n";
        }
    }
    ctx.emit("density.csv", density);
    const json axes = {{"re_min", spec.re_min}, {"re_max", spec.re_max},
                       {"im_min", spec.im_min}, {"im_max", spec.im_max},
                       {"re_bins", spec.re_bins}, {"im_bins", spec.im_bins},
                       {"total_eps", total}};
    ctx.emit("density.json", axes.dump(2) + "\n");
    ctx.finish();
    return 0;
}

// ---------------------------------- cumulants --------------------------------

int run_cumulants(const CommonOpts& opt, double eps, double gamma) {
    validate_common(opt);
    if (gamma < 0) throw std::invalid_argument("--gamma must be non-negative");
    const nhsr::InitialSpectrum h0 =
        nhsr::build_initial(nhsr::model_from_string(opt.model), j_of(opt.d));

    json config = common_json(opt);
    config["eps"] = eps;
    config["gamma"] = gamma;
    RunContext ctx = make_context("cumulants", opt.outdir, config);

    const FarmOutcome outcome = farm(
        ctx.outdir, ctx.manifest["config"].dump(), opt.nr, opt.workers,
        [&](int r) -> std::optional<std::string> {
            const nhsr::DecayingSubspace sub =
                nhsr::sample_subspace(opt.d, opt.n, opt.seed, r);
            const nhsr::ComplexSpectrum full =
                nhsr::eig(nhsr::assemble(h0, sub, eps, gamma), false);
            const nhsr::ComplexSpectrum hermitian =
                nhsr::eig(nhsr::assemble(h0, sub, eps, 0.0), false);
            const nhsr::TraceIdentityReport rep =
                nhsr::trace_identities(h0, sub, full, hermitian, eps, gamma);
            const json entry = {{"realization", r},
                                {"mean_shift_residual", rep.mean_shift_residual},
                                {"mean_width_residual", rep.mean_width_residual},
                                {"variance_shift_residual", rep.variance_shift_residual},
                                {"variance_relation_residual", rep.variance_relation_residual},
                                {"variance_relation_rhs", rep.variance_relation_rhs},
                                {"A", rep.A},
                                {"eps_min", rep.eps_min}};
            return entry.dump() + "\n";
        });
    if (const int rc = finish_farm(ctx, outcome)) return rc;

    json entries = json::array();
    double max_res[4] = {0, 0, 0, 0};
    double a_mean = 0, a_sq = 0;
    for (const auto& payload : outcome.payloads) {
        std::istringstream in(payload);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const json e = json::parse(line);
            entries.push_back(e);
            max_res[0] = std::max(max_res[0], e["mean_shift_residual"].get<double>());
            max_res[1] = std::max(max_res[1], e["mean_width_residual"].get<double>());
            max_res[2] = std::max(max_res[2], e["variance_shift_residual"].get<double>());
            max_res[3] = std::max(max_res[3], e["variance_relation_residual"].get<double>());
            const double a = e["A"].get<double>();
            a_mean += a;
            a_sq += a * a;
        }
    }
    const int count = static_cast<int>(entries.size());
    a_mean /= std::max(1, count);
    const double a_var = a_sq / std::max(1, count) - a_mean * a_mean;
    const json report = {
        {"realizations", entries},
        {"max_mean_shift_residual", max_res[0]},
        {"max_mean_width_residual", max_res[1]},
        {"max_variance_shift_residual", max_res[2]},
        {"max_variance_relation_residual", max_res[3]},
        {"A_mean", a_mean},
        {"A_stderr", std::sqrt(std::max(0.0, a_var) / std::max(1, count))}};
    ctx.emit("cumulants.json", report.dump(2) + "\n");
    ctx.finish();
    return 0;
}

// --------------------------------- contraction -------------------------------

int run_contraction(const CommonOpts& opt, const nhsr::GammaGrid& grid) {
    validate_common(opt);
    json config = common_json(opt);
    config["grid_points"] = grid.points;
    RunContext ctx = make_context("contraction", opt.outdir, config);

    const nhsr::ContractionCurve curve =
        nhsr::contraction_curve(nhsr::model_from_string(opt.model), opt.d, opt.n,
                                grid, opt.nr, opt.seed, opt.workers);
    std::string csv = "gamma,variance_ratio,stderr\n";
    for (std::size_t i = 0; i < curve.gammas.size(); ++i)
        csv += format_double(curve.gammas[i]) + "," + format_double(curve.ratio[i]) +
               "," + format_double(curve.ratio_stderr[i]) + "\n";
    ctx.emit("contraction.csv", csv);
    ctx.manifest["asymptote"] = curve.asymptote;
    ctx.finish();
    return 0;
}

// ----------------------------------- scaling ---------------------------------

int run_scaling(const std::vector<int>& d_list, const std::vector<int>& nr_list,
                std::uint64_t seed, int workers, const std::string& outdir) {
    RunContext ctx = make_context("scaling", outdir,
                                  {{"d", d_list}, {"nr", nr_list}, {"seed", seed}});
    const std::vector<nhsr::MinWidthRow> rows =
        nhsr::min_width_ratio(d_list, seed, nr_list, workers);
    std::string csv =
        "d,ratio_mean,ratio_std,N_R,ho_min_mean,ho_min_std,pt2_min_mean,pt2_min_std,ratio_unpaired\n";
    for (const auto& row : rows) {
        csv += std::to_string(row.d) + "," + format_double(row.ratio_mean) + "," +
               format_double(row.ratio_std) + "," + std::to_string(row.n_realizations) +
               "," + format_double(row.ho_mean) + "," + format_double(row.ho_std) +
               "," + format_double(row.pt2_mean) + "," + format_double(row.pt2_std) +
               "," + format_double(row.ratio_unpaired) + "\n";
    }
    ctx.emit("scaling.csv", csv);
    ctx.finish();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"non-Hermitian superradiance ensemble studies"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; command-line flags override");
    app.allow_config_extras(CLI::config_extras_mode::ignore_all);

    CommonOpts opt;
    double eps = 0.0;
    double gamma_point = 0.01;
    std::string grid_text = "1e-2:1e2:200log";
    int bins = 96;

    auto* c_spectrum = app.add_subcommand("spectrum", "dump an initial spectrum");
    add_common(c_spectrum, opt, false);

    auto* c_sweep = app.add_subcommand("sweep", "eigenvalue trajectories over a gamma grid");
    add_common(c_sweep, opt);
    c_sweep->add_option("--eps", eps, "real coupling offset");
    c_sweep->add_option("--gamma", grid_text, "gamma grid min:max:Npoints[log|lin]");

    auto* c_widths = app.add_subcommand("widths", "decay-width histogram at one (eps, gamma)");
    add_common(c_widths, opt);
    c_widths->add_option("--eps", eps, "real coupling offset");
    c_widths->add_option("--gamma", gamma_point, "decay width of the open subspace");
    c_widths->add_option("--bins", bins, "histogram bins");

    auto* c_epmap = app.add_subcommand("ep-map", "exceptional-point density map");
    add_common(c_epmap, opt);
    c_epmap->add_option("--bins", bins, "density grid bins per axis");

    auto* c_cum = app.add_subcommand("cumulants", "trace-identity report");
    add_common(c_cum, opt);
    c_cum->add_option("--eps", eps, "real coupling offset");
    c_cum->add_option("--gamma", gamma_point, "decay width of the open subspace");

    auto* c_contr = app.add_subcommand("contraction", "real-energy variance contraction curve");
    add_common(c_contr, opt);
    c_contr->add_option("--gamma", grid_text, "gamma grid min:max:Npoints[log|lin]");

    std::vector<int> d_list{64, 128, 256};
    std::vector<int> nr_list{64, 32, 16};
    auto* c_scaling = app.add_subcommand("scaling", "paired HO/PT2 minimal-width scaling study");
    c_scaling->add_option("--d-list", d_list, "dimensions");
    c_scaling->add_option("--nr-list", nr_list, "realizations per dimension");
    c_scaling->add_option("--seed", opt.seed, "master seed");
    c_scaling->add_option("--workers", opt.workers, "worker threads");
    c_scaling->add_option("-o,--out", opt.outdir, "output directory");

    double e1 = 0.0, e2 = 1.0, theta = 0.78539816339744830961;
    std::vector<double> eps_values{0.0, 0.3, 1.5};
    auto* c_two = app.add_subcommand("two-level", "closed-form d=2 bifurcation curves");
    c_two->add_option("--e1", e1, "lower unperturbed energy");
    c_two->add_option("--e2", e2, "upper unperturbed energy");
    c_two->add_option("--theta", theta, "coupling angle in (0, pi)");
    c_two->add_option("--eps", eps_values, "real coupling offsets");
    c_two->add_option("--gamma", grid_text, "gamma grid min:max:Npoints[log|lin]");
    c_two->add_option("-o,--out", opt.outdir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (c_spectrum->parsed()) return run_spectrum(opt);
        if (c_sweep->parsed()) return run_sweep_cmd(opt, eps, parse_grid(grid_text));
        if (c_widths->parsed()) return run_widths(opt, eps, gamma_point, bins);
        if (c_epmap->parsed()) return run_ep_map(opt, bins);
        if (c_cum->parsed()) return run_cumulants(opt, eps, gamma_point);
        if (c_contr->parsed()) return run_contraction(opt, parse_grid(grid_text));
        if (c_scaling->parsed())
            return run_scaling(d_list, nr_list, opt.seed, opt.workers, opt.outdir);
        if (c_two->parsed())
            return run_two_level(e1, e2, theta, eps_values, parse_grid(grid_text),
                                 opt.outdir);
    } catch (const CLI::ValidationError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 1;
    } catch (const nhsr::SolverError& err) {
        std::cerr << "numerical failure: " << err.what() << " (seed " << err.seed
                  << ", index " << err.index << ")\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 1;
}
