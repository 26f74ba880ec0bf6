#include "cli.hpp"

#include "csv_io.hpp"

#include "gpid/gpid.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace gpid::cli {

namespace {

using nlohmann::json;

/// Thrown for semantic usage problems that CLI11 cannot see.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[nodiscard]] json components_json(const PidComponents& p) {
    return json{
        {"ui_x", p.ui_x},
        {"ui_y", p.ui_y},
        {"ri", p.ri},
        {"si", p.si},
        {"i_mx", p.infos.i_mx},
        {"i_my", p.infos.i_my},
        {"i_mxy", p.infos.i_mxy},
        {"union", p.union_info()},
    };
}

[[nodiscard]] json result_json(const PidComponents& p, bool bias_corrected,
                               std::optional<long long> n) {
    json j = components_json(p);
    j["units"] = "bits";
    j["method"] = std::string(to_string(p.method));
    j["converged"] = p.converged;
    j["iterations"] = p.iterations;
    j["bias_corrected"] = bias_corrected;
    j["n"] = n ? json(*n) : json(nullptr);
    j["warnings"] = p.warnings;
    return j;
}

const std::vector<std::string> kResultHeader = {
    "ui_x", "ui_y", "ri", "si", "i_mx", "i_my", "i_mxy", "union",
    "converged", "iterations", "bias_corrected", "n"};

[[nodiscard]] std::string result_csv_row(const PidComponents& p, bool bias_corrected,
                                         std::optional<long long> n) {
    std::ostringstream row;
    for (double v : {p.ui_x, p.ui_y, p.ri, p.si, p.infos.i_mx, p.infos.i_my, p.infos.i_mxy,
                     p.union_info()}) {
        row << io::format_double(v) << ',';
    }
    row << (p.converged ? "true" : "false") << ',' << p.iterations << ','
        << (bias_corrected ? "true" : "false") << ',' << (n ? std::to_string(*n) : "");
    return row.str();
}

[[nodiscard]] std::string join(const std::vector<std::string>& items) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) {
        s += (i ? "," : "") + items[i];
    }
    return s;
}

void write_json(std::ostream& out, const json& j) {
    out << j.dump(2) << '\n';
}

void warn_if_unconverged(const PidComponents& p, std::ostream& err) {
    if (!p.converged) {
        err << "warning: solver did not converge";
        for (const auto& w : p.warnings) {
            err << "; " << w;
        }
        err << '\n';
    }
}

void emit_trace(const SolverResult& r, std::ostream& err) {
    err << "# iterations=" << r.iterations << " converged=" << (r.converged ? "true" : "false")
        << '\n';
    for (std::size_t i = 0; i < r.objective_trace.size(); ++i) {
        err << "trace," << i << ',' << io::format_double(r.objective_trace[i]) << '\n';
    }
}

void emit_single(const RunConfig& cfg, std::ostream& out, const PidComponents& p,
                 bool bias_corrected, std::optional<long long> n, json extra = json::object()) {
    if (cfg.output_format == OutputFormat::Csv) {
        out << join(kResultHeader) << '\n' << result_csv_row(p, bias_corrected, n) << '\n';
        return;
    }
    json j = result_json(p, bias_corrected, n);
    for (auto it = extra.begin(); it != extra.end(); ++it) {
        j[it.key()] = it.value();
    }
    write_json(out, j);
}

[[nodiscard]] Dims require_dims(const RunConfig& cfg) {
    if (!cfg.dims_given) {
        throw UsageError("--dm, --dx and --dy are required");
    }
    return cfg.dims;
}

[[nodiscard]] Dataset load_samples(const RunConfig& cfg) {
    if (!cfg.input_path) {
        throw UsageError("--samples is required");
    }
    Dataset ds{io::read_csv_matrix(*cfg.input_path), require_dims(cfg)};
    ds.validate();
    if (cfg.pca_k) {
        ds = pca_reduce_blocks(ds, *cfg.pca_k);
    }
    return ds;
}

[[nodiscard]] PidComponents solve_with_trace(const GaussianSystem& sys, const RunConfig& cfg,
                                             std::ostream& err) {
    SolverResult r;
    PidComponents p = decompose(sys, cfg.solver, r);
    if (cfg.trace) {
        emit_trace(r, err);
    }
    return p;
}

int cmd_compute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!cfg.input_path) {
        throw UsageError("--cov is required");
    }
    const GaussianSystem sys = validate_covariance(io::read_csv_matrix(*cfg.input_path), require_dims(cfg));
    if (cfg.save_cov_path) {
        io::write_csv_matrix(*cfg.save_cov_path, sys.sigma());
    }
    const PidComponents p = solve_with_trace(sys, cfg, err);
    warn_if_unconverged(p, err);
    emit_single(cfg, out, p, false, std::nullopt);
    return kExitOk;
}

int cmd_estimate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Dataset ds = load_samples(cfg);
    if (cfg.bias_correct && ds.n() <= ds.dims.total()) {
        throw Error(ErrorCode::InsufficientSamples, "bias correction needs more samples than variables");
    }
    const GaussianSystem sys = sample_covariance(ds);
    if (cfg.save_cov_path) {
        io::write_csv_matrix(*cfg.save_cov_path, sys.sigma());
    }
    const PidComponents raw = solve_with_trace(sys, cfg, err);
    warn_if_unconverged(raw, err);
    if (!cfg.bias_correct) {
        emit_single(cfg, out, raw, false, ds.n());
        return kExitOk;
    }
    const BiasReport rep = correct(raw, ds.dims, ds.n());
    json extra{
        {"raw", components_json(rep.raw)},
        {"bias", {{"i_mx", rep.bias_i_mx}, {"i_my", rep.bias_i_my}, {"i_mxy", rep.bias_i_mxy}}},
        {"rectified", rep.rectified},
    };
    emit_single(cfg, out, rep.corrected, true, rep.n, extra);
    return kExitOk;
}

int cmd_bootstrap(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Dataset ds = load_samples(cfg);
    const int b = cfg.bootstrap_b.value_or(100);
    const std::uint64_t seed = cfg.seed.value_or(0);
    const BootstrapSummary s = bootstrap_pid(ds, b, seed, cfg.solver, cfg.threads);
    if (s.skipped > 0) {
        err << "warning: " << s.skipped << " of " << b
            << " resamples skipped (too few distinct rows)\n";
    }
    static const char* names[] = {"ui_x", "ui_y", "ri", "si"};
    if (cfg.output_format == OutputFormat::Csv) {
        out << "component,mean,sd,q1,median,q3\n";
        for (std::size_t c = 0; c < 4; ++c) {
            const auto& st = s.per_component[c];
            out << names[c] << ',' << io::format_double(st.mean) << ',' << io::format_double(st.sd)
                << ',' << io::format_double(st.q1) << ',' << io::format_double(st.median) << ','
                << io::format_double(st.q3) << '\n';
        }
        return kExitOk;
    }
    json comps = json::object();
    for (std::size_t c = 0; c < 4; ++c) {
        const auto& st = s.per_component[c];
        comps[names[c]] = {{"mean", st.mean}, {"sd", st.sd}, {"q1", st.q1},
                           {"median", st.median}, {"q3", st.q3}};
    }
    write_json(out, json{{"b", s.b}, {"seed", s.seed}, {"used", s.used}, {"skipped", s.skipped},
                         {"n", ds.n()}, {"units", "bits"}, {"bias_corrected", true},
                         {"components", comps}});
    return kExitOk;
}

[[nodiscard]] canonical::SpecParams spec_params(const RunConfig& cfg) {
    canonical::SpecParams p = cfg.params;
    if (cfg.dims_given) {
        p.d = cfg.dims.d_m;
    }
    p.seed = cfg.seed;
    return p;
}

int cmd_example(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!cfg.name) {
        throw UsageError("--name is required");
    }
    const canonical::CanonicalSpec spec = canonical::spec_from_name(*cfg.name, spec_params(cfg));
    const GaussianSystem sys = canonical::build(spec);
    if (cfg.save_cov_path) {
        io::write_csv_matrix(*cfg.save_cov_path, sys.sigma());
    }
    const PidComponents p = solve_with_trace(sys, cfg, err);
    warn_if_unconverged(p, err);
    const auto truth = canonical::ground_truth(spec);
    json extra{
        {"example", std::string(canonical::name_of(spec))},
        {"dims", {sys.dims().d_m, sys.dims().d_x, sys.dims().d_y}},
        {"ground_truth", truth.components ? components_json(*truth.components) : json(nullptr)},
        {"ground_truth_source", std::string(canonical::to_string(truth.source))},
    };
    emit_single(cfg, out, p, false, std::nullopt, extra);
    return kExitOk;
}

struct SweepRow {
    double value = 0.0;
    std::optional<PidComponents> tilde;
    std::optional<PidComponents> mmi;
    std::optional<PidComponents> truth;
    std::string error;
};

[[nodiscard]] canonical::SpecParams with_value(canonical::SpecParams p, std::string_view key,
                                               double v) {
    if (key == "alpha") p.alpha = v;
    if (key == "rho") p.rho = v;
    if (key == "theta") p.theta = v;
    if (key == "sigma") p.sigma = v;
    return p;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!cfg.name) {
        throw UsageError("--name is required");
    }
    if (!cfg.grid) {
        throw UsageError("--grid is required");
    }
    const std::string_view key = canonical::sweep_parameter(*cfg.name);
    if (key.empty()) {
        throw UsageError("example '" + *cfg.name + "' has no sweepable parameter");
    }
    const std::vector<double> grid = parse_grid(*cfg.grid);
    const canonical::SpecParams base = spec_params(cfg);

    std::vector<SweepRow> rows(grid.size());
    auto solve_point = [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.value = grid[i];
        try {
            const auto spec = canonical::spec_from_name(*cfg.name, with_value(base, key, grid[i]));
            const GaussianSystem sys = canonical::build(spec);
            row.tilde = decompose(sys, cfg.solver);
            row.mmi = mmi_pid(sys, cfg.solver.epsilon);
            row.truth = canonical::ground_truth(spec).components;
        } catch (const Error& e) {
            row.error = std::string(to_string(e.code())) + ": " + e.what();
        }
    };

    unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(grid.size(), 1))));
    {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < grid.size(); i = next++) {
                    solve_point(i);
                }
            });
        }
    }

    for (const auto& row : rows) {
        if (row.tilde) {
            warn_if_unconverged(*row.tilde, err);
        }
    }

    if (cfg.output_format == OutputFormat::Csv) {
        std::vector<std::string> header{std::string(key), "ui_x", "ui_y", "ri", "si", "i_mx",
                                        "i_my", "i_mxy", "union", "converged", "iterations"};
        for (const char* prefix : {"mmi_", "truth_"}) {
            for (const char* c : {"ui_x", "ui_y", "ri", "si"}) {
                header.push_back(std::string(prefix) + c);
            }
        }
        header.push_back("error");
        out << join(header) << '\n';
        auto cells = [](const std::optional<PidComponents>& p) {
            std::string s;
            for (int c = 0; c < 4; ++c) {
                if (p) {
                    const double v[] = {p->ui_x, p->ui_y, p->ri, p->si};
                    s += io::format_double(v[c]);
                }
                s += ',';
            }
            return s;
        };
        for (const auto& row : rows) {
            out << io::format_double(row.value) << ',';
            if (row.tilde) {
                const auto& p = *row.tilde;
                for (double v : {p.ui_x, p.ui_y, p.ri, p.si, p.infos.i_mx, p.infos.i_my,
                                 p.infos.i_mxy, p.union_info()}) {
                    out << io::format_double(v) << ',';
                }
                out << (p.converged ? "true" : "false") << ',' << p.iterations << ',';
            } else {
                out << ",,,,,,,,,,";
            }
            out << cells(row.mmi) << cells(row.truth) << row.error << '\n';
        }
        return kExitOk;
    }

    json jrows = json::array();
    for (const auto& row : rows) {
        json j{{"value", row.value}};
        j["result"] = row.tilde ? result_json(*row.tilde, false, std::nullopt) : json(nullptr);
        j["mmi"] = row.mmi ? components_json(*row.mmi) : json(nullptr);
        j["ground_truth"] = row.truth ? components_json(*row.truth) : json(nullptr);
        j["error"] = row.error.empty() ? json(nullptr) : json(row.error);
        jrows.push_back(std::move(j));
    }
    write_json(out, json{{"example", *cfg.name}, {"parameter", std::string(key)},
                         {"units", "bits"}, {"rows", jrows}});
    return kExitOk;
}

int cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    if (!cfg.name) {
        throw UsageError("--name is required");
    }
    if (!cfg.n) {
        throw UsageError("--n is required");
    }
    const std::uint64_t seed = cfg.seed.value_or(0);
    Dataset ds;
    if (*cfg.name == "poisson") {
        ds = canonical::poisson_sample(cfg.params.alpha.value_or(0.5), *cfg.n, seed);
    } else {
        const auto spec = canonical::spec_from_name(*cfg.name, spec_params(cfg));
        ds = sample_gaussian(canonical::build(spec), *cfg.n, seed);
    }
    std::vector<std::string> header;
    for (int i = 0; i < ds.dims.d_m; ++i) header.push_back("m" + std::to_string(i + 1));
    for (int i = 0; i < ds.dims.d_x; ++i) header.push_back("x" + std::to_string(i + 1));
    for (int i = 0; i < ds.dims.d_y; ++i) header.push_back("y" + std::to_string(i + 1));
    io::write_csv_matrix(out, ds.data, header);
    return kExitOk;
}

[[nodiscard]] unsigned threads_from_env() {
    if (const char* env = std::getenv("GPID_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return 0;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.empty()) {
        return grid;
    }
    double start = 0.0;
    double step = 0.0;
    double end = 0.0;
    char c1 = 0;
    char c2 = 0;
    std::istringstream in(text);
    if (!(in >> start >> c1 >> step >> c2 >> end) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
        throw UsageError("--grid must look like START:STEP:END");
    }
    if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(end)) {
        throw UsageError("--grid STEP must be positive");
    }
    const double slack = 1e-9 * step;
    for (long long i = 0;; ++i) {
        const double v = start + static_cast<double>(i) * step;
        if (v > end + slack) break;
        grid.push_back(std::min(v, std::max(end, start)));
    }
    return grid;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gaussian partial information decomposition", "gpid"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string cov_path;
    std::string samples_path;
    std::string format = "json";
    int dm = 0;
    int dx = 0;
    int dy = 0;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;

    app.add_option("--cov", cov_path, "Covariance CSV (d_total rows of d_total values)");
    app.add_option("--samples", samples_path, "Sample CSV (columns M, X, Y; optional header)");
    app.add_option("--name", cfg.name, "Canonical example name");
    app.add_option("--dm", dm, "Dimension of M (or d for random examples)")->check(CLI::PositiveNumber);
    app.add_option("--dx", dx, "Dimension of X")->check(CLI::PositiveNumber);
    app.add_option("--dy", dy, "Dimension of Y")->check(CLI::PositiveNumber);
    app.add_flag("--bias-correct", cfg.bias_correct, "Apply finite-sample bias correction");
    app.add_option("--pca-k", cfg.pca_k, "Reduce X and Y to their top-K principal components")
        ->check(CLI::PositiveNumber);
    app.add_option("--b", cfg.bootstrap_b, "Bootstrap resample count")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--alpha", cfg.params.alpha, "Example parameter alpha");
    app.add_option("--rho", cfg.params.rho, "Example parameter rho");
    app.add_option("--theta", cfg.params.theta, "Example parameter theta (radians)");
    app.add_option("--sigma", cfg.params.sigma, "Example noise parameter");
    app.add_option("--grid", cfg.grid, "Sweep grid START:STEP:END");
    app.add_option("--n", cfg.n, "Sample count for 'sample'")->check(CLI::PositiveNumber);
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", cfg.output_path, "Output file (default: stdout)");
    app.add_option("--save-cov", cfg.save_cov_path, "Write the covariance used to this CSV");
    app.add_option("--threads", threads, "Worker threads (default: GPID_THREADS or all cores)");
    app.add_flag("--trace", cfg.trace, "Print the objective trace to stderr");
    app.add_option("--eta0", cfg.solver.eta0, "Initial RProp step");
    app.add_option("--beta", cfg.solver.beta, "RProp step adaptation factor");
    app.add_option("--lr-decay", cfg.solver.alpha, "Global step decay base");
    app.add_option("--epsilon", cfg.solver.epsilon, "Schur-complement regularizer");
    app.add_option("--tol", cfg.solver.tol, "Convergence tolerance (bits)");
    app.add_option("--patience", cfg.solver.patience, "Iterations below tolerance to stop");
    app.add_option("--max-iter", cfg.solver.max_iter, "Iteration cap");

    struct Entry {
        const char* name;
        const char* help;
        Subcommand cmd;
    };
    const Entry entries[] = {
        {"compute", "PID of a covariance matrix", Subcommand::Compute},
        {"estimate", "Plug-in (optionally bias-corrected) PID from samples", Subcommand::Estimate},
        {"bootstrap", "Bootstrap summary of bias-corrected PID estimates", Subcommand::Bootstrap},
        {"example", "PID of a canonical example", Subcommand::Example},
        {"sweep", "PID table over a parameter grid of a canonical example", Subcommand::Sweep},
        {"sample", "Draw samples from a canonical example or the Poisson model", Subcommand::Sample},
    };
    std::vector<std::pair<CLI::App*, Subcommand>> subs;
    for (const auto& e : entries) {
        CLI::App* sub = app.add_subcommand(e.name, e.help);
        sub->fallthrough();
        subs.emplace_back(sub, e.cmd);
    }

    std::vector<const char*> raw;
    raw.reserve(argv.size());
    for (const auto& a : argv) raw.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    for (const auto& [sub, cmd] : subs) {
        if (sub->parsed()) cfg.subcommand = cmd;
    }
    if (!cov_path.empty()) cfg.input_path = cov_path;
    if (!samples_path.empty()) cfg.input_path = samples_path;
    cfg.output_format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    cfg.seed = seed;
    cfg.threads = threads.value_or(threads_from_env());
    if (dm > 0 && dx > 0 && dy > 0) {
        cfg.dims = Dims{dm, dx, dy};
        cfg.dims_given = true;
    } else if (dm > 0 && cfg.subcommand != Subcommand::Compute &&
               cfg.subcommand != Subcommand::Estimate && cfg.subcommand != Subcommand::Bootstrap) {
        cfg.dims = Dims{dm, dm, dm};
        cfg.dims_given = true;
    }

    std::ofstream file;
    std::ostream* sink = &out;
    try {
        cfg.solver.validate();
        if (cfg.subcommand == Subcommand::Compute && !samples_path.empty()) {
            throw UsageError("compute takes --cov, not --samples");
        }
        if ((cfg.subcommand == Subcommand::Estimate || cfg.subcommand == Subcommand::Bootstrap) &&
            !cov_path.empty()) {
            throw UsageError("estimate/bootstrap take --samples, not --cov");
        }
        if (cfg.output_path) {
            file.open(*cfg.output_path);
            if (!file) {
                throw Error(ErrorCode::InvalidInput, "cannot write " + *cfg.output_path);
            }
            sink = &file;
        }
        switch (cfg.subcommand) {
            case Subcommand::Compute: return cmd_compute(cfg, *sink, err);
            case Subcommand::Estimate: return cmd_estimate(cfg, *sink, err);
            case Subcommand::Bootstrap: return cmd_bootstrap(cfg, *sink, err);
            case Subcommand::Example: return cmd_example(cfg, *sink, err);
            case Subcommand::Sweep: return cmd_sweep(cfg, *sink, err);
            case Subcommand::Sample: return cmd_sample(cfg, *sink, err);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidInput && std::string_view(e.what()).starts_with("unknown example")) {
            err << "usage error: " << e.what() << '\n';
            return kExitUsage;
        }
        err << json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << json{{"error", "InternalError"}, {"message", e.what()}}.dump() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace gpid::cli
