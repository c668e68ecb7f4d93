#include "glpm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <mutex>
#include <sstream>

#include "glpm/audit.hpp"
#include "glpm/numerics.hpp"
#include "glpm/profile1d.hpp"
#include "glpm/snapshot.hpp"

namespace glpm {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Planar two-phase initial guess across axis 0, with optional seeded bumps.
Field initial_guess(const Grid& g, double noise, std::uint64_t seed) {
    Field u = Field::from_function(
        g, [&](std::array<double, 3> x) { return std::clamp(x[0] / 5.0, -1.0, 1.0); });
    if (noise > 0.0) {
        Rng rng(seed);
        for (double& v : u.values) v = std::clamp(v + noise * rng.uniform(-1.0, 1.0), -1.0, 1.0);
    }
    return u;
}

// Cell realizing the smallest |u|, ties broken by distance to the box
// center, then by index. Serves as the measured interface anchor.
std::array<double, 3> measured_zero(const Field& u) {
    const Grid& g = u.grid;
    std::array<double, 3> box_center{};
    for (int a = 0; a < g.n; ++a) box_center[a] = 0.5 * (g.axis_lo(a) + g.axis_hi(a));
    std::size_t best = 0;
    double best_abs = 1e300, best_d = 1e300;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double av = std::abs(u.values[i]);
        if (av > best_abs + 1e-15) continue;
        const auto x = g.coord(i);
        double d2 = 0.0;
        for (int a = 0; a < g.n; ++a) d2 += (x[a] - box_center[a]) * (x[a] - box_center[a]);
        if (av < best_abs - 1e-15 || d2 < best_d) {
            best = i;
            best_abs = av;
            best_d = d2;
        }
    }
    return g.coord(best);
}

int derived_R_max(const Grid& g, const std::array<double, 3>& center) {
    double r = 1e300;
    for (int a = 0; a < g.n; ++a) {
        r = std::min(r, center[a] - g.axis_lo(a));
        r = std::min(r, g.axis_hi(a) - center[a]);
    }
    return static_cast<int>(std::floor(r));
}

nlohmann::json solve_json(const SolveReport& rep) {
    return {{"iterations", rep.iterations},
            {"final_energy", rep.final_energy},
            {"final_residual", rep.final_residual},
            {"converged", rep.converged}};
}

nlohmann::json run_density(const RunConfig& cfg, const fs::path& out) {
    const Potential P = cfg.make_potential();
    const Grid g = cfg.make_grid();
    Field u0 = initial_guess(g, cfg.noise, cfg.seed);

    SolveOptions opts;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    opts.record_traces = false;
    auto [u, solve] = minimize(std::move(u0), cfg.make_bc(), cfg.params, P, opts);
    if (!solve.converged)
        throw convergence_error("density pipeline: solver did not reach tol " +
                                std::to_string(cfg.tol));
    save_snapshot(u, (out / "field").string(), cfg.to_json()["params"]);

    const auto center = measured_zero(u);
    const int R_cap = derived_R_max(g, center);
    const int R_max = cfg.Rmax > 0 ? std::min(cfg.Rmax, R_cap) : R_cap;
    if (R_max < 2 * cfg.T + 1)
        throw validation_error("density pipeline: box too small for the audit window");

    const AuditSequences seq = audit_sequences(u, center, R_max, cfg.T, cfg.params, P);
    const DensityReport dens = density_report(u, center, std::min(cfg.R0, R_max), R_max,
                                              cfg.params);
    const DiscreteInequalityReport disc = discrete_inequality_check(seq, cfg.params.n);

    std::vector<int> R_list = cfg.R_list;
    if (R_list.empty()) R_list = {16, 24, 32};
    std::erase_if(R_list, [&](int R) { return R < cfg.T + 1 || R + 1 > R_max; });

    nlohmann::json main_rows = nlohmann::json::array();
    nlohmann::json coarea_rows = nlohmann::json::array();
    for (int R : R_list) {
        const auto rec = main_inequality_report(u, center, R, cfg.T, cfg.params, P);
        nlohmann::json annuli = nlohmann::json::array();
        for (const auto& a : rec.annuli)
            annuli.push_back({{"j", a.j}, {"energy", a.energy}, {"bound", a.bound}});
        main_rows.push_back({{"R", rec.R},
                             {"T", rec.T},
                             {"lhs", rec.lhs},
                             {"rhs", rec.rhs},
                             {"ratio", rec.ratio},
                             {"core", rec.core},
                             {"core_ref", rec.core_ref},
                             {"annuli", annuli}});
        const auto comp = build_competitor(u, center, R, cfg.T, cfg.params);
        const auto [lhs, rhs] = coarea_functional(u, comp, cfg.params, P);
        coarea_rows.push_back({{"R", R}, {"lhs", lhs}, {"rhs", rhs}});
    }

    // CSV tables
    {
        std::ostringstream os;
        os << "R,V,P,M\n";
        for (int R = 0; R <= seq.R_max; ++R)
            os << R << "," << fmt(seq.V[R]) << "," << fmt(seq.P[R]) << "," << fmt(seq.M[R])
               << "\n";
        write_text(out / "sequences.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "R,frac_plus,frac_minus\n";
        for (const auto& row : dens.rows)
            os << row.R << "," << fmt(row.frac_plus) << "," << fmt(row.frac_minus) << "\n";
        write_text(out / "density.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "R,lhs,rhs,ratio\n";
        for (const auto& r : main_rows)
            os << r["R"].get<int>() << "," << fmt(r["lhs"].get<double>()) << ","
               << fmt(r["rhs"].get<double>()) << "," << fmt(r["ratio"].get<double>()) << "\n";
        write_text(out / "main_inequality.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "R,base,lhs,rhs,slack,pass\n";
        for (const auto& row : disc.rows)
            os << row.R << "," << fmt(row.base) << "," << fmt(row.lhs) << "," << fmt(row.rhs)
               << "," << fmt(row.slack) << "," << (row.pass ? 1 : 0) << "\n";
        write_text(out / "discrete_inequality.csv", os.str());
    }

    nlohmann::json density_rows = nlohmann::json::array();
    for (const auto& row : dens.rows)
        density_rows.push_back(
            {{"R", row.R}, {"frac_plus", row.frac_plus}, {"frac_minus", row.frac_minus}});

    nlohmann::json rep;
    rep["experiment"] = cfg.experiment;
    rep["config_hash"] = cfg.config_hash();
    rep["solve"] = solve_json(solve);
    rep["center"] = std::vector<double>(center.begin(), center.begin() + cfg.params.n);
    rep["delta"] = dens.delta;
    rep["center_is_zero"] = dens.center_is_zero;
    rep["phase_vanishing"] = {{"plus", dens.plus_vanishing}, {"minus", dens.minus_vanishing}};
    rep["fitted"] = {{"c1", disc.c1}, {"C0", disc.C0}, {"gamma", seq.gamma}, {"q", seq.q}};
    rep["discrete_all_pass"] = disc.all_pass;
    rep["density"] = density_rows;
    rep["main_inequality"] = main_rows;
    rep["coarea"] = coarea_rows;
    return rep;
}

nlohmann::json run_profile_tails(const RunConfig& cfg, const fs::path& out) {
    const Potential P = cfg.make_potential();
    const double p = cfg.params.p, m = cfg.params.m;
    const int N = std::max(cfg.tail_samples, 3);
    std::vector<double> lT, lE;
    std::ostringstream os;
    os << "T,tail_energy\n";
    for (int k = 0; k < N; ++k) {
        const double T = cfg.tail_T_lo *
                         std::pow(cfg.tail_T_hi / cfg.tail_T_lo, static_cast<double>(k) / (N - 1));
        const double E = tail_energy(p, m, T, P);
        lT.push_back(std::log(T));
        lE.push_back(std::log(E));
        os << fmt(T) << "," << fmt(E) << "\n";
    }
    write_text(out / "tails.csv", os.str());
    const double slope = least_squares_line(lT, lE).slope;

    // decay exponent of the comparison profile over a wide negative window
    std::vector<double> grid;
    for (int i = 0; i < 48; ++i) grid.push_back(-1e3 * std::pow(1e-2, i / 47.0));
    std::sort(grid.begin(), grid.end());
    const auto prof = comparison_profile(p, m, grid);
    const double decay = fit_decay_exponent(prof, -1e3, -10.0);

    nlohmann::json rep;
    rep["experiment"] = cfg.experiment;
    rep["config_hash"] = cfg.config_hash();
    rep["gamma_expected"] = cfg.params.gamma();
    rep["tail_slope"] = slope;
    rep["decay_exponent"] = decay;
    rep["decay_expected"] = p / (m - p);
    return rep;
}

nlohmann::json run_classical(const RunConfig& cfg, const fs::path& out) {
    const Potential P = cfg.make_potential();
    Grid g = Grid::box(1, cfg.box, cfg.h);
    Field u0 = initial_guess(g, cfg.noise, cfg.seed);
    SolveOptions opts;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    opts.record_traces = false;
    auto [u, solve] = minimize(std::move(u0), BoundaryCondition::axis_dirichlet(0, -1.0, 1.0),
                               cfg.params, P, opts);
    if (!solve.converged)
        throw convergence_error("classical pipeline: solver did not reach tol");
    save_snapshot(u, (out / "field").string(), cfg.to_json()["params"]);
    export_field_csv(u, (out / "field.csv").string());

    // sup distance to the connection profile translated to the measured zero
    const auto center = measured_zero(u);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coord(i)[0] - center[0];
        worst = std::max(worst, std::abs(u.values[i] - std::tanh(x)));
    }
    nlohmann::json rep;
    rep["experiment"] = cfg.experiment;
    rep["config_hash"] = cfg.config_hash();
    rep["solve"] = solve_json(solve);
    rep["zero"] = center[0];
    rep["sup_error_vs_tanh"] = worst;
    rep["h"] = cfg.h;
    return rep;
}

} // namespace

nlohmann::json run_experiment(const RunConfig& cfg) {
    cfg.validate();
    const fs::path out = cfg.resolved_out_dir();
    fs::create_directories(out);

    nlohmann::json rep;
    if (cfg.experiment == "density-2d")
        rep = run_density(cfg, out);
    else if (cfg.experiment == "profile-tails")
        rep = run_profile_tails(cfg, out);
    else
        rep = run_classical(cfg, out);

    write_json(out / "report.json", rep);

    nlohmann::json manifest;
    manifest["config_hash"] = cfg.config_hash();
    manifest["config"] = cfg.to_json();
    manifest["version"] = "0.1.0";
    std::vector<std::string> artifacts;
    for (const auto& e : fs::directory_iterator(out)) {
        if (e.path().filename() == "manifest.json") continue;
        if (e.is_regular_file()) artifacts.push_back(e.path().filename().string());
    }
    std::sort(artifacts.begin(), artifacts.end());
    manifest["artifacts"] = artifacts;
    write_json(out / "manifest.json", manifest);
    return rep;
}

namespace {

RunConfig apply_axis(RunConfig cfg, const std::string& axis, double value) {
    if (axis == "p")
        cfg.params.p = value;
    else if (axis == "m")
        cfg.params.m = value;
    else if (axis == "T")
        cfg.T = static_cast<int>(std::lround(value));
    else if (axis == "R")
        cfg.R_list = {static_cast<int>(std::lround(value))};
    else if (axis == "h")
        cfg.h = value;
    else if (axis == "L")
        cfg.box = {value, value, value};
    else
        throw validation_error("sweep: axis must be one of p, m, T, R, h, L");
    return cfg;
}

std::string axis_tag(const std::string& axis, double value) {
    std::ostringstream os;
    os << axis << "_" << value;
    std::string s = os.str();
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

// scalars worth aggregating across runs, in a fixed column order
const std::vector<std::string> kSweepKeys = {"delta",         "c1",          "C0",
                                             "gamma",         "tail_slope",  "decay_exponent",
                                             "sup_error_vs_tanh"};

} // namespace

nlohmann::json sweep_experiment(const RunConfig& base, const std::string& axis,
                                const std::vector<double>& values, int threads) {
    if (values.empty()) throw validation_error("sweep: empty value list");
    if (threads < 1) threads = 1;

    struct Row {
        double value;
        nlohmann::json report;
        std::string error;
    };
    std::vector<Row> rows(values.size());

    std::size_t next = 0;
    std::mutex mtx;
    auto worker = [&]() {
        for (;;) {
            std::size_t k;
            {
                std::lock_guard<std::mutex> lock(mtx);
                if (next >= values.size()) return;
                k = next++;
            }
            RunConfig cfg = apply_axis(base, axis, values[k]);
            cfg.out_dir = (fs::path(base.out_dir) / ("sweep_" + axis_tag(axis, values[k]))).string();
            rows[k].value = values[k];
            try {
                rows[k].report = run_experiment(cfg);
            } catch (const std::exception& e) {
                rows[k].error = e.what();
            }
        }
    };
    std::vector<std::future<void>> pool;
    for (int t = 0; t < std::min<int>(threads, static_cast<int>(values.size())); ++t)
        pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();

    const fs::path out = base.resolved_out_dir();
    fs::create_directories(out);
    std::ostringstream os;
    os << axis;
    for (const auto& key : kSweepKeys) os << "," << key;
    os << ",status\n";
    nlohmann::json agg = nlohmann::json::array();
    std::string first_error;
    for (const auto& row : rows) {
        os << fmt(row.value);
        nlohmann::json ar;
        ar[axis] = row.value;
        for (const auto& key : kSweepKeys) {
            os << ",";
            double v = std::numeric_limits<double>::quiet_NaN();
            if (row.error.empty()) {
                if (row.report.contains(key))
                    v = row.report[key].get<double>();
                else if (row.report.contains("fitted") && row.report["fitted"].contains(key))
                    v = row.report["fitted"][key].get<double>();
            }
            if (!std::isnan(v)) {
                os << fmt(v);
                ar[key] = v;
            }
        }
        os << "," << (row.error.empty() ? "ok" : "error") << "\n";
        ar["status"] = row.error.empty() ? "ok" : row.error;
        agg.push_back(ar);
        if (!row.error.empty() && first_error.empty()) first_error = row.error;
    }
    write_text(out / "sweep.csv", os.str());
    nlohmann::json rep;
    rep["axis"] = axis;
    rep["rows"] = agg;
    write_json(out / "sweep.json", rep);
    if (!first_error.empty())
        throw validation_error("sweep: at least one run failed: " + first_error);
    return rep;
}

} // namespace glpm
