#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "glpm/audit.hpp"
#include "glpm/experiments.hpp"
#include "glpm/numerics.hpp"
#include "glpm/profile1d.hpp"
#include "glpm/snapshot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace glpm;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write " + path.string());
    out << text;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::array<double, 3> parse_point(const std::string& s) {
    std::array<double, 3> pt{};
    std::istringstream in(s);
    std::string part;
    int a = 0;
    while (std::getline(in, part, ',') && a < 3) pt[a++] = std::stod(part);
    return pt;
}

std::vector<double> parse_values(const std::string& s) {
    std::vector<double> vals;
    std::istringstream in(s);
    std::string part;
    while (std::getline(in, part, ','))
        if (!part.empty()) vals.push_back(std::stod(part));
    return vals;
}

struct ProfileArgs {
    std::string kind = "comparison";
    double p = 2.0, m = 4.0;
    double h_level = 0.2, epsilon = 0.05;
    double t_min = -100.0, t_max = 5.0;
    int samples = 400;
    bool log_spacing = false;
    std::string table;
    std::string out = "profile";
};

int cmd_profile(const ProfileArgs& a, bool quiet) {
    const Potential P = a.table.empty() ? Potential::model(a.m)
                                        : Potential::from_csv(a.m, a.table);
    std::vector<double> grid(a.samples);
    if (a.log_spacing) {
        // log-spaced magnitudes on the negative side, linear on [0, t_max]
        const double lo = std::max(1e-3, -a.t_max);
        for (int i = 0; i < a.samples; ++i) {
            const double f = static_cast<double>(i) / (a.samples - 1);
            grid[i] = -(-a.t_min) * std::pow(lo / -a.t_min, f);
        }
    } else {
        for (int i = 0; i < a.samples; ++i)
            grid[i] = a.t_min + (a.t_max - a.t_min) * i / (a.samples - 1);
    }

    Profile1D prof;
    if (a.kind == "comparison")
        prof = comparison_profile(a.p, a.m, grid);
    else if (a.kind == "heteroclinic")
        prof = heteroclinic_profile(a.p, P, grid);
    else if (a.kind == "supersolution")
        prof = supersolution_profile(a.h_level, a.p, P, a.epsilon);
    else
        throw validation_error("profile: kind must be comparison|heteroclinic|supersolution");

    std::ostringstream os;
    os << "t,u,du\n";
    for (std::size_t i = 0; i < prof.t.size(); ++i)
        os << fmt(prof.t[i]) << "," << fmt(prof.u[i]) << "," << fmt(prof.du[i]) << "\n";
    write_text(a.out + ".csv", os.str());

    json meta;
    meta["kind"] = a.kind;
    meta["p"] = prof.meta.p;
    meta["m"] = prof.meta.m;
    meta["epsilon"] = prof.meta.epsilon;
    meta["eta"] = prof.meta.eta;
    meta["s0"] = prof.meta.s0;
    meta["s1"] = prof.meta.s1;
    meta["a"] = std::isfinite(prof.meta.a) ? json(prof.meta.a) : json();
    meta["b"] = std::isfinite(prof.meta.b) ? json(prof.meta.b) : json();
    if (a.kind != "supersolution") {
        double lo = 0.0, hi = 0.0; // widest negative window present in the samples
        for (double t : prof.t) lo = std::min(lo, t);
        hi = std::max(-10.0 * std::abs(lo) * 1e-3, lo * 1e-2);
        if (lo < hi && hi < 0.0) {
            try {
                meta["decay_exponent"] = fit_decay_exponent(prof, lo, hi);
            } catch (const validation_error&) {
                meta["decay_exponent"] = nullptr;
            }
        }
    }
    write_text(a.out + ".meta.json", meta.dump(2) + "\n");
    if (!quiet) std::cout << meta.dump(2) << std::endl;
    return 0;
}

struct MinimizeArgs {
    double p = 2.0, m = 2.0;
    int dim = 1;
    std::string box = "40";
    double h = 0.05;
    std::string bc = "x:dirichlet:-1,1";
    double tol = 1e-6;
    long max_iter = 200000;
    std::uint64_t seed = 0;
    double noise = 0.0;
    std::string out = "field";
    std::string report;
};

int cmd_minimize(const MinimizeArgs& a, bool quiet) {
    EnergyParams params;
    params.n = a.dim;
    params.p = a.p;
    params.m = a.m;
    params.validate();
    const auto lengths = parse_values(a.box);
    std::array<double, 3> box{20, 20, 20};
    for (std::size_t i = 0; i < lengths.size() && i < 3; ++i) box[i] = lengths[i];
    if (lengths.size() == 1)
        for (int i = 1; i < 3; ++i) box[i] = lengths[0];

    const Grid g = Grid::box(a.dim, box, a.h);
    Field u0 = Field::from_function(
        g, [](std::array<double, 3> x) { return std::clamp(x[0] / 5.0, -1.0, 1.0); });
    if (a.noise > 0.0) {
        Rng rng(a.seed);
        for (double& v : u0.values)
            v = std::clamp(v + a.noise * rng.uniform(-1.0, 1.0), -1.0, 1.0);
    }

    const auto axes = parse_bc_string(a.bc);
    BoundaryCondition bc;
    for (int ax = 0; ax < a.dim; ++ax)
        if (axes[ax].dirichlet)
            bc.face[ax] = {FaceSpec{FaceType::dirichlet, axes[ax].lo},
                           FaceSpec{FaceType::dirichlet, axes[ax].hi}};

    const Potential P = Potential::model(a.m);
    SolveOptions opts;
    opts.tol = a.tol;
    opts.max_iter = a.max_iter;
    auto [u, rep] = minimize(std::move(u0), bc, params, P, opts);

    json extra = {{"p", a.p}, {"m", a.m}, {"n", a.dim}, {"seed", a.seed}};
    save_snapshot(u, a.out, extra);

    json jrep;
    jrep["iterations"] = rep.iterations;
    jrep["final_energy"] = rep.final_energy;
    jrep["final_residual"] = rep.final_residual;
    jrep["converged"] = rep.converged;
    jrep["steps_recorded"] = rep.step_sizes.size();
    if (!rep.step_sizes.empty()) {
        jrep["first_step"] = rep.step_sizes.front();
        jrep["last_step"] = rep.step_sizes.back();
    }
    const std::string rpath = a.report.empty() ? a.out + ".solve.json" : a.report;
    write_text(rpath, jrep.dump(2) + "\n");
    if (!quiet) std::cout << jrep.dump(2) << std::endl;
    if (!rep.converged) throw convergence_error("minimize: not converged within max-iter");
    return 0;
}

struct AuditArgs {
    std::string snapshot;
    std::string center = "0,0,0";
    int T = 5;
    int R0 = 10;
    int Rmax = 0;
    double p = 0.0, m = 0.0; // 0: read from the snapshot header
    std::string report = "audit_report.json";
};

int cmd_audit(const AuditArgs& a, bool quiet) {
    auto [u, header] = load_snapshot(a.snapshot);
    EnergyParams params;
    params.n = u.grid.n;
    if (header.contains("params")) {
        const auto& hp = header["params"];
        params.p = hp.value("p", 2.0);
        params.m = hp.value("m", 4.0);
    }
    if (a.p > 0.0) params.p = a.p;
    if (a.m > 0.0) params.m = a.m;
    params.validate();
    params.require_slow_decay("audit");
    const Potential P = Potential::model(params.m);

    auto center = parse_point(a.center);
    int R_cap = 1 << 30;
    for (int ax = 0; ax < u.grid.n; ++ax) {
        R_cap = std::min(R_cap, static_cast<int>(std::floor(center[ax] - u.grid.axis_lo(ax))));
        R_cap = std::min(R_cap, static_cast<int>(std::floor(u.grid.axis_hi(ax) - center[ax])));
    }
    const int R_max = a.Rmax > 0 ? std::min(a.Rmax, R_cap) : R_cap;
    const AuditSequences seq = audit_sequences(u, center, R_max, a.T, params, P);
    const DensityReport dens = density_report(u, center, std::min(a.R0, R_max), R_max, params);
    const DiscreteInequalityReport disc = discrete_inequality_check(seq, params.n);

    const fs::path rpath = a.report;
    const fs::path dir = rpath.has_parent_path() ? rpath.parent_path() : fs::path(".");
    {
        std::ostringstream os;
        os << "R,V,P,M\n";
        for (int R = 0; R <= seq.R_max; ++R)
            os << R << "," << fmt(seq.V[R]) << "," << fmt(seq.P[R]) << "," << fmt(seq.M[R])
               << "\n";
        write_text(dir / "sequences.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "R,base,lhs,rhs,slack,pass\n";
        for (const auto& row : disc.rows)
            os << row.R << "," << fmt(row.base) << "," << fmt(row.lhs) << "," << fmt(row.rhs)
               << "," << fmt(row.slack) << "," << (row.pass ? 1 : 0) << "\n";
        write_text(dir / "discrete_inequality.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "R,frac_plus,frac_minus\n";
        for (const auto& row : dens.rows)
            os << row.R << "," << fmt(row.frac_plus) << "," << fmt(row.frac_minus) << "\n";
        write_text(dir / "density.csv", os.str());
    }

    json rep;
    rep["snapshot"] = a.snapshot;
    rep["center"] = std::vector<double>(center.begin(), center.begin() + u.grid.n);
    rep["R_max"] = R_max;
    rep["T"] = a.T;
    rep["delta"] = dens.delta;
    rep["center_is_zero"] = dens.center_is_zero;
    rep["fitted"] = {{"c1", disc.c1}, {"C0", disc.C0}, {"gamma", seq.gamma}, {"q", seq.q}};
    rep["discrete_all_pass"] = disc.all_pass;
    rep["phase_vanishing"] = {{"plus", dens.plus_vanishing}, {"minus", dens.minus_vanishing}};
    write_text(rpath, rep.dump(2) + "\n");
    if (!quiet) std::cout << rep.dump(2) << std::endl;
    return 0;
}

struct InductionArgs {
    int n = 2;
    double sigma = 0.1;
    int T = 10;
    double C0 = 1.0;
    double c1 = 1.0;
    double gamma = 3.0;
    int R = 800;
    int Rstop = 3200;
    std::string minit;
    std::string out = "induction_trace.csv";
};

int cmd_induction(const InductionArgs& a, bool quiet) {
    std::vector<double> seeds;
    if (a.minit.empty()) {
        for (int r = a.R - a.T; r <= a.R; ++r)
            seeds.push_back(a.sigma * powi(static_cast<double>(r), a.n));
    } else {
        seeds = parse_values(a.minit);
    }
    const auto tr = induction_simulator(a.n, a.sigma, a.T, a.C0, a.c1, a.gamma, seeds, a.R,
                                        a.Rstop);
    std::ostringstream os;
    os << "R,M,base,chain_need,increment,step_need,ind_ok\n";
    for (const auto& st : tr.steps)
        os << st.R << "," << fmt(st.M) << "," << fmt(st.base) << "," << fmt(st.chain_need) << ","
           << fmt(st.increment) << "," << fmt(st.step_need) << "," << (st.ind_ok ? 1 : 0) << "\n";
    write_text(a.out, os.str());

    json rep;
    rep["rho1"] = tr.rho1;
    rep["hypothesis_met"] = tr.hypothesis_met;
    rep["maintained"] = tr.maintained;
    rep["first_ind_violation"] = tr.first_ind_violation;
    rep["first_chain_violation"] = tr.first_chain_violation;
    if (!quiet) std::cout << rep.dump(2) << std::endl;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for degenerate two-phase energies"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("--quiet", quiet, "suppress stdout summaries");

    ProfileArgs pa;
    auto* sp = app.add_subcommand("profile", "build a 1-D profile and export CSV + metadata");
    sp->add_option("--kind", pa.kind, "comparison|heteroclinic|supersolution");
    sp->add_option("--p", pa.p);
    sp->add_option("--m", pa.m);
    sp->add_option("--h-level", pa.h_level, "level parameter for supersolution profiles");
    sp->add_option("--epsilon", pa.epsilon, "forcing margin for supersolution profiles");
    sp->add_option("--t-min", pa.t_min);
    sp->add_option("--t-max", pa.t_max);
    sp->add_option("--samples", pa.samples);
    sp->add_flag("--log-spacing", pa.log_spacing, "log-spaced negative sample times");
    sp->add_option("--table", pa.table, "CSV table tau,W,dW for a custom well");
    sp->add_option("--out", pa.out, "output prefix");

    MinimizeArgs ma;
    auto* sm = app.add_subcommand("minimize", "descend the energy to a constrained minimizer");
    sm->add_option("--p", ma.p);
    sm->add_option("--m", ma.m);
    sm->add_option("--dim", ma.dim);
    sm->add_option("--box", ma.box, "side lengths, comma separated");
    sm->add_option("--h", ma.h);
    sm->add_option("--bc", ma.bc, "e.g. x:dirichlet:-1,1;y:natural");
    sm->add_option("--tol", ma.tol);
    sm->add_option("--max-iter", ma.max_iter);
    sm->add_option("--seed", ma.seed);
    sm->add_option("--noise", ma.noise, "amplitude of seeded noise in the initial guess");
    sm->add_option("--out", ma.out, "snapshot prefix");
    sm->add_option("--report", ma.report, "solve report path (default <out>.solve.json)");

    AuditArgs aa;
    auto* sa = app.add_subcommand("audit", "measure sequences and inequality records");
    sa->add_option("--snapshot", aa.snapshot)->required();
    sa->add_option("--center", aa.center, "comma separated coordinates");
    sa->add_option("--T", aa.T);
    sa->add_option("--R0", aa.R0);
    sa->add_option("--Rmax", aa.Rmax);
    sa->add_option("--p", aa.p, "override the snapshot exponent p");
    sa->add_option("--m", aa.m, "override the snapshot exponent m");
    sa->add_option("--report", aa.report);

    InductionArgs ia;
    auto* si = app.add_subcommand("simulate-induction", "worst-case growth recursion");
    si->add_option("--n", ia.n);
    si->add_option("--sigma", ia.sigma);
    si->add_option("--T", ia.T);
    si->add_option("--C0", ia.C0);
    si->add_option("--c1", ia.c1);
    si->add_option("--gamma", ia.gamma);
    si->add_option("--R", ia.R, "seed window ends at this radius");
    si->add_option("--Rstop", ia.Rstop);
    si->add_option("--minit", ia.minit, "explicit seed values, comma separated");
    si->add_option("--out", ia.out, "trace CSV path");

    std::string config_path, run_out;
    std::uint64_t run_seed = 0;
    bool seed_given = false;
    auto* sr = app.add_subcommand("run", "execute a configured experiment pipeline");
    sr->add_option("--config", config_path)->required();
    sr->add_option("--out", run_out, "override the output directory");
    sr->add_option("--seed", run_seed)->each([&](const std::string&) { seed_given = true; });

    std::string sweep_axis = "m", sweep_values_str;
    int sweep_threads = 1;
    auto* sw = app.add_subcommand("sweep", "run the pipeline across one parameter axis");
    sw->add_option("--config", config_path)->required();
    sw->add_option("--axis", sweep_axis, "p|m|T|R|h|L");
    sw->add_option("--values", sweep_values_str, "comma separated values")->required();
    sw->add_option("--threads", sweep_threads);
    sw->add_option("--out", run_out, "override the output directory");

    try {
        app.parse(argc, argv);
        if (sp->parsed()) return cmd_profile(pa, quiet);
        if (sm->parsed()) return cmd_minimize(ma, quiet);
        if (sa->parsed()) return cmd_audit(aa, quiet);
        if (si->parsed()) return cmd_induction(ia, quiet);
        if (sr->parsed()) {
            RunConfig cfg = RunConfig::from_file(config_path);
            if (!run_out.empty()) cfg.out_dir = run_out;
            if (seed_given) cfg.seed = run_seed;
            const auto rep = run_experiment(cfg);
            if (!quiet) std::cout << rep.dump(2) << std::endl;
            return 0;
        }
        if (sw->parsed()) {
            RunConfig cfg = RunConfig::from_file(config_path);
            if (!run_out.empty()) cfg.out_dir = run_out;
            const auto rep = sweep_experiment(cfg, sweep_axis, parse_values(sweep_values_str),
                                              sweep_threads);
            if (!quiet) std::cout << rep.dump(2) << std::endl;
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const convergence_error& e) {
        std::cerr << json{{"error", "convergence"}, {"message", e.what()}}.dump() << std::endl;
        return 2;
    } catch (const geometry_error& e) {
        std::cerr << json{{"error", "geometry"}, {"message", e.what()}}.dump() << std::endl;
        return 3;
    } catch (const validation_error& e) {
        std::cerr << json{{"error", "validation"}, {"message", e.what()}}.dump() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << std::endl;
        return 1;
    }
    return 0;
}
