#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "glpm/audit.hpp"
#include "glpm/experiments.hpp"
#include "glpm/profile1d.hpp"
#include "glpm/snapshot.hpp"

namespace py = pybind11;
using namespace glpm;

namespace {

std::vector<double> to_vec(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    return {a.data(), a.data() + a.size()};
}

py::array_t<double> field_array(const Field& u) {
    const Grid& g = u.grid;
    std::vector<py::ssize_t> shape;
    for (int a = g.n - 1; a >= 0; --a) shape.push_back(g.shape[a]); // numpy: slowest first
    py::array_t<double> out(shape);
    std::copy(u.values.begin(), u.values.end(), out.mutable_data());
    return out;
}

Field field_from_array(const Grid& g, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    if (static_cast<std::size_t>(a.size()) != g.size())
        throw validation_error("field values do not match the grid size");
    Field u;
    u.grid = g;
    u.values.assign(a.data(), a.data() + a.size());
    u.clamp_range();
    return u;
}

py::dict profile_meta(const Profile1D& prof) {
    py::dict d;
    d["p"] = prof.meta.p;
    d["m"] = prof.meta.m;
    d["epsilon"] = prof.meta.epsilon;
    d["eta"] = prof.meta.eta;
    d["s0"] = prof.meta.s0;
    d["s1"] = prof.meta.s1;
    d["a"] = prof.meta.a;
    d["b"] = prof.meta.b;
    return d;
}

} // namespace

PYBIND11_MODULE(glpm, mod) {
    mod.doc() = "degenerate two-phase energy laboratory: profiles, grid energies, "
                "constrained minimizers and level-set audits";

    py::register_exception<validation_error>(mod, "ValidationError", PyExc_ValueError);
    py::register_exception<convergence_error>(mod, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<geometry_error>(mod, "GeometryError", PyExc_ValueError);

    py::class_<EnergyParams>(mod, "EnergyParams")
        .def(py::init<>())
        .def_readwrite("n", &EnergyParams::n)
        .def_readwrite("p", &EnergyParams::p)
        .def_readwrite("m", &EnergyParams::m)
        .def_readwrite("lam", &EnergyParams::lambda)
        .def_readwrite("Lam", &EnergyParams::Lambda)
        .def_readwrite("Q", &EnergyParams::Q)
        .def_readwrite("eps_reg", &EnergyParams::eps_reg)
        .def("q", &EnergyParams::q)
        .def("gamma", &EnergyParams::gamma)
        .def("validate", &EnergyParams::validate);

    py::class_<Potential>(mod, "Potential")
        .def_static("model", &Potential::model, py::arg("m"))
        .def_static("from_csv", &Potential::from_csv, py::arg("m"), py::arg("path"))
        .def_static(
            "custom",
            [](double m, std::function<double(double)> w, std::function<double(double)> dw) {
                return Potential::custom(m, std::move(w), std::move(dw));
            },
            py::arg("m"), py::arg("w"), py::arg("dw"))
        .def("__call__", &Potential::operator())
        .def("deriv", &Potential::deriv)
        .def("deriv_extended", &Potential::deriv_extended)
        .def_property_readonly("m", &Potential::m);

    mod.def(
        "check_admissible",
        [](const Potential& P, const EnergyParams& params, int samples, double slope_lambda,
           double slope_Lambda) {
            const auto rep = check_admissible(P, params, samples, slope_lambda, slope_Lambda);
            py::dict d;
            d["pass"] = rep.pass;
            d["well_ratio_min"] = rep.well.ratio_min;
            d["well_ratio_max"] = rep.well.ratio_max;
            d["slope_ratio_min"] = rep.slope.ratio_min;
            d["slope_ratio_max"] = rep.slope.ratio_max;
            return d;
        },
        py::arg("P"), py::arg("params"), py::arg("samples") = 1000,
        py::arg("slope_lambda") = 0.0,
        py::arg("slope_Lambda") = std::numeric_limits<double>::infinity());

    py::class_<Profile1D>(mod, "Profile1D")
        .def_property_readonly("t", [](const Profile1D& p) { return p.t; })
        .def_property_readonly("u", [](const Profile1D& p) { return p.u; })
        .def_property_readonly("du", [](const Profile1D& p) { return p.du; })
        .def_property_readonly("meta", &profile_meta)
        .def("eval", &Profile1D::eval)
        .def("eval_slope", &Profile1D::eval_slope);

    mod.def("comparison_value", &comparison_value);
    mod.def("comparison_slope", &comparison_slope);
    mod.def(
        "comparison_profile",
        [](double p, double m, py::array_t<double> t) {
            return comparison_profile(p, m, to_vec(t));
        },
        py::arg("p"), py::arg("m"), py::arg("t"));
    mod.def("tail_energy", &tail_energy, py::arg("p"), py::arg("m"), py::arg("T"), py::arg("P"));
    mod.def(
        "heteroclinic_profile",
        [](double p, const Potential& P, py::array_t<double> t) {
            return heteroclinic_profile(p, P, to_vec(t));
        },
        py::arg("p"), py::arg("P"), py::arg("t"));
    mod.def("supersolution_profile", &supersolution_profile, py::arg("h_level"), py::arg("p"),
            py::arg("P"), py::arg("epsilon"));
    mod.def("fit_decay_exponent", &fit_decay_exponent, py::arg("prof"), py::arg("t_lo"),
            py::arg("t_hi"));
    mod.def("supersolution_min_radius", &supersolution_min_radius, py::arg("prof"), py::arg("n"));

    py::class_<Grid>(mod, "Grid")
        .def_static(
            "box",
            [](int n, std::vector<double> lengths, double h, std::vector<double> center) {
                std::array<double, 3> L{20, 20, 20}, C{0, 0, 0};
                for (std::size_t i = 0; i < lengths.size() && i < 3; ++i) L[i] = lengths[i];
                for (std::size_t i = 0; i < center.size() && i < 3; ++i) C[i] = center[i];
                return Grid::box(n, L, h, C);
            },
            py::arg("n"), py::arg("lengths"), py::arg("h"),
            py::arg("center") = std::vector<double>{})
        .def_readonly("n", &Grid::n)
        .def_readonly("h", &Grid::h)
        .def_property_readonly("shape",
                               [](const Grid& g) {
                                   return std::vector<int>(g.shape.begin(),
                                                           g.shape.begin() + g.n);
                               })
        .def_property_readonly("origin", [](const Grid& g) {
            return std::vector<double>(g.origin.begin(), g.origin.begin() + g.n);
        });

    py::class_<Field>(mod, "Field")
        .def_static("constant", &Field::constant)
        .def_static("from_array", &field_from_array, py::arg("grid"), py::arg("values"))
        .def_property_readonly("grid", [](const Field& f) { return f.grid; })
        .def_property_readonly("values", &field_array);

    py::class_<Region>(mod, "Region")
        .def_property_readonly("count", [](const Region& r) { return r.count; })
        .def("volume", &Region::volume);

    mod.def(
        "ball_mask",
        [](const Grid& g, std::vector<double> center, double R) {
            std::array<double, 3> c{0, 0, 0};
            for (std::size_t i = 0; i < center.size() && i < 3; ++i) c[i] = center[i];
            return ball_mask(g, c, R);
        },
        py::arg("grid"), py::arg("center"), py::arg("R"));
    mod.def("energy",
            py::overload_cast<const Field&, const Region&, const EnergyParams&, const Potential&>(
                &energy));
    mod.def("total_energy",
            py::overload_cast<const Field&, const EnergyParams&, const Potential&>(&energy));
    mod.def(
        "p_laplacian_residual",
        [](const Field& u, const EnergyParams& params, const Potential& P) {
            auto res = p_laplacian_residual(u, params, P);
            Field tmp;
            tmp.grid = u.grid;
            tmp.values = std::move(res.values);
            py::dict d;
            d["values"] = field_array(tmp);
            tmp.values.assign(res.interior.begin(), res.interior.end());
            d["interior"] = field_array(tmp);
            return d;
        },
        py::arg("u"), py::arg("params"), py::arg("P"));

    py::class_<BoundaryCondition>(mod, "BoundaryCondition")
        .def_static("all_natural", &BoundaryCondition::all_natural)
        .def_static("axis_dirichlet", &BoundaryCondition::axis_dirichlet, py::arg("axis"),
                    py::arg("lo"), py::arg("hi"));

    py::class_<SolveReport>(mod, "SolveReport")
        .def_readonly("iterations", &SolveReport::iterations)
        .def_readonly("final_energy", &SolveReport::final_energy)
        .def_readonly("final_residual", &SolveReport::final_residual)
        .def_readonly("converged", &SolveReport::converged)
        .def_readonly("energy_trace", &SolveReport::energy_trace)
        .def_readonly("step_sizes", &SolveReport::step_sizes);

    mod.def(
        "minimize",
        [](const Field& u0, const BoundaryCondition& bc, const EnergyParams& params,
           const Potential& P, double tol, long max_iter) {
            SolveOptions opts;
            opts.tol = tol;
            opts.max_iter = max_iter;
            auto [u, rep] = minimize(u0, bc, params, P, opts);
            return py::make_tuple(std::move(u), std::move(rep));
        },
        py::arg("u0"), py::arg("bc"), py::arg("params"), py::arg("P"), py::arg("tol") = 1e-6,
        py::arg("max_iter") = 200000);

    mod.def(
        "volume_potential_sequences",
        [](const Field& u, std::vector<double> center, int R_max, const EnergyParams& params,
           const Potential& P) {
            std::array<double, 3> c{0, 0, 0};
            for (std::size_t i = 0; i < center.size() && i < 3; ++i) c[i] = center[i];
            const auto seq = volume_potential_sequences(u, c, R_max, params, P);
            py::dict d;
            d["V"] = seq.V;
            d["P"] = seq.P;
            return d;
        },
        py::arg("u"), py::arg("center"), py::arg("R_max"), py::arg("params"), py::arg("P"));
    mod.def(
        "mixture_sequence",
        [](std::vector<double> V, std::vector<double> P, int T, double p, double m) {
            return mixture_sequence(V, P, T, p, m);
        },
        py::arg("V"), py::arg("P"), py::arg("T"), py::arg("p"), py::arg("m"));
    mod.def(
        "density_report",
        [](const Field& u, std::vector<double> center, int R0, int R_max,
           const EnergyParams& params) {
            std::array<double, 3> c{0, 0, 0};
            for (std::size_t i = 0; i < center.size() && i < 3; ++i) c[i] = center[i];
            const auto rep = density_report(u, c, R0, R_max, params);
            py::dict d;
            d["delta"] = rep.delta;
            d["center_is_zero"] = rep.center_is_zero;
            std::vector<double> fp, fm;
            for (const auto& row : rep.rows) {
                fp.push_back(row.frac_plus);
                fm.push_back(row.frac_minus);
            }
            d["frac_plus"] = fp;
            d["frac_minus"] = fm;
            return d;
        },
        py::arg("u"), py::arg("center"), py::arg("R0"), py::arg("R_max"), py::arg("params"));
    mod.def(
        "induction_simulator",
        [](int n, double sigma, int T, double C0, double c1, double gamma,
           std::vector<double> M_init, int R_seed, int R_stop) {
            const auto tr =
                induction_simulator(n, sigma, T, C0, c1, gamma, M_init, R_seed, R_stop);
            py::dict d;
            d["rho1"] = tr.rho1;
            d["hypothesis_met"] = tr.hypothesis_met;
            d["maintained"] = tr.maintained;
            d["first_ind_violation"] = tr.first_ind_violation;
            d["first_chain_violation"] = tr.first_chain_violation;
            return d;
        },
        py::arg("n"), py::arg("sigma"), py::arg("T"), py::arg("C0"), py::arg("c1"),
        py::arg("gamma"), py::arg("M_init"), py::arg("R_seed"), py::arg("R_stop"));

    mod.def(
        "save_snapshot",
        [](const Field& u, const std::string& prefix) { save_snapshot(u, prefix); },
        py::arg("u"), py::arg("prefix"));
    mod.def(
        "load_snapshot",
        [](const std::string& path) { return load_snapshot(path).first; },
        py::arg("path"));

    mod.def(
        "run_experiment",
        [](const std::string& config_json) {
            const auto cfg = RunConfig::from_json(nlohmann::json::parse(config_json));
            return run_experiment(cfg).dump();
        },
        py::arg("config_json"), "run a configured pipeline; takes and returns JSON text");
}
