#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <igamg/bench.hpp>
#include <sstream>

namespace py = pybind11;
using namespace igamg;

namespace {

SigmaMode sigma_mode_from_string(const std::string& s) {
    if (s == "theory") return SigmaMode::theory;
    if (s == "preset") return SigmaMode::preset;
    if (s == "explicit") return SigmaMode::explicit_value;
    throw std::invalid_argument("sigma mode must be theory|preset|explicit");
}

CycleType cycle_from_string(const std::string& s) {
    if (s == "twogrid") return CycleType::two_grid;
    if (s == "v") return CycleType::v_cycle;
    if (s == "w") return CycleType::w_cycle;
    throw std::invalid_argument("cycle must be twogrid|v|w");
}

}  // namespace

PYBIND11_MODULE(_igamg, m) {
    m.doc() = "Matrix-free multigrid for tensor-product B-spline discretizations of "
              "-lap(u) + u = f on (0,1)^d";

    py::class_<SplineSpace>(m, "SplineSpace")
        .def_readonly("degree", &SplineSpace::degree)
        .def_readonly("intervals", &SplineSpace::intervals)
        .def_readonly("h", &SplineSpace::h)
        .def_readonly("knots", &SplineSpace::knots)
        .def_property_readonly("dim", &SplineSpace::dim)
        .def("__repr__", [](const SplineSpace& s) {
            std::ostringstream os;
            os << "SplineSpace(degree=" << s.degree << ", intervals=" << s.intervals << ")";
            return os.str();
        });

    m.def("make_space", &make_space, py::arg("degree"), py::arg("intervals"));

    m.def(
        "eval_basis",
        [](const SplineSpace& s, double x, int deriv) {
            const BasisValues bv = eval_basis(s, x, deriv);
            return py::make_tuple(bv.first, bv.values);
        },
        py::arg("space"), py::arg("x"), py::arg("deriv_order") = 0,
        "Returns (first_active_index, values) of the B-splines active at x.");

    m.def(
        "mass_matrix", [](const SplineSpace& s) { return assemble_mass(s).dense(); },
        py::arg("space"));
    m.def(
        "stiffness_matrix", [](const SplineSpace& s) { return assemble_stiffness(s).dense(); },
        py::arg("space"));
    m.def(
        "prolongation",
        [](const SplineSpace& coarse, const SplineSpace& fine) {
            return Matrix(prolongation(coarse, fine));
        },
        py::arg("coarse"), py::arg("fine"));

    py::class_<SplittingBasis>(m, "SplittingBasis")
        .def_readonly("k", &SplittingBasis::k)
        .def_property_readonly("P0", [](const SplittingBasis& b) { return Matrix(b.P0); })
        .def_property_readonly("P_perp", [](const SplittingBasis& b) { return Matrix(b.P_perp); })
        .def_readonly("P1", &SplittingBasis::P1)
        .def_property_readonly("dim0", &SplittingBasis::dim0)
        .def_property_readonly("dim1", &SplittingBasis::dim1);

    m.def(
        "compute_splitting",
        [](const SplineSpace& s) { return compute_splitting(s, assemble_mass(s)); },
        py::arg("space"));

    py::class_<TensorOperator>(m, "TensorOperator")
        .def_property_readonly("shape",
                               [](const TensorOperator& op) {
                                   return py::make_tuple(op.size(), op.size());
                               })
        .def("apply", &TensorOperator::apply, py::arg("x"))
        .def("dense", &TensorOperator::dense)
        .def_property_readonly("num_terms", &TensorOperator::num_terms);

    m.def("build_operator", &build_operator, py::arg("space"), py::arg("d"));
    m.def("build_mass_operator", &build_mass_operator, py::arg("space"), py::arg("d"));
    m.def("assemble_rhs", &assemble_rhs, py::arg("space"), py::arg("d"));
    m.def("exact_solution_error", &exact_solution_error, py::arg("u"), py::arg("space"),
          py::arg("d"));

    m.def(
        "kron_apply",
        [](const std::vector<Matrix>& factors, const Vector& x) { return kron_apply(factors, x); },
        py::arg("factors"), py::arg("x"));
    m.def(
        "permute_axes",
        [](const Vector& x, const std::vector<Index>& dims, const std::vector<int>& order) {
            return permute_axes(x, dims, AxisPermutation(order));
        },
        py::arg("x"), py::arg("dims"), py::arg("order"));

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("u", &SolveResult::u)
        .def_readonly("iterations", &SolveResult::iterations)
        .def_readonly("residual_history", &SolveResult::residual_history)
        .def_readonly("converged", &SolveResult::converged)
        .def_readonly("failure", &SolveResult::failure);

    m.def(
        "solve",
        [](int d, int p, int level, const std::string& solver, const std::string& cycle,
           const std::string& sigma_mode, double sigma_scale, double tau, int nu, double tol,
           int max_iter, std::optional<Vector> initial_guess) {
            SolverConfig sc;
            sc.cycle = cycle_from_string(cycle);
            sc.sigma_mode = sigma_mode_from_string(sigma_mode);
            sc.sigma_scale = sigma_scale;
            sc.tau = tau;
            sc.nu_pre = sc.nu_post = nu;
            sc.tol = tol;
            sc.max_iter = max_iter;
            const int coarse = sc.cycle == CycleType::two_grid
                                   ? level - 1
                                   : MultigridHierarchy::default_coarse_level(p);
            const MultigridHierarchy h(d, p, level, coarse, sc.sigma_mode, sc.sigma_scale);
            const Vector f = assemble_rhs(h.level(level).space, d);
            const Vector* guess = initial_guess ? &*initial_guess : nullptr;
            return solver == "pcg" ? solve_pcg(h, f, sc, guess) : solve_mg(h, f, sc, guess);
        },
        py::arg("d"), py::arg("p"), py::arg("level"), py::arg("solver") = "mg",
        py::arg("cycle") = "v", py::arg("sigma_mode") = "preset", py::arg("sigma_scale") = 0.0,
        py::arg("tau") = 1.0, py::arg("nu") = 1, py::arg("tol") = 1e-8, py::arg("max_iter") = 500,
        py::arg("initial_guess") = std::nullopt,
        "Solves the model problem on (0,1)^d and returns a SolveResult.");

    m.def(
        "run_record_json",
        [](int d, int p, int level, const std::string& solver, std::uint64_t seed) {
            RunConfig cfg;
            cfg.d = d;
            cfg.p = p;
            cfg.level = level;
            cfg.solver = solver == "pcg" ? SolverKind::pcg : SolverKind::mg;
            cfg.seed = seed;
            return record_json(run_single(cfg));
        },
        py::arg("d"), py::arg("p"), py::arg("level"), py::arg("solver") = "mg",
        py::arg("seed") = 1234,
        "Benchmark-style run (seeded random initial guess); returns the JSON record.");
}
