#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nlsinv/cli.hpp"
#include "nlsinv/config.hpp"
#include "nlsinv/pie.hpp"
#include "nlsinv/recon.hpp"
#include "nlsinv/solver.hpp"
#include "nlsinv/waves.hpp"

namespace py = pybind11;
using namespace nlsinv;

namespace {

using CArray = py::array_t<cdouble, py::array::c_style | py::array::forcecast>;

PolarField field_from(const PolarGrid& g, const CArray& a) {
  if (a.ndim() != 2 || a.shape(0) != g.nr() || a.shape(1) != g.ntheta())
    throw ParameterError("field must have shape (Nr, Ntheta)");
  return PolarField(g, std::vector<cdouble>(a.data(), a.data() + a.size()));
}

BoundaryTrace trace_from(const PolarGrid& g, const CArray& a) {
  if (a.ndim() != 1 || a.shape(0) != g.ntheta()) throw ParameterError("trace must have shape (Ntheta,)");
  return BoundaryTrace(g, std::vector<cdouble>(a.data(), a.data() + a.size()));
}

CArray to_array(const PolarField& f) {
  CArray out({f.grid().nr(), f.grid().ntheta()});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

CArray to_array(const BoundaryTrace& t) {
  CArray out(t.grid().ntheta());
  std::copy(t.values().begin(), t.values().end(), out.mutable_data());
  return out;
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["iterations"] = r.iterations;
  d["final_residual"] = r.final_residual;
  d["converged"] = r.converged;
  d["condition_warning"] = r.condition_warning;
  d["update_norms"] = r.update_norms;
  d["message"] = r.message;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Inverse potential reconstruction for a nonlinear Schroedinger-type equation";

  py::register_exception<ParameterError>(mod, "ParameterError", PyExc_ValueError);
  py::register_exception<FormatError>(mod, "FormatError", PyExc_ValueError);
  py::register_exception<SolverError>(mod, "SolverError", PyExc_RuntimeError);

  mod.def(
      "pie_terms",
      [](int m) {
        std::vector<std::pair<std::uint32_t, int>> out;
        for (const auto& t : pie::expand(m).terms) out.emplace_back(t.mask, t.sign);
        return out;
      },
      py::arg("m"), "(mask, sign) for every non-empty subset of {1..m}");

  mod.def(
      "polarize",
      [](const std::vector<cdouble>& w) {
        return pie::polarize<cdouble>(pie::expand(static_cast<int>(w.size())), w);
      },
      py::arg("weights"), "Product of the weights through the polarization identity");

  mod.def(
      "make_zeta",
      [](int m, double k, std::array<double, 2> xi) {
        const auto z = waves::make_zeta(m, k, waves::Frequency::from_xi(xi));
        std::vector<CVec2> all{z.zeta0};
        all.insert(all.end(), z.zetas.begin(), z.zetas.end());
        py::dict d;
        d["zetas"] = all;
        d["xi_big"] = z.xi_big;
        d["regime"] = z.regime == waves::Regime::Propagating ? "propagating" : "evanescent";
        return d;
      },
      py::arg("m"), py::arg("k"), py::arg("xi"), "Probe vectors zeta_0..zeta_m");

  mod.def(
      "dirichlet_eigenvalues",
      [](int nr, int ntheta, double radius) {
        return dirichlet_eigenvalues(PolarGrid(nr, ntheta, radius));
      },
      py::arg("nr"), py::arg("ntheta"), py::arg("radius") = 0.5);

  mod.def(
      "grid_points",
      [](int nr, int ntheta, double radius) {
        const PolarGrid g(nr, ntheta, radius);
        py::array_t<double> out({nr, ntheta, 2});
        auto v = out.mutable_unchecked<3>();
        for (int i = 0; i < nr; ++i)
          for (int j = 0; j < ntheta; ++j) {
            const Vec2 x = g.point(i, j);
            v(i, j, 0) = x[0];
            v(i, j, 1) = x[1];
          }
        return out;
      },
      py::arg("nr"), py::arg("ntheta"), py::arg("radius") = 0.5,
      "Node coordinates, shape (Nr, Ntheta, 2)");

  mod.def(
      "solve_helmholtz",
      [](const CArray& source, const CArray& dirichlet, double k, double radius) {
        const PolarGrid g(static_cast<int>(source.shape(0)), static_cast<int>(source.shape(1)), radius);
        auto [u, rep] = solve_helmholtz(field_from(g, source), trace_from(g, dirichlet), k);
        return py::make_tuple(to_array(u), report_dict(rep));
      },
      py::arg("source"), py::arg("dirichlet"), py::arg("k"), py::arg("radius") = 0.5,
      "(Delta_h + k^2) u = source with u = dirichlet on the boundary");

  mod.def(
      "solve_nonlinear",
      [](const CArray& c, const CArray& dirichlet, double k, int m, const std::string& method,
         double radius) {
        const PolarGrid g(static_cast<int>(c.shape(0)), static_cast<int>(c.shape(1)), radius);
        const HelmholtzSolver solver(g, k);
        SolverConfig cfg;
        cfg.method = nonlinear_method_from_string(method);
        const auto sol = solve_nonlinear(solver, field_from(g, c), m, trace_from(g, dirichlet), cfg);
        return py::make_tuple(to_array(sol.u), to_array(neumann_trace(sol.u, trace_from(g, dirichlet))),
                              report_dict(sol.report));
      },
      py::arg("c"), py::arg("dirichlet"), py::arg("k"), py::arg("m"),
      py::arg("method") = "fixed_point", py::arg("radius") = 0.5,
      "Delta u + k^2 u - c u^m = 0; returns (u, Neumann trace, report)");

  mod.def(
      "plan_frequencies",
      [](int m, double k, std::optional<double> cutoff) {
        std::vector<std::pair<int, int>> out;
        for (const auto& e : recon::plan_frequencies(m, k, 2.0 * kPi, cutoff).entries)
          out.emplace_back(e.n1, e.n2);
        return out;
      },
      py::arg("m"), py::arg("k"), py::arg("cutoff") = py::none(),
      "Lattice indices (n1, n2) of the planned frequencies xi = 2 pi n");

  mod.def("default_config", []() { return to_json(RunConfig{}); },
          "Default run configuration as JSON text");

  mod.def(
      "reconstruct",
      [](const std::string& config_json) {
        const RunConfig cfg = parse_run_config(config_json);
        recon::ReconstructionResult res;
        {
          py::gil_scoped_release release;
          res = recon::run(cfg);
        }
        const std::size_t n = res.coefficients.entries.size();
        py::array_t<int> idx({static_cast<py::ssize_t>(n), py::ssize_t{2}});
        CArray val(static_cast<py::ssize_t>(n)), ref(static_cast<py::ssize_t>(n));
        py::array_t<bool> ok(static_cast<py::ssize_t>(n));
        for (std::size_t i = 0; i < n; ++i) {
          const auto& c = res.coefficients.entries[i];
          idx.mutable_at(i, 0) = c.n1;
          idx.mutable_at(i, 1) = c.n2;
          val.mutable_at(i) = c.value;
          ref.mutable_at(i) = c.reference.value_or(cdouble(NAN, NAN));
          ok.mutable_at(i) = c.status == recon::Status::Ok;
        }
        const int s = res.c_inv.n;
        py::array_t<double> cinv({s, s});
        std::copy(res.c_inv.values.begin(), res.c_inv.values.end(), cinv.mutable_data());
        py::dict metrics;
        metrics["max_abs_error"] = res.metrics.max_abs_error;
        metrics["l2_error"] = res.metrics.l2_error;
        metrics["wall_seconds"] = res.metrics.wall_seconds;
        metrics["missing_count"] = res.metrics.missing_count;
        metrics["partial"] = res.metrics.partial;
        py::dict d;
        d["n"] = idx;
        d["coefficients"] = val;
        d["reference"] = ref;
        d["ok"] = ok;
        d["c_inv"] = cinv;
        d["metrics"] = metrics;
        return d;
      },
      py::arg("config_json") = "{}",
      "Full reconstruction; c_inv[a, b] is at (x1, x2) = linspace(-0.5, 0.5)[a, b]");

  mod.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool; returns (exit_code, stdout, stderr)");
}
