#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <Eigen/Eigenvalues>

#include "kgfock/errors.hpp"
#include "kgfock/quantization.hpp"
#include "kgfock/spectral.hpp"

namespace py = pybind11;
using namespace kgfock;

namespace {

Rational to_rational(const py::object& v) {
  if (py::isinstance<py::int_>(v)) return make_rational(v.cast<std::int64_t>());
  if (py::isinstance<py::str>(v)) return parse_rational(v.cast<std::string>());
  throw ParameterError("v must be an int or a 'p/q' string");
}

py::dict coupling_dict(const CouplingReport& r) {
  py::dict d;
  d["c0"] = r.c0;
  d["c1"] = r.c1;
  d["lambda_quant"] = r.lambda_quant;
  return d;
}

}  // namespace

PYBIND11_MODULE(_kgfock, m) {
  m.doc() = "Lattice-truncated charged P(phi)_2 toolkit";

  auto base = py::register_exception<Error>(m, "KgfockError", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
  py::register_exception<StabilityError>(m, "StabilityError", base.ptr());
  py::register_exception<UnstableConfigurationError>(m, "UnstableConfigurationError", base.ptr());
  py::register_exception<IllConditionedError>(m, "IllConditionedError", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());

  py::class_<MomentumLattice>(m, "MomentumLattice")
      .def_property_readonly("v", [](const MomentumLattice& l) { return l.v().str(); })
      .def_property_readonly("kappa", &MomentumLattice::kappa)
      .def_property_readonly("mass", &MomentumLattice::mass)
      .def_property_readonly("size", &MomentumLattice::size)
      .def_property_readonly("modes", &MomentumLattice::modes)
      .def_property_readonly("dispersions", &MomentumLattice::dispersions)
      .def("__len__", &MomentumLattice::size)
      .def("__repr__", [](const MomentumLattice& l) {
        return "MomentumLattice(v=" + l.v().str() + ", kappa=" + std::to_string(l.kappa()) + ", modes=" + std::to_string(l.size()) + ")";
      });
  m.def("lattice", [](const py::object& v, double kappa, double mass) { return build_lattice(to_rational(v), kappa, mass); },
        py::arg("v"), py::arg("kappa"), py::arg("mass") = 1.0);

  py::class_<Potential>(m, "Potential")
      .def_readonly("label", &Potential::label)
      .def("value", [](const Potential& p, double x) { return p.value(x); })
      .def("fourier", [](const Potential& p, double k) { return p.fourier(k); })
      .def("__repr__", [](const Potential& p) { return "Potential(" + p.label + ")"; });
  m.def("zero_potential", &zero_potential);
  m.def("gaussian_potential", &gaussian_potential, py::arg("amplitude") = 1.0, py::arg("width") = 1.0);
  m.def("lorentzian_potential", &lorentzian_potential, py::arg("amplitude") = 1.0, py::arg("width") = 1.0);
  m.def("make_potential", &make_potential, py::arg("kind"), py::arg("amplitude") = 1.0, py::arg("width") = 1.0);
  m.def("sampled_potential", [](std::vector<double> s, double x0, double dx) { return sampled_potential(std::move(s), x0, dx); },
        py::arg("samples"), py::arg("x0"), py::arg("dx"));

  m.def("potential_matrix", &potential_matrix);
  m.def("b_matrix", &b_matrix);
  m.def("pair_kernel", [](const Potential& p, const MomentumLattice& l) { return pair_kernel(p, l).matrix; });
  m.def("pair_kernel_bound", &pair_kernel_bound);
  m.def("lambda_quant", [](const Potential& p, const MomentumLattice& l) { return coupling_dict(lambda_quant(p, l)); });
  m.def("omega_block", [](double lam, const Potential& p, const MomentumLattice& l) { return omega_block(lam, p, l).assembled(); });
  m.def(
      "weyl_quantize",
      [](const std::function<Complex(double, double)>& symbol, int points, double x_min, double dx, double k_min, double dk) {
        return weyl_quantize(symbol, WeylGrid{points, x_min, dx, k_min, dk});
      },
      py::arg("symbol"), py::arg("points") = 256, py::arg("x_min") = -8.0, py::arg("dx") = 1.0 / 16.0, py::arg("k_min") = -8.0,
      py::arg("dk") = 1.0 / 16.0);

  m.def(
      "quantize",
      [](int points, double length, double mass, const Potential& p) {
        const QuantizationReport r = quantize(make_phase_space_grid(points, length, mass, p));
        py::dict d;
        d["delta"] = r.delta;
        d["min_spec_hV"] = r.min_spec_hV;
        d["j_square_residual"] = r.j_square_residual;
        d["reconstruction_residual"] = r.reconstruction_residual;
        d["free_check_error"] = r.free_check_error;
        return d;
      },
      py::arg("points"), py::arg("length"), py::arg("mass"), py::arg("potential"));

  py::class_<FockBasis, std::shared_ptr<FockBasis>>(m, "FockBasis")
      .def_property_readonly("dimension", &FockBasis::dimension)
      .def_property_readonly("slots", &FockBasis::slots)
      .def_property_readonly("modes", &FockBasis::modes)
      .def_property_readonly("n_max", &FockBasis::n_max)
      .def_property_readonly("lattice", &FockBasis::lattice)
      .def("occupation",
           [](const FockBasis& b, std::size_t s) {
             if (s >= b.dimension()) throw py::index_error("state index out of range");
             const auto occ = b.occupation(s);
             return std::vector<int>(occ.begin(), occ.end());
           })
      .def("index_of", [](const FockBasis& b, const std::vector<int>& occ) -> py::object {
        std::vector<std::uint8_t> o;
        for (int x : occ) {
          if (x < 0 || x > 255) throw ParameterError("occupation numbers must lie in 0..255");
          o.push_back(static_cast<std::uint8_t>(x));
        }
        const std::size_t i = b.index_of(o);
        if (i == FockBasis::npos) return py::none();
        return py::int_(i);
      });
  m.def(
      "enumerate_basis",
      [](const MomentumLattice& l, int n_max, std::size_t cap) { return std::const_pointer_cast<FockBasis>(enumerate_basis(l, n_max, cap)); },
      py::arg("lattice"), py::arg("n_max"), py::arg("max_dimension") = kDefaultMaxDimension);

  py::class_<InteractionSpec>(m, "InteractionSpec")
      .def_readonly("degree", &InteractionSpec::degree)
      .def_readonly("bounded_below_certificate", &InteractionSpec::bounded_below_certificate);
  m.def(
      "interaction_spec",
      [](const std::vector<std::tuple<int, int, double>>& coeffs, const Potential& cutoff) {
        std::vector<Monomial> mono;
        for (const auto& [a1, a2, c] : coeffs) mono.push_back({a1, a2, c});
        return make_interaction_spec(mono, cutoff);
      },
      py::arg("coeffs"), py::arg("cutoff"));

  py::class_<HamiltonianBundle>(m, "HamiltonianBundle")
      .def_property_readonly("H", [](const HamiltonianBundle& b) { return b.H.matrix; })
      .def_property_readonly("H0", [](const HamiltonianBundle& b) { return b.H0.matrix; })
      .def_property_readonly("HI", [](const HamiltonianBundle& b) { return b.HI.matrix; })
      .def_property_readonly("Q", [](const HamiltonianBundle& b) { return b.charge().matrix; })
      .def_readonly("lam", &HamiltonianBundle::lambda)
      .def_property_readonly("lambda_quant", [](const HamiltonianBundle& b) { return b.coupling.lambda_quant; })
      .def_property_readonly("basis", [](const HamiltonianBundle& b) { return std::const_pointer_cast<FockBasis>(b.basis); });
  m.def(
      "assemble",
      [](const InteractionSpec& spec, const Potential& p, double lam, const std::shared_ptr<FockBasis>& basis, bool override_stability) {
        return assemble(spec, p, lam, basis, AssemblyOptions{override_stability});
      },
      py::arg("spec"), py::arg("potential"), py::arg("lam"), py::arg("basis"), py::arg("override_stability") = false,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "ground_state",
      [](const HamiltonianBundle& b) {
        const GroundState g = ground_state(b.H);
        return py::make_tuple(g.energy, g.vector);
      },
      py::arg("bundle"));
  m.def(
      "hvz_gap_probe",
      [](const HamiltonianBundle& b, int depth, int search) {
        const SpectralReport r = hvz_gap_probe(b, depth, {}, search);
        py::dict d;
        d["e0"] = r.e0;
        d["eigenvalues"] = r.eigenvalues;
        d["gap"] = r.gap;
        d["hvz_onset_estimate"] = r.hvz_onset_estimate;
        d["onset_level"] = r.onset_level;
        d["one_particle_weights"] = r.one_particle_weights;
        return d;
      },
      py::arg("bundle"), py::arg("report_depth") = 4, py::arg("search_depth") = 16);
  m.def(
      "heisenberg_probe",
      [](const HamiltonianBundle& b, const CVector& f, const std::vector<double>& times, const CVector& psi) {
        const ProbeResult r = heisenberg_probe(b, f, times, psi);
        py::dict d;
        d["values"] = r.values;
        d["cauchy_differences"] = r.cauchy_differences;
        d["trusted"] = r.trusted;
        d["recurrence_time"] = r.recurrence_time;
        return d;
      },
      py::arg("bundle"), py::arg("f"), py::arg("times"), py::arg("psi"));
}
