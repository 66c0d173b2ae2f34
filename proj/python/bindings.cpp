#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sqglab/barriers.hpp"
#include "sqglab/diagnostics.hpp"
#include "sqglab/extension.hpp"
#include "sqglab/regularity.hpp"
#include "sqglab/solver.hpp"
#include "sqglab/spectral.hpp"
#include "sqglab/trajectory_io.hpp"
#include "sqglab/version.hpp"

namespace py = pybind11;
using namespace sqglab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PhysicalField to_field(const Array& a, const std::vector<double>& lengths) {
  std::vector<std::size_t> dims(a.shape(), a.shape() + a.ndim());
  return PhysicalField(Grid(dims, lengths), std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const PhysicalField& f) {
  Array out(f.grid.dims());
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

py::list to_arrays(const VectorField& v) {
  py::list out;
  for (const auto& c : v) out.append(to_array(c));
  return out;
}

DriftMode parse_drift(const std::string& s) {
  if (s == "sqg") return DriftMode::sqg;
  if (s == "zero") return DriftMode::zero;
  throw std::invalid_argument("drift must be 'sqg' or 'zero', got '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Critical SQG solver, De Giorgi diagnostics and barrier lemmas";
  m.attr("__version__") = std::string(version);

  m.def("fractional_laplacian",
        [](const Array& theta, double beta, const std::vector<double>& lengths) {
          return to_array(fractional_laplacian(to_field(theta, lengths), beta));
        },
        py::arg("theta"), py::arg("beta") = 1.0, py::arg("lengths") = std::vector<double>{});

  m.def("extension_lambda",
        [](const Array& theta, double dz, std::size_t count, const std::vector<double>& lengths) {
          const auto z = uniform_z_levels(dz, count);
          return to_array(normal_derivative_at_boundary(harmonic_extension(to_field(theta, lengths), z)));
        },
        py::arg("theta"), py::arg("dz"), py::arg("count") = 3, py::arg("lengths") = std::vector<double>{},
        "Lambda theta as minus the one-sided z derivative of the harmonic extension.");

  m.def("sqg_velocity",
        [](const Array& theta, const std::vector<double>& lengths) {
          return to_arrays(velocity_from_theta(to_field(theta, lengths)));
        },
        py::arg("theta"), py::arg("lengths") = std::vector<double>{});

  m.def("divergence",
        [](const std::vector<Array>& components, const std::vector<double>& lengths) {
          VectorField v;
          for (const auto& c : components) v.push_back(to_field(c, lengths));
          return to_array(divergence(v));
        },
        py::arg("components"), py::arg("lengths") = std::vector<double>{});

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("times",
                             [](const Trajectory& t) {
                               std::vector<double> out;
                               for (const auto& s : t.snapshots) out.push_back(s.time);
                               return out;
                             })
      .def_property_readonly("snapshots",
                             [](const Trajectory& t) {
                               py::list out;
                               for (const auto& s : t.snapshots) out.append(to_array(s.theta));
                               return out;
                             })
      .def_property_readonly("energy_residual",
                             [](const Trajectory& t) {
                               std::vector<double> out;
                               for (const auto& s : t.scalars) out.push_back(s.energy_residual);
                               return out;
                             })
      .def_readonly("aborted", &Trajectory::aborted)
      .def_readonly("abort_reason", &Trajectory::abort_reason)
      .def("write", [](const Trajectory& t, const std::filesystem::path& dir) { write_trajectory(dir, t); });

  m.def("run",
        [](const std::vector<std::size_t>& dims, double t_end, std::optional<double> dt, std::uint64_t seed, int k_max,
           double beta, double kappa, const std::string& drift, std::size_t snapshot_stride) {
          SolverConfig c;
          c.grid = Grid(dims);
          c.t_end = t_end;
          c.dt = dt;
          c.beta = beta;
          c.kappa = kappa;
          c.drift = parse_drift(drift);
          c.snapshot_stride = snapshot_stride;
          c.initial.seed = seed;
          c.initial.k_max = k_max;
          py::gil_scoped_release release;
          return run(c);
        },
        py::arg("dims"), py::arg("t_end"), py::arg("dt") = py::none(), py::arg("seed") = 0, py::arg("k_max") = 8,
        py::arg("beta") = 1.0, py::arg("kappa") = 1.0, py::arg("drift") = "sqg", py::arg("snapshot_stride") = 1,
        "Integrates from a random band-limited initial field.");

  m.def("read_trajectory", &read_trajectory, py::arg("directory"));

  m.def("duhamel_residual", &duhamel_residual, py::arg("trajectory"), py::arg("t"), py::arg("stride") = 1);

  m.def("spanning_levels", [](const Array& theta, std::size_t count) {
    return spanning_levels(to_field(theta, {}), count);
  });

  m.def("level_set_sweep",
        [](const Trajectory& traj, const std::vector<double>& levels, double t1, double t2) {
          py::list out;
          for (const auto& r : level_set_sweep(traj, levels, t1, t2)) {
            out.append(py::dict(py::arg("level") = r.level, py::arg("lhs") = r.lhs, py::arg("rhs") = r.rhs,
                                py::arg("residual") = r.residual, py::arg("status") = to_string(r.status)));
          }
          return out;
        },
        py::arg("trajectory"), py::arg("levels"), py::arg("t1"), py::arg("t2"));

  m.def("linf_decay_constant",
        [](const Trajectory& traj, double t_min, double t_max) { return linf_decay_check(traj, t_min, t_max).constant; },
        py::arg("trajectory"), py::arg("t_min"), py::arg("t_max"));

  m.def("cordoba_min_residual",
        [](const Array& theta, std::optional<double> softplus_level, double width, std::size_t refine) {
          const auto f = to_field(theta, {});
          const auto phi = softplus_level ? smoothed_positive_part(*softplus_level, width) : square_function();
          const auto r = cordoba_pointwise_check(f, phi, refine);
          return py::dict(py::arg("min_residual") = r.min_residual, py::arg("scale") = r.scale,
                          py::arg("status") = to_string(r.status));
        },
        py::arg("theta"), py::arg("softplus_level") = py::none(), py::arg("width") = 0.1, py::arg("refine") = 4,
        "Pointwise check of phi'(theta) Lambda theta >= Lambda phi(theta); phi = s^2 unless a softplus level is given.");

  m.def("barrier_b2",
        [](double x, double z, int p_max, double boundary_value) {
          return barrier_b2_eval(BarrierB2{p_max, boundary_value}, x, z).value;
        },
        py::arg("x"), py::arg("z"), py::arg("p_max") = 50, py::arg("boundary_value") = 2.0);

  m.def("barrier_b1_lambda",
        [](std::size_t resolution, std::size_t dim) { return solve_barrier_b1(resolution, dim).lambda; },
        py::arg("resolution") = 32, py::arg("dim") = 1);

  m.def("isoperimetric",
        [](const Array& nodes) {
          const auto n = static_cast<std::size_t>(nodes.shape(0)) - 1;
          NodeField f{static_cast<std::size_t>(nodes.ndim()), n,
                      std::vector<double>(nodes.data(), nodes.data() + nodes.size())};
          const auto r = isoperimetric_check(f);
          return py::dict(py::arg("lhs") = r.lhs, py::arg("rhs") = r.rhs, py::arg("ratio") = r.ratio);
        },
        py::arg("nodes"), "Node samples on [-1, 1]^N, (n + 1) per axis.");

  m.def("holder_fit",
        [](const Trajectory& traj, double t, const std::vector<double>& x, const std::vector<double>& radii,
           bool use_frame) {
          std::optional<FramePath> frame;
          if (use_frame) frame = moving_frame(traj);
          const auto f = holder_exponent_fit(traj, t, x, radii, frame ? &*frame : nullptr);
          return py::dict(py::arg("alpha") = f.alpha, py::arg("raw_slope") = f.raw_slope,
                          py::arg("r_squared") = f.r_squared, py::arg("oscillations") = f.oscillations);
        },
        py::arg("trajectory"), py::arg("t"), py::arg("x"), py::arg("radii"), py::arg("moving_frame") = false);

  m.def("radius_ladder", &radius_ladder, py::arg("radius_max"), py::arg("count"));
}
