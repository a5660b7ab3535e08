#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spdecohere/decoherence.hpp"
#include "spdecohere/oracle.hpp"
#include "spdecohere/profiles.hpp"
#include "spdecohere/quadrature.hpp"
#include "spdecohere/version.hpp"

namespace py = pybind11;
using namespace spdecohere;

namespace {

void export_profiles(py::module_& m) {
  py::class_<VelocityProfile>(m, "VelocityProfile")
      .def_static("from_breakpoints",
                  [](const std::vector<std::pair<double, double>>& pts) {
                    std::vector<ProfileBreakpoint> points;
                    points.reserve(pts.size());
                    for (const auto& [t, v] : pts) points.push_back({t, v});
                    return VelocityProfile::from_breakpoints(std::move(points));
                  },
                  py::arg("points"))
      .def_property_readonly("duration", &VelocityProfile::duration)
      .def_property_readonly("displacement", &VelocityProfile::displacement)
      .def_property_readonly("peak_speed", &VelocityProfile::peak_speed)
      .def_property_readonly("subluminal", &VelocityProfile::subluminal)
      .def_property_readonly("is_zero", &VelocityProfile::is_zero)
      .def("velocity_at", &VelocityProfile::velocity_at, py::arg("t"))
      .def("breakpoints", [](const VelocityProfile& p) {
        std::vector<std::pair<double, double>> out;
        for (const auto& bp : p.breakpoints()) out.emplace_back(bp.time, bp.velocity);
        return out;
      });

  m.def("triangular_profile", &triangular_profile, py::arg("v_z"), py::arg("tau_z"),
        py::arg("strict_subluminal") = false);
  m.def("asymmetric_triangular_profile", &asymmetric_triangular_profile, py::arg("v_z"),
        py::arg("tau_z"), py::arg("peak_fraction"), py::arg("strict_subluminal") = false);

  py::class_<GratingGeometry>(m, "GratingGeometry")
      .def(py::init<int, double, double, double>(), py::arg("grooves"), py::arg("half_period"),
           py::arg("depth"), py::arg("slope_angle"))
      .def_readonly("grooves", &GratingGeometry::grooves)
      .def_readonly("half_period", &GratingGeometry::half_period)
      .def_readonly("depth", &GratingGeometry::depth)
      .def_readonly("slope_angle", &GratingGeometry::slope_angle);

  py::class_<BeamConfig>(m, "BeamConfig")
      .def(py::init<double, double, double, int, double>(), py::arg("v_y"),
           py::arg("separation"), py::arg("height"), py::arg("epsilon"), py::arg("e2"))
      .def_readonly("v_y", &BeamConfig::v_y)
      .def_readonly("separation", &BeamConfig::separation)
      .def_readonly("height", &BeamConfig::height)
      .def_readonly("epsilon", &BeamConfig::epsilon)
      .def_readonly("e2", &BeamConfig::e2);

  py::class_<ProximityCheck>(m, "ProximityCheck")
      .def_readonly("height_ratio", &ProximityCheck::height_ratio)
      .def_readonly("depth_ratio", &ProximityCheck::depth_ratio)
      .def_readonly("threshold", &ProximityCheck::threshold)
      .def_property_readonly("height_ok", &ProximityCheck::height_ok)
      .def_property_readonly("depth_ok", &ProximityCheck::depth_ok);

  py::class_<GratingTraversal>(m, "GratingTraversal")
      .def_readonly("profile", &GratingTraversal::profile)
      .def_readonly("t_z", &GratingTraversal::t_z)
      .def_readonly("tau_z", &GratingTraversal::tau_z)
      .def_readonly("v_z", &GratingTraversal::v_z)
      .def_readonly("proximity", &GratingTraversal::proximity);

  m.def("profile_from_grating", &profile_from_grating, py::arg("grating"), py::arg("beam"),
        py::arg("proximity_warn_ratio") = 0.2);

  py::class_<SpectralTransform>(m, "SpectralTransform")
      .def(py::init<const VelocityProfile&>(), py::arg("profile"))
      .def("evaluate", &SpectralTransform::evaluate, py::arg("omega"))
      .def("power", &SpectralTransform::power, py::arg("omega"))
      .def_property_readonly("duration", &SpectralTransform::duration)
      .def_property_readonly("displacement", &SpectralTransform::displacement)
      .def_property_readonly("l1_norm", &SpectralTransform::l1_norm)
      .def_property_readonly("decay_constant", &SpectralTransform::decay_constant);

  m.attr("FINE_STRUCTURE") = kFineStructure;
  m.attr("GAUSSIAN_COUPLING") = kGaussianCoupling;
  m.attr("HEAVISIDE_LORENTZ_COUPLING") = kHeavisideLorentzCoupling;
}

void export_quadrature(py::module_& m) {
  py::class_<QuadratureSpec>(m, "QuadratureSpec")
      .def(py::init([](double rel_tol, double abs_tol, long long max_subdivisions) {
             QuadratureSpec spec;
             spec.rel_tol = rel_tol;
             spec.abs_tol = abs_tol;
             spec.max_subdivisions = max_subdivisions;
             return spec;
           }),
           py::arg("rel_tol") = 1e-8, py::arg("abs_tol") = 0.0,
           py::arg("max_subdivisions") = 20'000'000LL)
      .def_readwrite("rel_tol", &QuadratureSpec::rel_tol)
      .def_readwrite("abs_tol", &QuadratureSpec::abs_tol)
      .def_readwrite("max_subdivisions", &QuadratureSpec::max_subdivisions);

  py::class_<SpectralIntegral>(m, "SpectralIntegral")
      .def_readonly("value", &SpectralIntegral::value)
      .def_readonly("error_estimate", &SpectralIntegral::error_estimate)
      .def_readonly("tolerance_met", &SpectralIntegral::tolerance_met)
      .def_readonly("panels", &SpectralIntegral::panels)
      .def_readonly("omega_cutoff", &SpectralIntegral::omega_cutoff)
      .def_readonly("tail_bound", &SpectralIntegral::tail_bound);

  m.def("angular_kernel", &angular_kernel, py::arg("a"));
  m.def("groove_sum", &groove_sum, py::arg("kappa"), py::arg("grooves"),
        py::arg("pole_halfwidth") = 1e-8);
  m.def("spectral_moment", &spectral_moment, py::arg("transform"),
        py::arg("spec") = QuadratureSpec{});
  m.def("spectral_mean_omega", &spectral_mean_omega, py::arg("transform"),
        py::arg("spec") = QuadratureSpec{});
}

void export_decoherence(py::module_& m) {
  py::enum_<SpMode>(m, "SpMode")
      .value("approximate", SpMode::approximate)
      .value("full", SpMode::full);

  py::class_<WResult>(m, "WResult")
      .def_readonly("value", &WResult::value)
      .def_readonly("quadrature", &WResult::quadrature)
      .def_readonly("separation_window_ok", &WResult::separation_window_ok);

  py::class_<ValidityFlags>(m, "ValidityFlags")
      .def_readonly("proximity_height_ok", &ValidityFlags::proximity_height_ok)
      .def_readonly("proximity_depth_ok", &ValidityFlags::proximity_depth_ok)
      .def_readonly("separation_height_ok", &ValidityFlags::separation_height_ok)
      .def_readonly("separation_window_ok", &ValidityFlags::separation_window_ok)
      .def_readonly("subluminal_ok", &ValidityFlags::subluminal_ok)
      .def_readonly("v_y_small_ok", &ValidityFlags::v_y_small_ok);

  py::class_<DecoherenceBreakdown>(m, "DecoherenceBreakdown")
      .def_readonly("grooves", &DecoherenceBreakdown::grooves)
      .def_readonly("epsilon", &DecoherenceBreakdown::epsilon)
      .def_readonly("e2", &DecoherenceBreakdown::e2)
      .def_readonly("v_z", &DecoherenceBreakdown::v_z)
      .def_readonly("tau_z", &DecoherenceBreakdown::tau_z)
      .def_readonly("t_z", &DecoherenceBreakdown::t_z)
      .def_readonly("w_half_zz", &DecoherenceBreakdown::w_half_zz)
      .def_readonly("w_bb_zz", &DecoherenceBreakdown::w_bb_zz)
      .def_readonly("eta_closed", &DecoherenceBreakdown::eta_closed)
      .def_readonly("eta_timedomain", &DecoherenceBreakdown::eta_timedomain)
      .def_readonly("w_plane", &DecoherenceBreakdown::w_plane)
      .def_readonly("attenuation", &DecoherenceBreakdown::attenuation)
      .def_readonly("delta_w", &DecoherenceBreakdown::delta_w)
      .def_readonly("w_sp", &DecoherenceBreakdown::w_sp)
      .def_readonly("visibility", &DecoherenceBreakdown::visibility)
      .def_readonly("eta_over_2n_whalf", &DecoherenceBreakdown::eta_over_2n_whalf)
      .def_readonly("dropped_shift_scale", &DecoherenceBreakdown::dropped_shift_scale)
      .def_readonly("flags", &DecoherenceBreakdown::flags);

  m.def("w_half_zz", &w_half_zz, py::arg("transform"), py::arg("separation"),
        py::arg("epsilon"), py::arg("e2"), py::arg("spec") = QuadratureSpec{});
  m.def("w_bb_zz_full", &w_bb_zz_full, py::arg("transform"), py::arg("separation"),
        py::arg("epsilon"), py::arg("grooves"), py::arg("t_z"), py::arg("e2"),
        py::arg("spec") = QuadratureSpec{}, py::arg("v_y") = 0.0);
  m.def("eta_closed", &eta_closed, py::arg("grooves"), py::arg("depth"), py::arg("t_z"),
        py::arg("e2"));
  m.def("eta_alternating_sum", &eta_alternating_sum, py::arg("grooves"), py::arg("depth"),
        py::arg("t_z"), py::arg("e2"));
  m.def("eta_timedomain", &eta_timedomain, py::arg("profile"), py::arg("grooves"),
        py::arg("t_z"), py::arg("e2"));
  m.def("visibility", &visibility, py::arg("w"));
  m.def("w_sp", &w_sp, py::arg("grating"), py::arg("beam"), py::arg("w_plane") = 0.0,
        py::arg("mode") = SpMode::approximate, py::arg("attenuate") = false,
        py::arg("quad") = QuadratureSpec{}, py::arg("proximity_warn_ratio") = 0.2);
}

void export_oracle(py::module_& m) {
  py::class_<OracleResult>(m, "OracleResult")
      .def_readonly("estimate", &OracleResult::estimate)
      .def_readonly("std_error", &OracleResult::std_error)
      .def_readonly("samples_or_panels", &OracleResult::samples_or_panels)
      .def_readonly("seed", &OracleResult::seed)
      .def_readonly("tolerance_met", &OracleResult::tolerance_met);

  m.def("mc_w1osc", &mc_w1osc, py::arg("profile"), py::arg("separation"), py::arg("epsilon"),
        py::arg("e2"), py::arg("samples"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def("nested_w1osc", &nested_w1osc, py::arg("profile"), py::arg("separation"),
        py::arg("epsilon"), py::arg("e2"), py::arg("tol"),
        py::call_guard<py::gil_scoped_release>());
  m.def("brute_groove_phasor", &brute_groove_phasor, py::arg("kappa"), py::arg("grooves"));
  m.def("philox4x32", &philox4x32, py::arg("counter"), py::arg("key"));
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Decoherence from image-charge radiation over a conducting grating";
  m.attr("__version__") = kVersion;
  export_profiles(m);
  export_quadrature(m);
  export_decoherence(m);
  export_oracle(m);
}
