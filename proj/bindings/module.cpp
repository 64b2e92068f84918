#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cespin/cce.hpp"
#include "cespin/config.hpp"
#include "cespin/constants.hpp"
#include "cespin/crystal.hpp"
#include "cespin/errors.hpp"
#include "cespin/fitting.hpp"
#include "cespin/noise.hpp"
#include "cespin/optics.hpp"
#include "cespin/output.hpp"
#include "cespin/pulse.hpp"
#include "cespin/spin_hamiltonian.hpp"

namespace py = pybind11;
using namespace cespin;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Central-spin coherence and optical-pumping toolkit";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<PhysicsError>(m, "PhysicsError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_IOError);

    auto c = m.def_submodule("constants");
    c.attr("mu_B_over_h") = constants::mu_B_over_h;
    c.attr("mu_N_over_h") = constants::mu_N_over_h;
    c.attr("dipolar_prefactor") = constants::dipolar_prefactor;
    c.attr("g_electron") = constants::g_electron;

    py::enum_<SiteClass>(m, "SiteClass")
        .value("octahedral", SiteClass::octahedral)
        .value("tetrahedral", SiteClass::tetrahedral)
        .value("dodecahedral", SiteClass::dodecahedral);

    py::class_<SpinSpecies>(m, "SpinSpecies")
        .def_readonly("name", &SpinSpecies::name)
        .def_readonly("spin", &SpinSpecies::spin)
        .def_readonly("gyromagnetic", &SpinSpecies::gyromagnetic)
        .def_readonly("abundance", &SpinSpecies::abundance)
        .def("multiplicity", &SpinSpecies::multiplicity);

    py::class_<CrystalSpec>(m, "CrystalSpec")
        .def_readonly("a_nm", &CrystalSpec::a_nm)
        .def_readonly("species", &CrystalSpec::species)
        .def_readonly("site_g", &CrystalSpec::site_g)
        .def("cell_volume", &CrystalSpec::cell_volume)
        .def("n_sites",
             [](const CrystalSpec& s) { return s.sites.size(); });

    py::class_<BathSpin>(m, "BathSpin")
        .def_readonly("position", &BathSpin::position)
        .def_readonly("species", &BathSpin::species)
        .def_readonly("site_class", &BathSpin::site_class)
        .def_readonly("distance", &BathSpin::distance);

    py::class_<BathConfiguration>(m, "BathConfiguration")
        .def_readonly("central_position", &BathConfiguration::central_position)
        .def_readonly("spins", &BathConfiguration::spins)
        .def_readonly("cutoff_radius", &BathConfiguration::cutoff_radius)
        .def("__len__",
             [](const BathConfiguration& b) { return b.spins.size(); });

    m.def("load_crystal_spec", &load_crystal_spec, py::arg("path"));
    m.def("default_central_position", &default_central_position, py::arg("spec"));
    m.def("generate_bath", &generate_bath, py::arg("spec"), py::arg("center"),
          py::arg("cutoff"), py::arg("species_filter"),
          py::arg("exclude_classes") = std::vector<SiteClass>{});

    py::class_<SiteFrameSet>(m, "SiteFrameSet")
        .def_property_readonly("effective_g",
                               [](const SiteFrameSet& f) {
                                   return std::vector<double>(
                                       f.effective_g.begin(), f.effective_g.end());
                               })
        .def("resonance_MHz",
             [](const SiteFrameSet& f, double field_mT) {
                 auto r = f.resonance_MHz(field_mT);
                 return std::vector<double>(r.begin(), r.end());
             },
             py::arg("field_mT"));
    m.def("site_frames", &site_frames, py::arg("spec"),
          py::arg("lab_field_direction"));

    py::enum_<SequenceKind>(m, "SequenceKind")
        .value("ramsey", SequenceKind::ramsey)
        .value("hahn", SequenceKind::hahn)
        .value("cpmg", SequenceKind::cpmg);

    py::class_<PulseSequence>(m, "PulseSequence")
        .def_readonly("kind", &PulseSequence::kind)
        .def_readonly("n_pulses", &PulseSequence::n_pulses)
        .def_readonly("fractions", &PulseSequence::fractions)
        .def("pulse_times", &PulseSequence::pulse_times)
        .def("boundaries", &PulseSequence::boundaries, py::arg("t"));
    m.def("build_sequence", &build_sequence, py::arg("kind"), py::arg("N"),
          py::arg("total_time"));

    py::class_<CentralSpinParams>(m, "CentralSpinParams")
        .def_readonly("effective_g", &CentralSpinParams::effective_g)
        .def_readonly("field", &CentralSpinParams::field)
        .def_readonly("frame", &CentralSpinParams::frame);
    m.def("make_central_spin", &make_central_spin, py::arg("g"),
          py::arg("field_mT"));
    m.def("electron_splitting", &electron_splitting, py::arg("g"),
          py::arg("field_mT"));
    m.def("dipolar_tensor", &dipolar_tensor, py::arg("r_nm"), py::arg("gbar1"),
          py::arg("gbar2"));

    py::class_<SpinSystem>(m, "SpinSystem")
        .def_readonly("larmor", &SpinSystem::larmor)
        .def_readonly("secular_rows", &SpinSystem::secular_rows)
        .def_readwrite("quadrupole_MHz", &SpinSystem::quadrupole_MHz)
        .def_readonly("dimension_cap", &SpinSystem::dimension_cap);

    // keep_alive ties the crystal spec to the system (it holds a pointer).
    m.def("make_spin_system", &make_spin_system, py::arg("spec"),
          py::arg("central"), py::arg("bath"), py::arg("dimension_cap") = 1296,
          py::keep_alive<0, 1>());

    py::class_<CoherenceCurve>(m, "CoherenceCurve")
        .def_readonly("times", &CoherenceCurve::times)
        .def_readonly("values", &CoherenceCurve::values)
        .def_readonly("metadata", &CoherenceCurve::metadata);

    py::class_<CceOptions>(m, "CceOptions")
        .def(py::init<>())
        .def_readwrite("order", &CceOptions::order)
        .def_readwrite("pair_cutoff", &CceOptions::pair_cutoff)
        .def_readwrite("workers", &CceOptions::workers)
        .def_readwrite("dump_clusters", &CceOptions::dump_clusters)
        .def_readwrite("tilde_guard", &CceOptions::tilde_guard);

    py::class_<ClusterSet>(m, "ClusterSet")
        .def_readonly("singles", &ClusterSet::singles)
        .def_readonly("pairs", &ClusterSet::pairs)
        .def("total", &ClusterSet::total);

    py::class_<CceResult>(m, "CceResult")
        .def_readonly("curve", &CceResult::curve)
        .def_readonly("clusters", &CceResult::clusters)
        .def_readonly("guard_activations", &CceResult::guard_activations);

    m.def("enumerate_clusters", &enumerate_clusters, py::arg("bath"),
          py::arg("order"), py::arg("pair_cutoff"));
    m.def("cluster_signal", &cluster_signal, py::arg("cluster"),
          py::arg("system"), py::arg("sequence"), py::arg("times"));
    m.def("pair_echo_analytic", &pair_echo_analytic, py::arg("A1"),
          py::arg("A2"), py::arg("b"), py::arg("tau"));
    m.def("compute_coherence", &compute_coherence, py::arg("system"),
          py::arg("sequence"), py::arg("times"), py::arg("options"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<NoiseSpectrum>(m, "NoiseSpectrum")
        .def_static("lorentzian", &NoiseSpectrum::lorentzian, py::arg("delta2"),
                    py::arg("tau_c"))
        .def_static("hard_cutoff", &NoiseSpectrum::hard_cutoff, py::arg("A"),
                    py::arg("omega_c"), py::arg("p") = 6.0)
        .def("__call__", &NoiseSpectrum::operator(), py::arg("omega"));

    py::class_<SpectrumCoherence>(m, "SpectrumCoherence")
        .def_readonly("times", &SpectrumCoherence::times)
        .def_readonly("W", &SpectrumCoherence::W)
        .def_readonly("chi", &SpectrumCoherence::chi);

    py::class_<ScalingScan>(m, "ScalingScan")
        .def_readonly("N", &ScalingScan::N)
        .def_readonly("T2", &ScalingScan::T2)
        .def_readonly("alpha", &ScalingScan::alpha)
        .def_readonly("prefactor", &ScalingScan::prefactor);

    py::class_<QuadratureOptions>(m, "QuadratureOptions")
        .def(py::init<>())
        .def_readwrite("rel_tol", &QuadratureOptions::rel_tol)
        .def_readwrite("omega_max_factor", &QuadratureOptions::omega_max_factor);

    m.def("filter_function", &filter_function, py::arg("sequence"),
          py::arg("omega"), py::arg("t"));
    m.def("chi_integral", &chi_integral, py::arg("spectrum"),
          py::arg("sequence"), py::arg("t"),
          py::arg("options") = QuadratureOptions{});
    m.def(
        "coherence_from_spectrum",
        [](const NoiseSpectrum& S, SequenceKind kind, int N,
           const std::vector<double>& times) {
            return coherence_from_spectrum(S, kind, N, times);
        },
        py::arg("spectrum"), py::arg("kind"), py::arg("N"), py::arg("times"));
    m.def(
        "t2_from_spectrum",
        [](const NoiseSpectrum& S, SequenceKind kind, int N) {
            return t2_from_spectrum(S, kind, N);
        },
        py::arg("spectrum"), py::arg("kind"), py::arg("N"));
    m.def(
        "scaling_exponent_scan",
        [](const NoiseSpectrum& S, const std::vector<int>& N_list) {
            return scaling_exponent_scan(S, N_list);
        },
        py::arg("spectrum"), py::arg("N_list"),
        py::call_guard<py::gil_scoped_release>());
    m.def("chi_ou_ramsey", &chi_ou_ramsey, py::arg("delta2"), py::arg("tau_c"),
          py::arg("t"));
    m.def("chi_ou_hahn", &chi_ou_hahn, py::arg("delta2"), py::arg("tau_c"),
          py::arg("t"));

    py::class_<OpticalParams>(m, "OpticalParams")
        .def(py::init<>())
        .def_readwrite("pump_rate", &OpticalParams::pump_rate)
        .def_readwrite("branching", &OpticalParams::branching)
        .def_readwrite("gamma", &OpticalParams::gamma)
        .def_readwrite("T1_us", &OpticalParams::T1_us)
        .def_readwrite("eps2", &OpticalParams::eps2)
        .def_readwrite("collection", &OpticalParams::collection)
        .def_readwrite("mw_rate", &OpticalParams::mw_rate);

    py::enum_<Polarization>(m, "Polarization")
        .value("sigma_plus", Polarization::sigma_plus)
        .value("linear", Polarization::linear)
        .value("elliptical", Polarization::elliptical);

    py::class_<PulseTrainProtocol>(m, "PulseTrainProtocol")
        .def(py::init<>())
        .def_readwrite("pulses_per_train", &PulseTrainProtocol::pulses_per_train)
        .def_readwrite("pulse_period_us", &PulseTrainProtocol::pulse_period_us)
        .def_readwrite("gap_us", &PulseTrainProtocol::gap_us)
        .def_readwrite("readout_pulses", &PulseTrainProtocol::readout_pulses)
        .def_readwrite("polarization", &PulseTrainProtocol::polarization)
        .def_readwrite("eps", &PulseTrainProtocol::eps);

    py::class_<FluorescenceTrace>(m, "FluorescenceTrace")
        .def_readonly("times", &FluorescenceTrace::times)
        .def_readonly("rate", &FluorescenceTrace::rate);

    py::class_<RecoveryCurve>(m, "RecoveryCurve")
        .def_readonly("gaps_us", &RecoveryCurve::gaps_us)
        .def_readonly("signal", &RecoveryCurve::signal);

    py::class_<OdmrSpectrum>(m, "OdmrSpectrum")
        .def_readonly("freq_MHz", &OdmrSpectrum::freq_MHz)
        .def_readonly("rate", &OdmrSpectrum::rate);

    py::class_<RabiTrace>(m, "RabiTrace")
        .def_readonly("durations_us", &RabiTrace::durations_us)
        .def_readonly("signal", &RabiTrace::signal)
        .def_readonly("population", &RabiTrace::population);

    m.def("thermal_populations", &thermal_populations);
    m.def("rate_matrix", &rate_matrix, py::arg("params"));
    m.def("evolve_rates", &evolve_rates, py::arg("params"), py::arg("pop"),
          py::arg("dt_us"));
    m.def("steady_state", &steady_state, py::arg("params"));
    m.def("steady_state_fidelity", &steady_state_fidelity, py::arg("params"));
    m.def("fluorescence_rate", &fluorescence_rate, py::arg("params"),
          py::arg("pop"));
    m.def("emitted_photons", &emitted_photons, py::arg("params"), py::arg("pop"),
          py::arg("dt_us"));
    m.def("simulate_protocol", &simulate_protocol, py::arg("protocol"),
          py::arg("params"));
    m.def("initialization_contrast", &initialization_contrast,
          py::arg("protocol"), py::arg("params"));
    m.def("t1_protocol_curve", &t1_protocol_curve, py::arg("gaps_us"),
          py::arg("protocol"), py::arg("params"));
    m.def("odmr_sweep", &odmr_sweep, py::arg("freqs_MHz"), py::arg("nu0_MHz"),
          py::arg("fwhm_MHz"), py::arg("w0"), py::arg("params"));
    m.def("rabi_trace", &rabi_trace, py::arg("power"), py::arg("durations_us"),
          py::arg("calibration_c"), py::arg("sigma_delta_MHz"),
          py::arg("readout"), py::arg("params"));
    m.def("poisson_noisify", &poisson_noisify, py::arg("y"),
          py::arg("rel_sigma"), py::arg("seed"));

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("names", &FitResult::names)
        .def_readonly("params", &FitResult::params)
        .def_readonly("residual_norm", &FitResult::residual_norm)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("iterations", &FitResult::iterations)
        .def_readonly("covariance", &FitResult::covariance)
        .def_readonly("ill_conditioned", &FitResult::ill_conditioned);

    py::class_<StretchedFit>(m, "StretchedFit")
        .def_readonly("T2", &StretchedFit::T2)
        .def_readonly("k", &StretchedFit::k)
        .def_readonly("amplitude", &StretchedFit::amplitude)
        .def_readonly("detail", &StretchedFit::detail);
    py::class_<PowerLawFit>(m, "PowerLawFit")
        .def_readonly("exponent", &PowerLawFit::exponent)
        .def_readonly("prefactor", &PowerLawFit::prefactor)
        .def_readonly("residual_norm", &PowerLawFit::residual_norm);
    py::class_<LorentzianFit>(m, "LorentzianFit")
        .def_readonly("center", &LorentzianFit::center)
        .def_readonly("fwhm", &LorentzianFit::fwhm)
        .def_readonly("height", &LorentzianFit::height)
        .def_readonly("baseline", &LorentzianFit::baseline)
        .def_readonly("detail", &LorentzianFit::detail);
    py::class_<RecoveryFit>(m, "RecoveryFit")
        .def_readonly("T1", &RecoveryFit::T1)
        .def_readonly("amplitude", &RecoveryFit::amplitude)
        .def_readonly("offset", &RecoveryFit::offset)
        .def_readonly("detail", &RecoveryFit::detail);
    py::class_<DampedCosineFit>(m, "DampedCosineFit")
        .def_readonly("frequency", &DampedCosineFit::frequency)
        .def_readonly("tau", &DampedCosineFit::tau)
        .def_readonly("amplitude", &DampedCosineFit::amplitude)
        .def_readonly("offset", &DampedCosineFit::offset)
        .def_readonly("phase", &DampedCosineFit::phase)
        .def_readonly("detail", &DampedCosineFit::detail);

    m.def("fit_stretched_exponential", &fit_stretched_exponential, py::arg("t"),
          py::arg("y"));
    m.def("fit_power_law", &fit_power_law, py::arg("x"), py::arg("y"));
    m.def("fit_lorentzian", &fit_lorentzian, py::arg("x"), py::arg("y"));
    m.def("fit_exponential_recovery", &fit_exponential_recovery, py::arg("t"),
          py::arg("y"));
    m.def("fit_damped_cosine", &fit_damped_cosine, py::arg("t"), py::arg("y"));
    m.def("one_over_e_time", &one_over_e_time, py::arg("t"), py::arg("y"));
}
