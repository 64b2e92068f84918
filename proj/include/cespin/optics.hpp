#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace cespin {

// Four-level optical cycle {4f-down, 4f-up, 5d-down, 5d-up} with populations
// indexed in that order.  sigma+ pumping drives 4f-down -> 5d-up strongly and
// the cross channel 4f-up -> 5d-down a factor `branching` weaker; a leakage
// fraction eps2 of the pump power drives the opposite circular selection
// rules.  Radiative decay feeds both ground sublevels equally.
struct OpticalParams {
    double pump_rate = 0.5;        // R, 1/us, strong-channel rate at eps2 = 0
    double branching = 396.0;      // strong:weak transition-strength ratio
    double gamma = 1.0 / 0.065;    // radiative rate, 1/us (65 ns lifetime)
    double T1_us = 3.8e3;          // ground-state spin-lattice time
    double eps2 = 0.0;             // ellipticity leakage fraction in [0, 1]
    double collection = 8.45e-3;   // detected fraction of emitted photons
    double mw_rate = 0.0;          // incoherent ground-spin drive, 1/us
};

using Populations = Eigen::Vector4d;

Populations thermal_populations();

// Generator G of dp/dt = G p for the current parameters (columns sum to 0).
Eigen::Matrix4d rate_matrix(const OpticalParams& p);

// Closed-form propagation by matrix exponential; populations stay a
// probability vector.
Populations evolve_rates(const OpticalParams& p, Populations pop, double dt_us);

// Steady state of the rate matrix (kernel of G), normalized.
Populations steady_state(const OpticalParams& p);

// Ground-spin initialization fidelity p_up / (p_up + p_down) of the steady
// state; 396/(396+1) for ideal sigma+.
double steady_state_fidelity(const OpticalParams& p);

// Detected photon rate (photons/s) for a population vector.
double fluorescence_rate(const OpticalParams& p, const Populations& pop);

// Expected detected photons emitted during dt, plus the evolved populations
// (joint closed form via an augmented 5x5 exponential).
std::pair<double, Populations> emitted_photons(const OpticalParams& p,
                                               Populations pop, double dt_us);

enum class Polarization { sigma_plus, linear, elliptical };

struct PulseTrainProtocol {
    int pulses_per_train = 100;
    double pulse_period_us = 0.1;  // one coarse-grained pump slot
    double gap_us = 0.0;           // dark interval between trains
    int readout_pulses = 5;
    Polarization polarization = Polarization::sigma_plus;
    double eps = 0.0;              // used when polarization == elliptical
};

struct FluorescenceTrace {
    std::vector<double> times;   // us, slot centers
    std::vector<double> rate;    // detected photons/s, per-slot average
};

// Fluorescence during {train, gap, train}: initialization dynamics from a
// thermal start.  The trace is the per-slot photon expectation divided by
// the slot duration.
FluorescenceTrace simulate_protocol(const PulseTrainProtocol& proto,
                                    OpticalParams params);

// Initialization contrast: first-slot over asymptotic (documented estimator).
double initialization_contrast(const PulseTrainProtocol& proto,
                               OpticalParams params);

// T1 protocol: polarize with one train, wait `gap`, read out with the first
// `readout_pulses` slots of a second train; signal = photons detected during
// readout.  Returns (gap, signal) pairs; shape offset + A(1 - exp(-gap/T1)).
struct RecoveryCurve {
    std::vector<double> gaps_us;
    std::vector<double> signal;
};
RecoveryCurve t1_protocol_curve(const std::vector<double>& gaps_us,
                                const PulseTrainProtocol& proto,
                                OpticalParams params);

// ODMR: steady-state fluorescence vs MW frequency; the drive enters as an
// incoherent ground-spin flip rate w(nu) = w0 * (G/2)^2/((nu-nu0)^2+(G/2)^2).
struct OdmrSpectrum {
    std::vector<double> freq_MHz;
    std::vector<double> rate;    // photons/s
};
OdmrSpectrum odmr_sweep(const std::vector<double>& freqs_MHz, double nu0_MHz,
                        double fwhm_MHz, double w0, OpticalParams params);

// Rabi oscillation with optical readout: bright-state population after
// driving for `dur` at Rabi frequency Omega = c sqrt(P), averaged over a
// Gaussian detuning distribution of width sigma_delta (MHz), then mapped to
// photons via the readout train (affine in the bright population).
struct RabiTrace {
    std::vector<double> durations_us;
    std::vector<double> signal;        // readout photons
    std::vector<double> population;    // averaged bright-state population
};
RabiTrace rabi_trace(double power, const std::vector<double>& durations_us,
                     double calibration_c, double sigma_delta_MHz,
                     const PulseTrainProtocol& readout, OpticalParams params);

// Deterministic Poisson noise injection for fitter robustness tests:
// y -> Poisson(lambda * y / max y) * max y / lambda, relative sigma at the
// maximum = 1/sqrt(lambda).
std::vector<double> poisson_noisify(const std::vector<double>& y,
                                    double rel_sigma, std::uint64_t seed);

} // namespace cespin
