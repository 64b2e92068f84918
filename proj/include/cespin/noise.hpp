#pragma once

#include <string>
#include <vector>

#include "cespin/pulse.hpp"

namespace cespin {

// Semiclassical Gaussian dephasing: W(t) = exp(-chi(t)),
//   chi(t) = integral_0^inf S(omega) F(omega, t) / omega^2 domega,
// omega angular (rad/us), S one-sided (rad^2/us^2 per rad/us).  With this
// convention the Lorentzian spectrum below is exactly the PSD of
// Ornstein-Uhlenbeck frequency noise with autocorrelation
// Delta^2 exp(-|t|/tau_c), so the free-evolution decay rate in the
// motional-narrowed limit is Delta^2 tau_c.

struct NoiseSpectrum {
    enum class Model { lorentzian, hard_cutoff, sum };
    Model model = Model::lorentzian;
    // Lorentzian S = Delta^2 tau_c / (pi (1 + omega^2 tau_c^2))
    double delta2 = 0.0;  // rad^2/us^2
    double tau_c = 0.0;   // us
    // hard cutoff: S = A for |omega| <= omega_c, A (omega_c/|omega|)^p beyond
    double amplitude = 0.0; // A, rad/us units matching S
    double omega_c = 0.0;   // rad/us
    double rolloff_p = 6.0;

    double operator()(double omega) const;
    static NoiseSpectrum lorentzian(double delta2, double tau_c);
    static NoiseSpectrum hard_cutoff(double A, double omega_c, double p);
};

// |sum_j (-1)^j (e^{i omega t_{j+1}} - e^{i omega t_j})|^2 over the
// sign-switching segment boundaries of the sequence rescaled to total time t.
double filter_function(const PulseSequence& seq, double omega, double t);

// Closed forms, used as oracles: ramsey F = 4 sin^2(wt/2),
// hahn F = 16 sin^4(wt/4).
double filter_ramsey_analytic(double omega, double t);
double filter_hahn_analytic(double omega, double t);

struct QuadratureOptions {
    double rel_tol = 1e-6;
    double omega_max_factor = 100.0; // omega_max >= factor * max(piN/t, knee)
};

// Adaptive quadrature of S F / omega^2 with oscillation-aware panel widths.
// Throws PhysicsError if the requested tolerance is not achieved.
double chi_integral(const NoiseSpectrum& S, const PulseSequence& seq, double t,
                    const QuadratureOptions& opts = {});

struct SpectrumCoherence {
    std::vector<double> times;
    std::vector<double> W;    // exp(-chi)
    std::vector<double> chi;
};

SpectrumCoherence coherence_from_spectrum(const NoiseSpectrum& S,
                                          SequenceKind kind, int N,
                                          const std::vector<double>& times,
                                          const QuadratureOptions& opts = {});

// T2 with W(T2) = 1/e by log-domain bisection, relative tolerance 1e-3.
// Throws PhysicsError if W never crosses 1/e inside the bracket.
double t2_from_spectrum(const NoiseSpectrum& S, SequenceKind kind, int N,
                        double t_lo = 1e-4, double t_hi = 1e6,
                        const QuadratureOptions& opts = {});

struct ScalingScan {
    std::vector<int> N;
    std::vector<double> T2;
    double alpha = 0.0;     // log-log least-squares slope
    double prefactor = 0.0;
};

// Per-N CPMG T2 plus the fitted power-law exponent.  Requires >= 2 entries.
ScalingScan scaling_exponent_scan(const NoiseSpectrum& S,
                                  const std::vector<int>& N_list,
                                  const QuadratureOptions& opts = {});

// Ornstein-Uhlenbeck closed forms (test oracles), same conventions:
//   ramsey: chi = Delta^2 tau_c^2 (e^{-x} + x - 1),            x = t/tau_c
//   hahn:   chi = Delta^2 tau_c^2 (x - 3 - e^{-x} + 4 e^{-x/2})
double chi_ou_ramsey(double delta2, double tau_c, double t);
double chi_ou_hahn(double delta2, double tau_c, double t);

} // namespace cespin
