#include "cespin/noise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

#include "cespin/errors.hpp"
#include "cespin/fitting.hpp"

namespace cespin {

namespace {
constexpr double two_pi = 2.0 * M_PI;
}

double NoiseSpectrum::operator()(double omega) const {
    double w = std::abs(omega);
    double s = 0.0;
    if (model == Model::lorentzian || model == Model::sum)
        s += delta2 * tau_c / (M_PI * (1.0 + w * w * tau_c * tau_c));
    if (model == Model::hard_cutoff || model == Model::sum) {
        if (w <= omega_c)
            s += amplitude;
        else
            s += amplitude * std::pow(omega_c / w, rolloff_p);
    }
    return s;
}

NoiseSpectrum NoiseSpectrum::lorentzian(double delta2, double tau_c) {
    if (delta2 < 0.0 || tau_c <= 0.0)
        throw ConfigError("Lorentzian spectrum needs delta2 >= 0 and tau_c > 0");
    NoiseSpectrum s;
    s.model = Model::lorentzian;
    s.delta2 = delta2;
    s.tau_c = tau_c;
    return s;
}

NoiseSpectrum NoiseSpectrum::hard_cutoff(double A, double omega_c, double p) {
    if (A < 0.0 || omega_c <= 0.0 || p <= 0.0)
        throw ConfigError("hard-cutoff spectrum needs A >= 0, omega_c, p > 0");
    NoiseSpectrum s;
    s.model = Model::hard_cutoff;
    s.amplitude = A;
    s.omega_c = omega_c;
    s.rolloff_p = p;
    return s;
}

double filter_function(const PulseSequence& seq, double omega, double t) {
    if (t <= 0.0) throw PhysicsError("filter_function: t must be > 0");
    auto bounds = seq.boundaries(t);
    std::complex<double> acc(0, 0);
    double sign = 1.0;
    for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
        std::complex<double> e1(std::cos(omega * bounds[j + 1]),
                                std::sin(omega * bounds[j + 1]));
        std::complex<double> e0(std::cos(omega * bounds[j]),
                                std::sin(omega * bounds[j]));
        acc += sign * (e1 - e0);
        sign = -sign;
    }
    return std::norm(acc);
}

double filter_ramsey_analytic(double omega, double t) {
    double s = std::sin(0.5 * omega * t);
    return 4.0 * s * s;
}

double filter_hahn_analytic(double omega, double t) {
    double s = std::sin(0.25 * omega * t);
    double s2 = s * s;
    return 16.0 * s2 * s2;
}

namespace {

// Adaptive Simpson on [a, b] for a smooth-per-panel integrand.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double tol,
                        int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0) return left + right + delta / 15.0;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

} // namespace

double chi_integral(const NoiseSpectrum& S, const PulseSequence& seq, double t,
                    const QuadratureOptions& opts) {
    if (t <= 0.0) throw PhysicsError("chi_integral: t must be > 0");

    // F(w->0)/w^2 = |y-hat(0)|^2: t^2 for free evolution, 0 for any balanced
    // echo (equal +/- segment time).
    const double zero_limit =
        (seq.kind == SequenceKind::ramsey) ? S(0.0) * t * t : 0.0;
    auto integrand = [&](double w) -> double {
        if (w == 0.0) return zero_limit;
        return S(w) * filter_function(seq, w, t) / (w * w);
    };

    int n_pulses = std::max(seq.n_pulses, 0);
    double passband = M_PI * std::max(n_pulses, 1) / t;
    double knee = 0.0;
    if (S.model != NoiseSpectrum::Model::hard_cutoff && S.tau_c > 0.0)
        knee = std::max(knee, 1.0 / S.tau_c);
    if (S.model != NoiseSpectrum::Model::lorentzian)
        knee = std::max(knee, S.omega_c);
    double omega_max = opts.omega_max_factor * std::max(passband, knee);

    // Panels no wider than a quarter oscillation of the fastest phase factor
    // e^{i w t}; Simpson converges fast inside each.
    double panel = std::min(0.5 * M_PI / t, omega_max / 16.0);
    double total = 0.0;
    // First, a crude scale estimate for the absolute tolerance.
    double scale = 0.0;
    for (double w = 0.5 * panel; w < omega_max; w += 8.0 * panel)
        scale = std::max(scale, std::abs(integrand(w)) * omega_max);
    double tol = std::max(scale, 1e-300) * opts.rel_tol * 0.02;

    double a = 0.0;
    double fa = integrand(a);
    int n_panels = static_cast<int>(std::ceil(omega_max / panel));
    double spacing = omega_max / n_panels;
    for (int i = 0; i < n_panels; ++i) {
        double b = (i + 1) * spacing;
        double m = a + 0.5 * spacing;
        double fb = integrand(b), fm = integrand(m);
        total += adaptive_simpson(integrand, a, b, fa, fm, fb,
                                  tol * spacing / omega_max, 24);
        a = b;
        fa = fb;
    }
    if (!std::isfinite(total))
        throw PhysicsError("chi quadrature failed to converge");
    return total;
}

SpectrumCoherence coherence_from_spectrum(const NoiseSpectrum& S,
                                          SequenceKind kind, int N,
                                          const std::vector<double>& times,
                                          const QuadratureOptions& opts) {
    SpectrumCoherence out;
    out.times = times;
    out.W.resize(times.size());
    out.chi.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0)
            throw PhysicsError("coherence_from_spectrum: negative time");
        if (times[i] == 0.0) {
            out.chi[i] = 0.0;
            out.W[i] = 1.0;
            continue;
        }
        PulseSequence seq = build_sequence(kind, std::max(N, 1), times[i]);
        out.chi[i] = chi_integral(S, seq, times[i], opts);
        out.W[i] = std::exp(-out.chi[i]);
    }
    return out;
}

double t2_from_spectrum(const NoiseSpectrum& S, SequenceKind kind, int N,
                        double t_lo, double t_hi,
                        const QuadratureOptions& opts) {
    auto chi_at = [&](double t) {
        PulseSequence seq = build_sequence(kind, std::max(N, 1), t);
        return chi_integral(S, seq, t, opts);
    };
    // chi grows with t, so expand a geometric bracket outward from a
    // mid-scale probe instead of evaluating the far ends: the quadrature
    // resolves the e^{i w t} oscillation, so its panel count at a fixed
    // spectral knee grows linearly with t.
    double lo = t_lo, hi = t_hi;
    double probe = std::min(std::max(1.0, t_lo), t_hi);
    if (chi_at(probe) < 1.0) {
        lo = probe;
        for (;;) {
            if (lo >= t_hi)
                throw PhysicsError("t2_from_spectrum: W(t) does not cross 1/e "
                                   "inside the search bracket");
            double next = std::min(4.0 * lo, t_hi);
            if (chi_at(next) >= 1.0) {
                hi = next;
                break;
            }
            lo = next;
        }
    } else {
        hi = probe;
        for (;;) {
            if (hi <= t_lo)
                throw PhysicsError("t2_from_spectrum: W(t) does not cross 1/e "
                                   "inside the search bracket");
            double next = std::max(0.25 * hi, t_lo);
            if (chi_at(next) < 1.0) {
                lo = next;
                break;
            }
            hi = next;
        }
    }
    while (hi / lo > 1.0 + 1e-3) {
        double mid = std::sqrt(lo * hi);
        if (chi_at(mid) < 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo * hi);
}

ScalingScan scaling_exponent_scan(const NoiseSpectrum& S,
                                  const std::vector<int>& N_list,
                                  const QuadratureOptions& opts) {
    if (N_list.size() < 2)
        throw ConfigError("scaling_exponent_scan: need at least 2 N values");
    ScalingScan scan;
    scan.N = N_list;
    std::vector<double> xs, ys;
    for (int N : N_list) {
        if (N < 1) throw ConfigError("scaling_exponent_scan: N must be >= 1");
        double T2 = t2_from_spectrum(S, SequenceKind::cpmg, N, 1e-4, 1e6, opts);
        scan.T2.push_back(T2);
        xs.push_back(static_cast<double>(N));
        ys.push_back(T2);
    }
    PowerLawFit fit = fit_power_law(xs, ys);
    scan.alpha = fit.exponent;
    scan.prefactor = fit.prefactor;
    return scan;
}

double chi_ou_ramsey(double delta2, double tau_c, double t) {
    double x = t / tau_c;
    return delta2 * tau_c * tau_c * (std::exp(-x) + x - 1.0);
}

double chi_ou_hahn(double delta2, double tau_c, double t) {
    double x = t / tau_c;
    return delta2 * tau_c * tau_c *
           (x - 3.0 - std::exp(-x) + 4.0 * std::exp(-0.5 * x));
}

} // namespace cespin
