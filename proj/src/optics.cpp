#include "cespin/optics.hpp"

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "cespin/errors.hpp"

namespace cespin {

namespace {

void validate(const OpticalParams& p) {
    if (p.pump_rate < 0.0 || p.gamma <= 0.0 || p.branching <= 0.0 ||
        p.T1_us <= 0.0 || p.eps2 < 0.0 || p.eps2 > 1.0 || p.mw_rate < 0.0 ||
        p.collection <= 0.0)
        throw ConfigError("optical parameters outside validity range");
}

OpticalParams with_polarization(OpticalParams p, const PulseTrainProtocol& proto) {
    switch (proto.polarization) {
        case Polarization::sigma_plus: break;
        case Polarization::linear: p.eps2 = 0.5; break;
        case Polarization::elliptical: p.eps2 = proto.eps * proto.eps; break;
    }
    return p;
}

struct PumpChannels {
    double k1, k2; // pump rates out of g-down / g-up, leakage-mixed
    double f;      // ground-spin flip rate, each direction
};

PumpChannels channels(const OpticalParams& p) {
    validate(p);
    double inv_b = 1.0 / p.branching;
    return {p.pump_rate * ((1.0 - p.eps2) + p.eps2 * inv_b),
            p.pump_rate * (p.eps2 + (1.0 - p.eps2) * inv_b),
            0.5 / p.T1_us + p.mw_rate};
}

// Protocol photon bookkeeping with the 5d levels adiabatically slaved to
// the ground manifold (pulse slots resolve the spin pumping, not the
// optical cycle): a pumped spin returns to either ground state with equal
// weight, so the net cross-relaxation rates are k1/2 and k2/2, and the
// emitted flux equals the absorbed flux k1*g0 + k2*g1.  This keeps the
// per-slot trace free of the 1/gamma turn-on transient, so a sigma+ train
// decays monotonically from the very first pulse and a linear train is
// exactly flat.
std::pair<double, Eigen::Vector2d> ground_photons(const OpticalParams& p,
                                                  const Eigen::Vector2d& g,
                                                  double dt_us) {
    if (dt_us < 0.0) throw ConfigError("ground_photons: negative duration");
    auto [k1, k2, f] = channels(p);
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    A(0, 0) = -(0.5 * k1 + f);
    A(0, 1) = 0.5 * k2 + f;
    A(1, 0) = 0.5 * k1 + f;
    A(1, 1) = -(0.5 * k2 + f);
    A(2, 0) = p.collection * k1;
    A(2, 1) = p.collection * k2;
    Eigen::Matrix3d U = (A * dt_us).exp();
    Eigen::Vector3d v = U * Eigen::Vector3d(g[0], g[1], 0.0);
    return {v[2], Eigen::Vector2d(v[0], v[1])};
}

} // namespace

Populations thermal_populations() { return Populations(0.5, 0.5, 0.0, 0.0); }

Eigen::Matrix4d rate_matrix(const OpticalParams& p) {
    // Strong sigma+ channel g-down -> e-up; the cross channel is a factor
    // `branching` weaker; leaked opposite-helicity light (fraction eps2)
    // swaps the roles.
    auto [k1, k2, f] = channels(p);
    double hg = 0.5 * p.gamma;

    Eigen::Matrix4d G = Eigen::Matrix4d::Zero();
    G(0, 0) = -(k1 + f);
    G(1, 0) = f;
    G(3, 0) = k1;
    G(1, 1) = -(k2 + f);
    G(0, 1) = f;
    G(2, 1) = k2;
    G(2, 2) = -p.gamma;
    G(0, 2) = hg;
    G(1, 2) = hg;
    G(3, 3) = -p.gamma;
    G(0, 3) = hg;
    G(1, 3) = hg;
    return G;
}

Populations evolve_rates(const OpticalParams& p, Populations pop, double dt_us) {
    if (dt_us < 0.0) throw ConfigError("evolve_rates: negative duration");
    if (dt_us == 0.0) return pop;
    Eigen::Matrix4d U = (rate_matrix(p) * dt_us).exp();
    return U * pop;
}

Populations steady_state(const OpticalParams& p) {
    Eigen::Matrix4d G = rate_matrix(p);
    Eigen::FullPivLU<Eigen::Matrix4d> lu(G);
    lu.setThreshold(1e-12);
    Eigen::MatrixXd kernel = lu.kernel();
    if (kernel.cols() < 1)
        throw PhysicsError("rate matrix has no steady state");
    Populations s = kernel.col(0).cwiseAbs();
    double sum = s.sum();
    if (sum <= 0.0) throw PhysicsError("degenerate steady state");
    return s / sum;
}

double steady_state_fidelity(const OpticalParams& p) {
    Populations s = steady_state(p);
    return s[1] / (s[0] + s[1]);
}

double fluorescence_rate(const OpticalParams& p, const Populations& pop) {
    return p.collection * p.gamma * (pop[2] + pop[3]) * 1e6;
}

std::pair<double, Populations> emitted_photons(const OpticalParams& p,
                                               Populations pop, double dt_us) {
    if (dt_us < 0.0) throw ConfigError("emitted_photons: negative duration");
    if (dt_us == 0.0) return {0.0, pop};
    // Augment with a photon counter: dn/dt = collection * gamma * (p2 + p3).
    Eigen::Matrix<double, 5, 5> A = Eigen::Matrix<double, 5, 5>::Zero();
    A.topLeftCorner<4, 4>() = rate_matrix(p);
    A(4, 2) = p.collection * p.gamma;
    A(4, 3) = p.collection * p.gamma;
    Eigen::Matrix<double, 5, 5> U = (A * dt_us).exp();
    Eigen::Matrix<double, 5, 1> v;
    v << pop[0], pop[1], pop[2], pop[3], 0.0;
    v = U * v;
    return {v[4], Populations(v[0], v[1], v[2], v[3])};
}

FluorescenceTrace simulate_protocol(const PulseTrainProtocol& proto,
                                    OpticalParams params) {
    if (proto.pulses_per_train < 1 || proto.readout_pulses < 1 ||
        proto.gap_us < 0.0 || proto.pulse_period_us <= 0.0)
        throw ConfigError("invalid pulse-train protocol");
    params = with_polarization(params, proto);
    OpticalParams dark = params;
    dark.pump_rate = 0.0;

    FluorescenceTrace trace;
    Eigen::Vector2d g(0.5, 0.5); // thermal ground manifold
    double t = 0.0;
    auto run_train = [&](int slots) {
        for (int i = 0; i < slots; ++i) {
            auto [photons, next] = ground_photons(params, g, proto.pulse_period_us);
            trace.times.push_back(t + 0.5 * proto.pulse_period_us);
            trace.rate.push_back(photons / proto.pulse_period_us * 1e6);
            g = next;
            t += proto.pulse_period_us;
        }
    };
    run_train(proto.pulses_per_train);
    if (proto.gap_us > 0.0) {
        g = ground_photons(dark, g, proto.gap_us).second;
        t += proto.gap_us;
    }
    run_train(proto.pulses_per_train);
    return trace;
}

double initialization_contrast(const PulseTrainProtocol& proto,
                               OpticalParams params) {
    params = with_polarization(params, proto);
    // First-pulse vs asymptote estimator on absorbed (= re-emitted) flux:
    // the emission rate with the ground manifold still thermal, over the
    // steady-state emission rate.
    auto [k1, k2, f] = channels(params);
    (void)f;
    Populations th = thermal_populations();
    double first = k1 * th[0] + k2 * th[1];
    Populations s = steady_state(params);
    double steady = params.gamma * (s[2] + s[3]);
    if (steady <= 0.0)
        throw PhysicsError("initialization contrast undefined: dark steady state");
    return first / steady;
}

RecoveryCurve t1_protocol_curve(const std::vector<double>& gaps_us,
                                const PulseTrainProtocol& proto,
                                OpticalParams params) {
    params = with_polarization(params, proto);
    OpticalParams dark = params;
    dark.pump_rate = 0.0;

    // Polarize once; the initialized state is gap-independent.
    Eigen::Vector2d init(0.5, 0.5);
    init = ground_photons(params, init,
                          proto.pulses_per_train * proto.pulse_period_us)
               .second;

    RecoveryCurve curve;
    curve.gaps_us = gaps_us;
    for (double gap : gaps_us) {
        if (gap < 0.0) throw ConfigError("t1 protocol: negative gap");
        Eigen::Vector2d g = ground_photons(dark, init, gap).second;
        double photons = 0.0;
        for (int i = 0; i < proto.readout_pulses; ++i) {
            auto [n, next] = ground_photons(params, g, proto.pulse_period_us);
            photons += n;
            g = next;
        }
        curve.signal.push_back(photons);
    }
    return curve;
}

OdmrSpectrum odmr_sweep(const std::vector<double>& freqs_MHz, double nu0_MHz,
                        double fwhm_MHz, double w0, OpticalParams params) {
    if (fwhm_MHz <= 0.0) throw ConfigError("odmr_sweep: linewidth must be > 0");
    if (w0 < 0.0) throw ConfigError("odmr_sweep: drive must be >= 0");
    OdmrSpectrum spec;
    spec.freq_MHz = freqs_MHz;
    double hw = 0.5 * fwhm_MHz;
    for (double nu : freqs_MHz) {
        OpticalParams p = params;
        double d = nu - nu0_MHz;
        p.mw_rate = w0 * hw * hw / (d * d + hw * hw);
        spec.rate.push_back(fluorescence_rate(p, steady_state(p)));
    }
    return spec;
}

namespace {

// Gauss-Hermite nodes/weights by Golub-Welsch on the Jacobi matrix.
struct GaussHermite {
    Eigen::VectorXd nodes, weights;
    explicit GaussHermite(int n) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) {
            double b = std::sqrt(0.5 * i);
            J(i, i - 1) = b;
            J(i - 1, i) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        nodes = es.eigenvalues();
        weights.resize(n);
        for (int i = 0; i < n; ++i) {
            double v0 = es.eigenvectors()(0, i);
            weights[i] = std::sqrt(M_PI) * v0 * v0;
        }
    }
};

} // namespace

RabiTrace rabi_trace(double power, const std::vector<double>& durations_us,
                     double calibration_c, double sigma_delta_MHz,
                     const PulseTrainProtocol& readout, OpticalParams params) {
    if (power < 0.0) throw ConfigError("rabi_trace: power must be >= 0");
    double Omega = calibration_c * std::sqrt(power); // MHz

    params = with_polarization(params, readout);
    double p_dark = steady_state_fidelity(params);
    double p_bright0 = 1.0 - p_dark;

    // Readout photons are affine in the bright population; calibrate the two
    // coefficients once from the extremes.
    auto readout_photons = [&](double p_bright) {
        Eigen::Vector2d g(p_bright, 1.0 - p_bright);
        double photons = 0.0;
        for (int i = 0; i < readout.readout_pulses; ++i) {
            auto [n, next] = ground_photons(params, g, readout.pulse_period_us);
            photons += n;
            g = next;
        }
        return photons;
    };
    double s0 = readout_photons(0.0), s1 = readout_photons(1.0);

    static const GaussHermite gh(41);
    RabiTrace trace;
    trace.durations_us = durations_us;
    for (double d : durations_us) {
        if (d < 0.0) throw ConfigError("rabi_trace: negative duration");
        double flip = 0.0;
        if (sigma_delta_MHz <= 0.0) {
            double s = std::sin(M_PI * Omega * d);
            flip = s * s;
        } else {
            for (int i = 0; i < gh.nodes.size(); ++i) {
                double delta = std::sqrt(2.0) * sigma_delta_MHz * gh.nodes[i];
                double eff2 = Omega * Omega + delta * delta;
                double eff = std::sqrt(eff2);
                double s = eff > 0.0 ? std::sin(M_PI * eff * d) : 0.0;
                double f = eff2 > 0.0 ? (Omega * Omega / eff2) * s * s : 0.0;
                flip += gh.weights[i] * f;
            }
            flip /= std::sqrt(M_PI);
        }
        double p_bright = p_bright0 * (1.0 - flip) + p_dark * flip;
        trace.population.push_back(p_bright);
        trace.signal.push_back(s0 + (s1 - s0) * p_bright);
    }
    return trace;
}

std::vector<double> poisson_noisify(const std::vector<double>& y,
                                    double rel_sigma, std::uint64_t seed) {
    if (rel_sigma <= 0.0) return y;
    double ymax = 0.0;
    for (double v : y) {
        if (v < 0.0) throw PhysicsError("poisson_noisify: negative signal");
        ymax = std::max(ymax, v);
    }
    if (ymax == 0.0) return y;
    double lambda = 1.0 / (rel_sigma * rel_sigma); // mean counts at the maximum
    std::mt19937_64 rng(seed);
    std::vector<double> out;
    out.reserve(y.size());
    for (double v : y) {
        std::poisson_distribution<long> dist(lambda * v / ymax);
        out.push_back(static_cast<double>(dist(rng)) * ymax / lambda);
    }
    return out;
}

} // namespace cespin
