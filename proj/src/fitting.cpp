#include "cespin/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cespin/errors.hpp"

namespace cespin {

namespace {

Eigen::VectorXd clamp_to_bounds(Eigen::VectorXd theta, const FitOptions& opts) {
    if (opts.lower.size() == theta.size())
        theta = theta.cwiseMax(opts.lower);
    if (opts.upper.size() == theta.size())
        theta = theta.cwiseMin(opts.upper);
    return theta;
}

double sum_sq_residual(const Eigen::VectorXd& f, const std::vector<double>& y) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        double r = f[i] - y[static_cast<std::size_t>(i)];
        s += r * r;
    }
    return s;
}

// First downward crossing of `level`, linearly interpolated; negative if the
// curve stays above it.
double first_crossing(const std::vector<double>& t, const std::vector<double>& y,
                      double level) {
    for (std::size_t i = 1; i < y.size(); ++i) {
        if (y[i] <= level && y[i - 1] > level) {
            double w = (y[i - 1] - level) / (y[i - 1] - y[i]);
            return t[i - 1] + w * (t[i] - t[i - 1]);
        }
    }
    return -1.0;
}

} // namespace

FitResult nlls_fit(const FitModel& model, const std::vector<double>& x,
                   const std::vector<double>& y, Eigen::VectorXd theta0,
                   const FitOptions& opts) {
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    const Eigen::Index p = theta0.size();
    if (x.size() != y.size()) throw ConfigError("fit: x/y length mismatch");
    if (n < p) throw ConfigError("fit: fewer points than parameters");
    if (p != static_cast<Eigen::Index>(model.names.size()))
        throw ConfigError("fit: parameter count does not match model");

    Eigen::VectorXd theta = clamp_to_bounds(std::move(theta0), opts);
    Eigen::VectorXd f(n);
    Eigen::MatrixXd J(n, p);
    model.eval(theta, x, f, J);
    double ssr = sum_sq_residual(f, y);
    if (!std::isfinite(ssr)) throw PhysicsError("fit: non-finite residual at start");

    FitResult result;
    result.names = model.names;
    double lambda = opts.lambda0;

    for (int iter = 0; iter < opts.max_iterations && !result.converged; ++iter) {
        Eigen::MatrixXd JtJ = J.transpose() * J;
        Eigen::VectorXd r(n);
        for (Eigen::Index i = 0; i < n; ++i)
            r[i] = y[static_cast<std::size_t>(i)] - f[i];
        Eigen::VectorXd g = J.transpose() * r;
        if (!JtJ.allFinite() || !g.allFinite())
            throw PhysicsError("fit: non-finite Jacobian");
        for (Eigen::Index j = 0; j < p; ++j)
            if (JtJ(j, j) <= 0.0)
                throw PhysicsError("fit: singular Jacobian (parameter '" +
                                   model.names[static_cast<std::size_t>(j)] +
                                   "' has no leverage)");

        bool accepted = false;
        Eigen::VectorXd last_step = Eigen::VectorXd::Zero(p);
        for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal() += lambda * JtJ.diagonal();
            Eigen::VectorXd delta = A.ldlt().solve(g);
            if (!delta.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            Eigen::VectorXd trial = clamp_to_bounds(theta + delta, opts);
            last_step = trial - theta;
            Eigen::VectorXd f_try(n);
            Eigen::MatrixXd J_try(n, p);
            model.eval(trial, x, f_try, J_try);
            double ssr_try = sum_sq_residual(f_try, y);
            if (std::isfinite(ssr_try) && ssr_try < ssr) {
                theta = trial;
                f = f_try;
                J = J_try;
                ssr = ssr_try;
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
                result.iterations = iter + 1;
            } else {
                lambda *= 10.0;
            }
        }
        double step_tol = opts.param_tol * (theta.norm() + opts.param_tol);
        if (last_step.norm() <= step_tol)
            result.converged = true;
        else if (!accepted)
            throw PhysicsError("fit: stalled without meeting step tolerance");
    }
    if (!result.converged)
        throw PhysicsError("fit: no convergence within iteration limit");

    result.params = theta;
    result.residual_norm = std::sqrt(ssr);

    Eigen::MatrixXd JtJ = J.transpose() * J;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(JtJ);
    double emin = es.eigenvalues().minCoeff();
    double emax = es.eigenvalues().maxCoeff();
    result.ill_conditioned = !(emin > 0.0) || emax > 1e12 * emin;
    if (emin > 0.0) {
        double dof = static_cast<double>(n - p);
        double sigma2 = dof > 0.0 ? ssr / dof : 0.0;
        result.covariance = sigma2 * JtJ.inverse();
    }
    return result;
}

FitModel model_stretched_exponential() {
    FitModel m;
    m.names = {"amplitude", "T2", "k"};
    m.eval = [](const Eigen::VectorXd& th, const std::vector<double>& x,
                Eigen::VectorXd& f, Eigen::MatrixXd& J) {
        double A = th[0], T2 = th[1], k = th[2];
        for (std::size_t i = 0; i < x.size(); ++i) {
            Eigen::Index r = static_cast<Eigen::Index>(i);
            double t = x[i];
            if (t <= 0.0) {
                f[r] = A;
                J(r, 0) = 1.0;
                J(r, 1) = 0.0;
                J(r, 2) = 0.0;
                continue;
            }
            double u = std::pow(t / T2, k);
            double e = std::exp(-u);
            f[r] = A * e;
            J(r, 0) = e;
            J(r, 1) = A * e * k * u / T2;
            J(r, 2) = -A * e * u * std::log(t / T2);
        }
    };
    return m;
}

FitModel model_lorentzian() {
    FitModel m;
    m.names = {"baseline", "height", "center", "fwhm"};
    m.eval = [](const Eigen::VectorXd& th, const std::vector<double>& x,
                Eigen::VectorXd& f, Eigen::MatrixXd& J) {
        double y0 = th[0], h = th[1], c = th[2], G = th[3];
        double s = 0.25 * G * G;
        for (std::size_t i = 0; i < x.size(); ++i) {
            Eigen::Index r = static_cast<Eigen::Index>(i);
            double d = x[i] - c;
            double D = d * d + s;
            double q = s / D;
            f[r] = y0 + h * q;
            J(r, 0) = 1.0;
            J(r, 1) = q;
            J(r, 2) = h * s * 2.0 * d / (D * D);
            J(r, 3) = h * 0.5 * G * d * d / (D * D);
        }
    };
    return m;
}

FitModel model_exponential_recovery() {
    FitModel m;
    m.names = {"offset", "amplitude", "T1"};
    m.eval = [](const Eigen::VectorXd& th, const std::vector<double>& x,
                Eigen::VectorXd& f, Eigen::MatrixXd& J) {
        double y0 = th[0], A = th[1], T1 = th[2];
        for (std::size_t i = 0; i < x.size(); ++i) {
            Eigen::Index r = static_cast<Eigen::Index>(i);
            double e = std::exp(-x[i] / T1);
            f[r] = y0 + A * (1.0 - e);
            J(r, 0) = 1.0;
            J(r, 1) = 1.0 - e;
            J(r, 2) = -A * x[i] * e / (T1 * T1);
        }
    };
    return m;
}

FitModel model_damped_cosine() {
    FitModel m;
    m.names = {"offset", "amplitude", "tau", "frequency", "phase"};
    m.eval = [](const Eigen::VectorXd& th, const std::vector<double>& x,
                Eigen::VectorXd& f, Eigen::MatrixXd& J) {
        double y0 = th[0], A = th[1], tau = th[2], nu = th[3], phi = th[4];
        for (std::size_t i = 0; i < x.size(); ++i) {
            Eigen::Index r = static_cast<Eigen::Index>(i);
            double t = x[i];
            double e = std::exp(-t / tau);
            double arg = 2.0 * M_PI * nu * t + phi;
            double cs = std::cos(arg), sn = std::sin(arg);
            f[r] = y0 + A * e * cs;
            J(r, 0) = 1.0;
            J(r, 1) = e * cs;
            J(r, 2) = A * e * cs * t / (tau * tau);
            J(r, 3) = -A * e * sn * 2.0 * M_PI * t;
            J(r, 4) = -A * e * sn;
        }
    };
    return m;
}

StretchedFit fit_stretched_exponential(const std::vector<double>& t,
                                       const std::vector<double>& y) {
    if (t.size() != y.size() || t.size() < 4)
        throw ConfigError("stretched fit: need at least 4 matched points");
    double A0 = *std::max_element(y.begin(), y.end());
    if (A0 <= 0.0) throw PhysicsError("stretched fit: no positive signal");

    double T20 = first_crossing(t, y, A0 / std::exp(1.0));
    if (T20 <= 0.0) T20 = std::max(t.back(), 1e-6);

    double k0 = 1.0;
    double t80 = first_crossing(t, y, 0.8 * A0);
    double t20 = first_crossing(t, y, 0.2 * A0);
    if (t80 > 0.0 && t20 > t80) {
        // ln(-ln(y/A)) is linear in ln t with slope k.
        double L80 = -std::log(0.8), L20 = -std::log(0.2);
        k0 = std::log(L20 / L80) / std::log(t20 / t80);
        k0 = std::clamp(k0, 0.2, 8.0);
    }

    FitOptions opts;
    opts.lower = Eigen::Vector3d(1e-12, 1e-9, 0.05);
    opts.upper = Eigen::Vector3d(std::numeric_limits<double>::infinity(),
                                 std::numeric_limits<double>::infinity(), 20.0);
    StretchedFit fit;
    fit.detail = nlls_fit(model_stretched_exponential(), t, y,
                          Eigen::Vector3d(A0, T20, k0), opts);
    fit.amplitude = fit.detail.params[0];
    fit.T2 = fit.detail.params[1];
    fit.k = fit.detail.params[2];
    return fit;
}

PowerLawFit fit_power_law(const std::vector<double>& x,
                          const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("power-law fit: need at least 2 matched points");
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0)
            throw PhysicsError("power-law fit: data must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double n = static_cast<double>(x.size());
    double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx <= 0.0) throw PhysicsError("power-law fit: degenerate abscissa");
    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    fit.prefactor = std::exp(my - fit.exponent * mx);
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = ly[i] - (std::log(fit.prefactor) + fit.exponent * lx[i]);
        ssr += r * r;
    }
    fit.residual_norm = std::sqrt(ssr);
    return fit;
}

LorentzianFit fit_lorentzian(const std::vector<double>& x,
                             const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 5)
        throw ConfigError("lorentzian fit: need at least 5 matched points");
    auto imax = std::distance(y.begin(), std::max_element(y.begin(), y.end()));
    double base0 = *std::min_element(y.begin(), y.end());
    double h0 = y[static_cast<std::size_t>(imax)] - base0;
    if (h0 <= 0.0) throw PhysicsError("lorentzian fit: flat spectrum");
    double c0 = x[static_cast<std::size_t>(imax)];

    double half = base0 + 0.5 * h0;
    double left = c0, right = c0;
    for (std::size_t i = static_cast<std::size_t>(imax); i-- > 0;) {
        if (y[i] <= half) { left = x[i]; break; }
    }
    for (std::size_t i = static_cast<std::size_t>(imax) + 1; i < y.size(); ++i) {
        if (y[i] <= half) { right = x[i]; break; }
    }
    double G0 = right - left;
    if (G0 <= 0.0) G0 = 0.25 * std::abs(x.back() - x.front());
    if (G0 <= 0.0) throw PhysicsError("lorentzian fit: degenerate abscissa");

    FitOptions opts;
    opts.lower = Eigen::Vector4d(-std::numeric_limits<double>::infinity(),
                                 -std::numeric_limits<double>::infinity(),
                                 -std::numeric_limits<double>::infinity(), 1e-9);
    LorentzianFit fit;
    fit.detail = nlls_fit(model_lorentzian(), x, y,
                          Eigen::Vector4d(base0, h0, c0, G0), opts);
    fit.baseline = fit.detail.params[0];
    fit.height = fit.detail.params[1];
    fit.center = fit.detail.params[2];
    fit.fwhm = fit.detail.params[3];
    return fit;
}

RecoveryFit fit_exponential_recovery(const std::vector<double>& t,
                                     const std::vector<double>& y) {
    if (t.size() != y.size() || t.size() < 4)
        throw ConfigError("recovery fit: need at least 4 matched points");
    auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
    if (*ymax_it == *ymin_it)
        throw PhysicsError("recovery fit: signal is constant; amplitude and T1 "
                           "are degenerate");
    double y00 = y.front();
    double A0 = y.back() - y.front();
    if (A0 == 0.0) {
        double half = 0.0;
        for (std::size_t i = y.size() / 2; i < y.size(); ++i) half += y[i] - y00;
        A0 = std::copysign(*ymax_it - *ymin_it, half);
    }

    // 63.2% rise point as the time-constant guess.
    double level = y00 + (1.0 - std::exp(-1.0)) * A0;
    double T10 = -1.0;
    for (std::size_t i = 1; i < y.size(); ++i) {
        bool crossed = A0 > 0.0 ? (y[i] >= level && y[i - 1] < level)
                                : (y[i] <= level && y[i - 1] > level);
        if (crossed) {
            double w = (level - y[i - 1]) / (y[i] - y[i - 1]);
            T10 = t[i - 1] + w * (t[i] - t[i - 1]);
            break;
        }
    }
    if (T10 <= 0.0) T10 = 0.5 * (t.front() + t.back());
    if (T10 <= 0.0) T10 = t.back();

    FitOptions opts;
    opts.lower = Eigen::Vector3d(-std::numeric_limits<double>::infinity(),
                                 -std::numeric_limits<double>::infinity(), 1e-9);
    RecoveryFit fit;
    fit.detail = nlls_fit(model_exponential_recovery(), t, y,
                          Eigen::Vector3d(y00, A0, T10), opts);
    fit.offset = fit.detail.params[0];
    fit.amplitude = fit.detail.params[1];
    fit.T1 = fit.detail.params[2];
    return fit;
}

DampedCosineFit fit_damped_cosine(const std::vector<double>& t,
                                  const std::vector<double>& y) {
    if (t.size() != y.size() || t.size() < 8)
        throw ConfigError("damped-cosine fit: need at least 8 matched points");
    double y00 = std::accumulate(y.begin(), y.end(), 0.0) /
                 static_cast<double>(y.size());
    double span = t.back() - t.front();
    if (span <= 0.0) throw ConfigError("damped-cosine fit: degenerate abscissa");

    int crossings = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
        if ((y[i] - y00) * (y[i - 1] - y00) < 0.0) ++crossings;
    double nu0 = std::max(0.5 * crossings / span, 0.25 / span);
    double A0 = y.front() - y00;
    if (A0 == 0.0) A0 = 0.5 * (*std::max_element(y.begin(), y.end()) -
                               *std::min_element(y.begin(), y.end()));

    FitOptions opts;
    opts.lower = Eigen::VectorXd(5);
    opts.upper = Eigen::VectorXd(5);
    double inf = std::numeric_limits<double>::infinity();
    // Undamped data is indistinguishable from tau >> span; the cap keeps the
    // solver from chasing tau -> infinity at fixed residual.
    opts.lower << -inf, -inf, 1e-9, 1e-12, -2.0 * M_PI;
    opts.upper << inf, inf, 1e4 * span, inf, 2.0 * M_PI;
    Eigen::VectorXd theta0(5);
    theta0 << y00, A0, 2.0 * span, nu0, 0.0;

    DampedCosineFit fit;
    fit.detail = nlls_fit(model_damped_cosine(), t, y, theta0, opts);
    fit.offset = fit.detail.params[0];
    fit.amplitude = fit.detail.params[1];
    fit.tau = fit.detail.params[2];
    fit.frequency = fit.detail.params[3];
    fit.phase = fit.detail.params[4];
    return fit;
}

double one_over_e_time(const std::vector<double>& t,
                       const std::vector<double>& y) {
    if (t.size() != y.size() || y.empty() || y.front() <= 0.0) return -1.0;
    return first_crossing(t, y, y.front() / std::exp(1.0));
}

} // namespace cespin
