#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cespin {

struct FitResult {
    std::vector<std::string> names;
    Eigen::VectorXd params;
    double residual_norm = 0.0;   // sqrt(SSR)
    bool converged = false;
    int iterations = 0;
    Eigen::MatrixXd covariance;   // empty when not computable
    bool ill_conditioned = false; // J^T J condition number > 1e12
};

// Residual model: given parameters theta, fill f(x_i; theta) and the
// Jacobian d f_i / d theta_j (analytic, row-major per point).
struct FitModel {
    std::vector<std::string> names;
    std::function<void(const Eigen::VectorXd& theta,
                       const std::vector<double>& x,
                       Eigen::VectorXd& f, Eigen::MatrixXd& J)> eval;
};

struct FitOptions {
    double param_tol = 1e-8;   // relative step tolerance
    int max_iterations = 500;
    double lambda0 = 1e-3;     // initial LM damping
    Eigen::VectorXd lower, upper; // optional box bounds (empty = none)
};

// Damped Gauss-Newton (Levenberg-Marquardt): monotone residual decrease per
// accepted step, deterministic.  Throws PhysicsError on singular Jacobian or
// non-convergence.
FitResult nlls_fit(const FitModel& model, const std::vector<double>& x,
                   const std::vector<double>& y, Eigen::VectorXd theta0,
                   const FitOptions& opts = {});

// Named models for the CLI `fit` subcommand and the wrappers below.
FitModel model_stretched_exponential(); // A exp(-(t/T2)^k):       {A, T2, k}
FitModel model_lorentzian();            // y0 + h (G/2)^2 / ((x-c)^2 + (G/2)^2)
FitModel model_exponential_recovery();  // y0 + A (1 - exp(-t/T1)): {y0, A, T1}
FitModel model_damped_cosine();         // y0 + A e^{-t/tau} cos(2 pi f t + phi)

struct StretchedFit { double T2, k, amplitude; FitResult detail; };
// Auto-derived start: A from the first point, T2 from the empirical 1/e
// crossing, k from log-log curvature between the 80% and 20% levels.
StretchedFit fit_stretched_exponential(const std::vector<double>& t,
                                       const std::vector<double>& y);

struct PowerLawFit { double exponent, prefactor, residual_norm; };
// Exact least squares on log-log; all x, y must be positive.
PowerLawFit fit_power_law(const std::vector<double>& x,
                          const std::vector<double>& y);

struct LorentzianFit { double center, fwhm, height, baseline; FitResult detail; };
LorentzianFit fit_lorentzian(const std::vector<double>& x,
                             const std::vector<double>& y);

struct RecoveryFit { double T1, amplitude, offset; FitResult detail; };
RecoveryFit fit_exponential_recovery(const std::vector<double>& t,
                                     const std::vector<double>& y);

struct DampedCosineFit { double frequency, tau, amplitude, offset, phase; FitResult detail; };
DampedCosineFit fit_damped_cosine(const std::vector<double>& t,
                                  const std::vector<double>& y);

// Empirical 1/e crossing by linear interpolation (first crossing of
// y/y[0] = 1/e); negative when the curve never crosses.
double one_over_e_time(const std::vector<double>& t,
                       const std::vector<double>& y);

} // namespace cespin
