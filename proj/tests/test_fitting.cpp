#include <doctest/doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cespin/errors.hpp"
#include "cespin/fitting.hpp"

using namespace cespin;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

std::vector<double> stretched(const std::vector<double>& t, double A, double T2,
                              double k) {
    std::vector<double> y;
    for (double ti : t) y.push_back(A * std::exp(-std::pow(ti / T2, k)));
    return y;
}

} // namespace

TEST_CASE("exact data and exact guess converge in zero iterations") {
    auto t = linspace(0.1, 6.0, 40);
    auto y = stretched(t, 1.0, 2.0, 2.5);
    Eigen::VectorXd theta0(3);
    theta0 << 1.0, 2.0, 2.5;
    FitResult res = nlls_fit(model_stretched_exponential(), t, y, theta0);
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    CHECK(res.residual_norm < 1e-12);
}

TEST_CASE("perturbed starts recover parameters to 1e-6 for every model") {
    auto recover = [&](const FitModel& model, const std::vector<double>& t,
                       const Eigen::VectorXd& truth,
                       const Eigen::VectorXd& start) {
        Eigen::VectorXd f(static_cast<Eigen::Index>(t.size()));
        Eigen::MatrixXd J(static_cast<Eigen::Index>(t.size()), truth.size());
        model.eval(truth, t, f, J);
        std::vector<double> y(f.data(), f.data() + f.size());
        FitResult res = nlls_fit(model, t, y, start);
        REQUIRE(res.converged);
        for (Eigen::Index i = 0; i < truth.size(); ++i)
            CHECK(std::abs(res.params[i] - truth[i]) <=
                  1e-6 * std::max(1.0, std::abs(truth[i])));
    };

    Eigen::VectorXd th_se(3), st_se(3);
    th_se << 0.9, 1.7, 2.2;
    st_se << 0.9 * 1.2, 1.7 * 0.8, 2.2 * 1.2;
    recover(model_stretched_exponential(), linspace(0.05, 5.0, 50), th_se,
            st_se);

    // center perturbed within the linewidth; the landscape is multimodal
    // far outside the line, which a local solver does not cover
    Eigen::VectorXd th_lor(4), st_lor(4);
    th_lor << 0.2, 3.0, 650.0, 12.0;
    st_lor << 0.2 * 0.8, 3.0 * 1.2, 650.0 + 0.2 * 12.0, 12.0 * 1.2;
    recover(model_lorentzian(), linspace(590.0, 710.0, 80), th_lor, st_lor);

    Eigen::VectorXd th_rec(3), st_rec(3);
    th_rec << 0.1, 2.0, 3800.0;
    st_rec << 0.1 * 1.2, 2.0 * 0.8, 3800.0 * 1.2;
    recover(model_exponential_recovery(), linspace(50.0, 15000.0, 60), th_rec,
            st_rec);

    // frequency start within a fraction of a period slip over the window
    Eigen::VectorXd th_cos(5), st_cos(5);
    th_cos << 1.0, 0.4, 3.0, 2.2, 0.3;
    st_cos << 1.2, 0.4 * 0.8, 3.0 * 1.2, 2.2 * 1.02, 0.3 + 0.2;
    recover(model_damped_cosine(), linspace(0.0, 4.0, 120), th_cos, st_cos);
}

TEST_CASE("stretched-exponential round trips, including steep k") {
    auto t = linspace(0.05, 4.0, 60);
    for (double k : {1.0, 2.5, 8.0}) {
        auto y = stretched(t, 1.0, 2.0, k);
        StretchedFit fit = fit_stretched_exponential(t, y);
        CHECK(std::abs(fit.T2 - 2.0) / 2.0 < 0.005);
        CHECK(std::abs(fit.k - k) / k < 0.005);
        CHECK(std::abs(fit.amplitude - 1.0) < 0.005);
    }
}

TEST_CASE("fit results are invariant under x rescaling") {
    auto t = linspace(0.05, 4.0, 60);
    auto y = stretched(t, 1.0, 2.0, 3.0);
    std::vector<double> t_ns;
    for (double ti : t) t_ns.push_back(1000.0 * ti);
    StretchedFit a = fit_stretched_exponential(t, y);
    StretchedFit b = fit_stretched_exponential(t_ns, y);
    CHECK(b.T2 == doctest::Approx(1000.0 * a.T2).epsilon(1e-6));
    CHECK(b.k == doctest::Approx(a.k).epsilon(1e-6));
}

TEST_CASE("power-law fit: slope targets and exact two-point case") {
    std::vector<double> N, T2a, T2b;
    for (int n = 1; n <= 4096; n *= 2) {
        N.push_back(n);
        T2a.push_back(0.3 * std::pow(n, 0.88));
        T2b.push_back(1.7 * std::pow(n, 2.0 / 3.0));
    }
    PowerLawFit a = fit_power_law(N, T2a);
    CHECK(std::abs(a.exponent - 0.88) < 0.001);
    CHECK(a.prefactor == doctest::Approx(0.3).epsilon(1e-6));
    PowerLawFit b = fit_power_law(N, T2b);
    CHECK(std::abs(b.exponent - 2.0 / 3.0) < 0.001);

    PowerLawFit two = fit_power_law({2.0, 8.0}, {5.0, 40.0});
    CHECK(two.exponent == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(two.residual_norm < 1e-12);

    CHECK_THROWS_AS((void)fit_power_law({1.0, -2.0}, {1.0, 2.0}), PhysicsError);
    CHECK_THROWS_AS((void)fit_power_law({1.0}, {1.0}), ConfigError);
}

TEST_CASE("lorentzian fit: round trip, symmetry, and noise robustness") {
    auto x = linspace(650.0 - 60.0, 650.0 + 60.0, 121);
    std::vector<double> y;
    for (double xi : x)
        y.push_back(0.2 + 3.0 * 36.0 / ((xi - 650.0) * (xi - 650.0) + 36.0));

    LorentzianFit fit = fit_lorentzian(x, y);
    CHECK(std::abs(fit.center - 650.0) / 650.0 < 1e-3);
    CHECK(std::abs(fit.fwhm - 12.0) / 12.0 < 1e-3);
    CHECK(std::abs(fit.height - 3.0) / 3.0 < 1e-3);
    CHECK(std::abs(fit.baseline - 0.2) < 0.01);

    // mirror-symmetric data on a symmetric grid: center pinned to the axis
    CHECK(std::abs(fit.center - 650.0) < 1e-9);

    std::mt19937_64 rng(17);
    std::normal_distribution<double> noise(0.0, 0.05 * 3.0);
    std::vector<double> errs;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> yn = y;
        for (auto& v : yn) v += noise(rng);
        LorentzianFit f = fit_lorentzian(x, yn);
        errs.push_back(std::abs(f.center - 650.0));
    }
    std::sort(errs.begin(), errs.end());
    CHECK(errs[errs.size() / 2] < 0.5);
}

TEST_CASE("exponential recovery: round trip and degenerate inputs") {
    auto t = linspace(50.0, 20000.0, 48);
    std::vector<double> y;
    for (double ti : t) y.push_back(0.3 + 2.0 * (1.0 - std::exp(-ti / 3800.0)));
    RecoveryFit fit = fit_exponential_recovery(t, y);
    CHECK(std::abs(fit.T1 - 3800.0) / 3800.0 < 0.005);
    CHECK(std::abs(fit.amplitude - 2.0) < 0.01);
    CHECK(std::abs(fit.offset - 0.3) < 0.01);

    std::vector<double> flat(t.size(), 1.25);
    CHECK_THROWS_AS((void)fit_exponential_recovery(t, flat), PhysicsError);

    // nlls with a zero-amplitude start on constant data: singular Jacobian
    Eigen::VectorXd theta0(3);
    theta0 << 1.25, 0.0, 1000.0;
    CHECK_THROWS_AS(
        (void)nlls_fit(model_exponential_recovery(), t, flat, theta0),
        PhysicsError);
}

TEST_CASE("recovery truncated to 0.1 T1 is flagged ill-conditioned") {
    auto t = linspace(1.0, 380.0, 40); // T1 = 3800
    std::vector<double> y;
    for (double ti : t) y.push_back(0.3 + 2.0 * (1.0 - std::exp(-ti / 3800.0)));
    RecoveryFit fit = fit_exponential_recovery(t, y);
    CHECK(fit.detail.converged);
    CHECK(fit.detail.ill_conditioned);
}

TEST_CASE("damped cosine: round trip and frequency from noisy start") {
    auto t = linspace(0.0, 4.0, 160);
    std::vector<double> y;
    for (double ti : t)
        y.push_back(1.0 + 0.4 * std::exp(-ti / 3.0) *
                              std::cos(2.0 * M_PI * 2.2 * ti + 0.3));
    DampedCosineFit fit = fit_damped_cosine(t, y);
    CHECK(std::abs(fit.frequency - 2.2) / 2.2 < 0.005);
    CHECK(std::abs(fit.tau - 3.0) / 3.0 < 0.005);
    CHECK(std::abs(fit.amplitude - 0.4) / 0.4 < 0.005);
    CHECK(std::abs(fit.offset - 1.0) < 0.005);

    // undamped data: frequency still recovered, tau pegged high
    std::vector<double> yu;
    for (double ti : t) yu.push_back(0.5 * std::cos(2.0 * M_PI * 1.3 * ti));
    DampedCosineFit fu = fit_damped_cosine(t, yu);
    CHECK(std::abs(fu.frequency - 1.3) / 1.3 < 0.005);
    CHECK(fu.tau > 10.0 * (t.back() - t.front()));
}

TEST_CASE("deterministic: identical inputs give bit-identical fits") {
    auto t = linspace(0.05, 4.0, 60);
    auto y = stretched(t, 1.0, 2.0, 3.0);
    StretchedFit a = fit_stretched_exponential(t, y);
    StretchedFit b = fit_stretched_exponential(t, y);
    CHECK(a.T2 == b.T2);
    CHECK(a.k == b.k);
    CHECK(a.detail.residual_norm == b.detail.residual_norm);
}

TEST_CASE("one_over_e_time interpolates the first crossing") {
    auto t = linspace(0.0, 5.0, 200);
    std::vector<double> y;
    for (double ti : t) y.push_back(std::exp(-ti / 1.3));
    double t1e = one_over_e_time(t, y);
    CHECK(std::abs(t1e - 1.3) < 0.01);

    std::vector<double> flat(t.size(), 0.9);
    CHECK(one_over_e_time(t, flat) < 0.0);
}

TEST_CASE("nlls input validation") {
    auto t = linspace(0.0, 1.0, 10);
    std::vector<double> y(9, 1.0);
    Eigen::VectorXd theta0(3);
    theta0 << 1.0, 1.0, 1.0;
    CHECK_THROWS_AS((void)nlls_fit(model_stretched_exponential(), t, y, theta0),
                    ConfigError);
    std::vector<double> two_t = {0.1, 0.2}, two_y = {1.0, 0.9};
    CHECK_THROWS_AS(
        (void)nlls_fit(model_stretched_exponential(), two_t, two_y, theta0),
        ConfigError);
}
