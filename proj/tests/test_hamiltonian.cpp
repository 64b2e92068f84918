#include <doctest/doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "cespin/constants.hpp"
#include "cespin/crystal.hpp"
#include "cespin/errors.hpp"
#include "cespin/spin_hamiltonian.hpp"

using namespace cespin;

namespace {

SpinSpecies aluminum() { return {"27Al", 2.5, 0.0110984910, 1.0}; }

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::Vector3d axis(g(rng), g(rng), g(rng));
    axis.normalize();
    double angle = std::uniform_real_distribution<double>(0.0, M_PI)(rng);
    return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

} // namespace

TEST_CASE("electron splitting is linear in g and B") {
    CHECK(electron_splitting(2.0023, 1.0) ==
          doctest::Approx(28.025).epsilon(1e-3));
    CHECK(electron_splitting(0.948, 49.0) ==
          doctest::Approx(650.0).epsilon(0.01));
    CHECK(electron_splitting(1.0, 2.0) ==
          doctest::Approx(2.0 * electron_splitting(1.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("nuclear Larmor frequency of 27Al at 49 mT") {
    CHECK(nuclear_larmor(aluminum(), 49.0) ==
          doctest::Approx(0.54383).epsilon(1e-4));
}

TEST_CASE("dipolar tensor along z is diag(b, b, -2b)") {
    double gbar = 0.0110984910;
    Eigen::Matrix3d D = dipolar_tensor(Eigen::Vector3d(0, 0, 0.30), gbar, gbar);
    double b = constants::dipolar_prefactor * gbar * gbar / (0.30 * 0.30 * 0.30);
    CHECK(b == doctest::Approx(3.02e-4).epsilon(0.01));
    CHECK(D(0, 0) == doctest::Approx(b).epsilon(1e-12));
    CHECK(D(1, 1) == doctest::Approx(b).epsilon(1e-12));
    CHECK(D(2, 2) == doctest::Approx(-2.0 * b).epsilon(1e-12));
    CHECK(std::abs(D(0, 1)) + std::abs(D(0, 2)) + std::abs(D(1, 2)) < 1e-15);
}

TEST_CASE("dipolar tensor is symmetric, traceless, and follows 1/r^3") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Vector3d r(g(rng), g(rng), g(rng));
        r *= 0.5 / r.norm() * (0.5 + 0.1 * trial);
        Eigen::Matrix3d D = dipolar_tensor(r, 0.011, 0.002);
        CHECK((D - D.transpose()).norm() < 1e-15);
        CHECK(std::abs(D.trace()) < 1e-15);
        Eigen::Matrix3d D2 = dipolar_tensor(2.0 * r, 0.011, 0.002);
        CHECK((D2 - D / 8.0).norm() < 1e-15 + D.norm() * 1e-12);
    }
    CHECK_THROWS_AS((void)dipolar_tensor(Eigen::Vector3d(0, 0, 0.01), 0.011, 0.011),
                    PhysicsError);
}

TEST_CASE("hyperfine tensor anchor: Ce-Al at 0.30 nm, g = 0.948") {
    CentralSpinParams central = make_central_spin(0.948, Eigen::Vector3d(0, 0, 49.0));
    Eigen::Matrix3d A =
        hyperfine_tensor(central, Eigen::Vector3d(0, 0, 0.30), aluminum());
    double b = constants::dipolar_prefactor * (0.948 * constants::mu_B_over_h) *
               0.0110984910 / (0.30 * 0.30 * 0.30);
    CHECK(b == doctest::Approx(0.36139).epsilon(1e-3));
    CHECK(A(0, 0) == doctest::Approx(b).epsilon(1e-12));
    CHECK(A(2, 2) == doctest::Approx(-2.0 * b).epsilon(1e-12));
    CHECK_THROWS_AS(
        (void)hyperfine_tensor(central, Eigen::Vector3d(0, 0, 0.05), aluminum()),
        PhysicsError);
}

TEST_CASE("secular hyperfine vanishes at the magic angle") {
    CentralSpinParams central = make_central_spin(1.5, Eigen::Vector3d(0, 0, 49.0));
    double theta = std::acos(1.0 / std::sqrt(3.0));
    Eigen::Vector3d r(0.4 * std::sin(theta), 0.0, 0.4 * std::cos(theta));
    Eigen::Matrix3d A = hyperfine_tensor(central, r, aluminum());
    Eigen::Vector3d row = secular_hyperfine_row(central, A);
    CHECK(std::abs(row.z()) < 1e-12);
}

TEST_CASE("secular row is invariant under a global rotation") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::Vector3d bdir(g(rng), g(rng), g(rng));
        bdir.normalize();
        Eigen::Vector3d r(g(rng), g(rng), g(rng));
        r *= 0.45 / r.norm();
        Eigen::Matrix3d R = random_rotation(rng);

        CentralSpinParams c1 = make_central_spin(1.2, 49.0 * bdir);
        Eigen::Vector3d row1 =
            secular_hyperfine_row(c1, hyperfine_tensor(c1, r, aluminum()));
        CentralSpinParams c2 = make_central_spin(1.2, 49.0 * (R * bdir));
        Eigen::Vector3d row2 =
            secular_hyperfine_row(c2, hyperfine_tensor(c2, R * r, aluminum()));
        // The secular z component is frame-independent; the transverse pair
        // is fixed only up to a rotation about z', so compare magnitudes.
        CHECK(row1.z() == doctest::Approx(row2.z()).epsilon(1e-10));
        CHECK(row1.head<2>().norm() ==
              doctest::Approx(row2.head<2>().norm()).epsilon(1e-10));
    }
}

TEST_CASE("quantization frame is orthonormal with ez along B") {
    Eigen::Matrix3d F = quantization_frame(Eigen::Vector3d(1, 1, 0));
    CHECK((F * F.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-14);
    CHECK(F.determinant() == doctest::Approx(1.0));
    Eigen::Vector3d ez = F.row(2);
    CHECK((ez - Eigen::Vector3d(1, 1, 0).normalized()).norm() < 1e-14);
}

TEST_CASE("spin operators satisfy su(2) and the Casimir identity") {
    for (double I : {0.5, 1.0, 2.5}) {
        const auto& ops = SpinOperators::of(I);
        int dim = static_cast<int>(2.0 * I + 1.5);
        REQUIRE(ops.Ix.rows() == dim);
        std::complex<double> im(0.0, 1.0);
        Eigen::MatrixXcd comm = ops.Ix * ops.Iy - ops.Iy * ops.Ix;
        CHECK((comm - im * ops.Iz).norm() < 1e-13);
        Eigen::MatrixXcd casimir =
            ops.Ix * ops.Ix + ops.Iy * ops.Iy + ops.Iz * ops.Iz;
        CHECK((casimir - I * (I + 1.0) * Eigen::MatrixXcd::Identity(dim, dim))
                  .norm() < 1e-13);
        CHECK((ops.Iz - ops.Iz.adjoint()).norm() < 1e-15);
    }
}

TEST_CASE("single-spin conditional Hamiltonian has vector-model eigenvalues") {
    // One I=1/2 bath spin: H_+- = -nu_L Iz +- (a . I)/2 has eigenvalues
    // +-|v|/2 with v = (a_x/2, a_y/2, -nu_L + a_z/2) for the + branch.
    CrystalSpec spec;
    spec.a_nm = 1.0;
    spec.species.push_back({"89Y", 0.5, 0.0020950, 1.0});
    spec.sites.push_back({Eigen::Vector3d::Zero(), 0, SiteClass::dodecahedral});

    CentralSpinParams central = make_central_spin(1.0, Eigen::Vector3d(0, 0, 49.0));
    BathConfiguration bath;
    bath.central_position = Eigen::Vector3d::Zero();
    bath.spins.push_back(
        {Eigen::Vector3d(0.2, 0.1, 0.35), 0, SiteClass::dodecahedral, 0.0});
    bath.spins[0].distance = bath.spins[0].position.norm();
    SpinSystem sys = make_spin_system(spec, central, bath);

    auto pair = conditional_cluster_hamiltonian(sys, {0});
    Eigen::Vector3d a = sys.secular_rows[0];
    double nuL = sys.larmor[0];
    Eigen::Vector3d vp(a.x() / 2.0, a.y() / 2.0, -nuL + a.z() / 2.0);
    Eigen::Vector3d vm(-a.x() / 2.0, -a.y() / 2.0, -nuL - a.z() / 2.0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ep(pair.H_plus);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(pair.H_minus);
    CHECK(ep.eigenvalues()(0) == doctest::Approx(-vp.norm() / 2.0).epsilon(1e-10));
    CHECK(ep.eigenvalues()(1) == doctest::Approx(vp.norm() / 2.0).epsilon(1e-10));
    CHECK(em.eigenvalues()(0) == doctest::Approx(-vm.norm() / 2.0).epsilon(1e-10));
    CHECK(em.eigenvalues()(1) == doctest::Approx(vm.norm() / 2.0).epsilon(1e-10));
}

TEST_CASE("quadrupole term shifts single-spin levels by q(m^2 - I(I+1)/3)") {
    CrystalSpec spec;
    spec.a_nm = 1.0;
    spec.species.push_back({"27Al", 2.5, 0.0110984910, 1.0});
    spec.sites.push_back({Eigen::Vector3d::Zero(), 0, SiteClass::octahedral});

    CentralSpinParams central = make_central_spin(1.0, Eigen::Vector3d(0, 0, 49.0));
    BathConfiguration bath;
    bath.central_position = Eigen::Vector3d::Zero();
    // Far away: hyperfine negligible, keep only Zeeman + quadrupole.
    bath.spins.push_back(
        {Eigen::Vector3d(0, 0, 400.0), 0, SiteClass::octahedral, 400.0});
    SpinSystem sys = make_spin_system(spec, central, bath);
    sys.quadrupole_MHz = {0.7, 0.0, 0.0};

    auto pair = conditional_cluster_hamiltonian(sys, {0});
    std::vector<double> expected;
    double I = 2.5, nuL = sys.larmor[0], q = 0.7;
    for (double m = -I; m <= I + 0.1; m += 1.0)
        expected.push_back(-nuL * m + q * (m * m - I * (I + 1.0) / 3.0));
    std::sort(expected.begin(), expected.end());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pair.H_plus);
    for (int i = 0; i < 6; ++i)
        CHECK(es.eigenvalues()(i) == doctest::Approx(expected[i]).epsilon(1e-8));
}

TEST_CASE("cluster dimension cap is enforced") {
    CrystalSpec spec;
    spec.a_nm = 1.0;
    spec.species.push_back({"27Al", 2.5, 0.0110984910, 1.0});
    spec.sites.push_back({Eigen::Vector3d::Zero(), 0, SiteClass::octahedral});
    CentralSpinParams central = make_central_spin(1.0, Eigen::Vector3d(0, 0, 49.0));
    BathConfiguration bath;
    bath.central_position = Eigen::Vector3d::Zero();
    bath.spins.push_back(
        {Eigen::Vector3d(0, 0, 0.3), 0, SiteClass::octahedral, 0.3});
    bath.spins.push_back(
        {Eigen::Vector3d(0, 0, 0.6), 0, SiteClass::octahedral, 0.6});
    SpinSystem sys = make_spin_system(spec, central, bath, 8);
    CHECK_THROWS_AS((void)conditional_cluster_hamiltonian(sys, {0, 1}),
                    PhysicsError);
    CHECK_THROWS_AS((void)conditional_cluster_hamiltonian(sys, {}), PhysicsError);
    CHECK_THROWS_AS((void)conditional_cluster_hamiltonian(sys, {5}), PhysicsError);
}

TEST_CASE("pair Hamiltonian contains the full primed-frame dipolar tensor") {
    // Two I=1/2 spins displaced along the quantization axis: the dipolar
    // tensor in the primed frame is diag(b, b, -2b), so H contains
    // b(Ix1 Ix2 + Iy1 Iy2) - 2b Iz1 Iz2.
    CrystalSpec spec;
    spec.a_nm = 1.0;
    spec.species.push_back({"89Y", 0.5, 0.0020950, 1.0});
    spec.sites.push_back({Eigen::Vector3d::Zero(), 0, SiteClass::dodecahedral});
    CentralSpinParams central = make_central_spin(1.0, Eigen::Vector3d(0, 0, 49.0));
    BathConfiguration bath;
    bath.central_position = Eigen::Vector3d(500, 0, 0); // hyperfine negligible
    bath.spins.push_back(
        {Eigen::Vector3d(0, 0, 0.0), 0, SiteClass::dodecahedral, 500.0});
    bath.spins.push_back(
        {Eigen::Vector3d(0, 0, 0.3), 0, SiteClass::dodecahedral, 500.0});
    SpinSystem sys = make_spin_system(spec, central, bath);

    double b = constants::dipolar_prefactor * 0.0020950 * 0.0020950 / 0.027;
    const auto& ops = SpinOperators::of(0.5);
    auto kron = [](const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
        Eigen::MatrixXcd out(A.rows() * B.rows(), A.cols() * B.cols());
        for (int r = 0; r < A.rows(); ++r)
            for (int c = 0; c < A.cols(); ++c)
                out.block(r * B.rows(), c * B.cols(), B.rows(), B.cols()) =
                    A(r, c) * B;
        return out;
    };
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
    Eigen::MatrixXcd expected =
        -sys.larmor[0] * (kron(ops.Iz, id) + kron(id, ops.Iz)) +
        b * (kron(ops.Ix, ops.Ix) + kron(ops.Iy, ops.Iy)) -
        2.0 * b * kron(ops.Iz, ops.Iz);
    // Hyperfine from 500 nm away is ~1e-9 MHz; compare at 1e-7 resolution.
    auto pair = conditional_cluster_hamiltonian(sys, {0, 1});
    CHECK((pair.H_plus - expected).norm() < 1e-7);
    CHECK((pair.H_minus - expected).norm() < 1e-7);
    CHECK((pair.H_plus - pair.H_plus.adjoint()).norm() < 1e-13);
}
