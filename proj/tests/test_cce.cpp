#include <doctest/doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "cespin/cce.hpp"
#include "cespin/constants.hpp"
#include "cespin/errors.hpp"
#include "cespin/fitting.hpp"

using namespace cespin;

namespace {

// Minimal crystal carrying one I=1/2 species for hand-built systems.
const CrystalSpec& toy_spec() {
    static CrystalSpec spec = [] {
        CrystalSpec s;
        s.a_nm = 1.0;
        s.species.push_back({"89Y", 0.5, 0.0020950, 1.0});
        s.sites.push_back({Eigen::Vector3d::Zero(), 0, SiteClass::dodecahedral});
        return s;
    }();
    return spec;
}

SpinSystem toy_system(const std::vector<Eigen::Vector3d>& positions,
                      const Eigen::Vector3d& central_pos =
                          Eigen::Vector3d(0, 0, -0.5)) {
    CentralSpinParams central =
        make_central_spin(0.948, Eigen::Vector3d(0, 0, 49.0));
    BathConfiguration bath;
    bath.central_position = central_pos;
    for (const auto& p : positions)
        bath.spins.push_back(
            {p, 0, SiteClass::dodecahedral, (p - central_pos).norm()});
    return make_spin_system(toy_spec(), central, bath);
}

const CrystalSpec& yag() {
    static CrystalSpec spec = load_crystal_spec("data/yag.crystal");
    return spec;
}

SpinSystem default_bath_system(double cutoff,
                               const std::vector<SiteClass>& exclude = {}) {
    SiteFrameSet frames = site_frames(yag(), Eigen::Vector3d(1, 1, 0));
    CentralSpinParams central = make_central_spin(
        frames.effective_g[1], 49.0 * Eigen::Vector3d(1, 1, 0).normalized());
    BathConfiguration bath = generate_bath(
        yag(), default_central_position(yag()), cutoff, {"27Al"}, exclude);
    return make_spin_system(yag(), central, std::move(bath));
}

} // namespace

TEST_CASE("cluster enumeration: counts, order, and brute-force pairs") {
    std::vector<Eigen::Vector3d> pos = {
        {0, 0, 0.0}, {0, 0, 0.4}, {0.3, 0, 0.1}, {0, 0.5, 0.2}, {0.6, 0.6, 0.6}};
    SpinSystem sys = toy_system(pos);

    ClusterSet c1 = enumerate_clusters(sys.bath, 1, 0.5);
    CHECK(c1.singles.size() == 5);
    CHECK(c1.pairs.empty());

    ClusterSet c2 = enumerate_clusters(sys.bath, 2, 100.0);
    CHECK(c2.pairs.size() == 10); // all n(n-1)/2 pairs inside a huge cutoff

    double cutoff = 0.45;
    ClusterSet c3 = enumerate_clusters(sys.bath, 2, cutoff);
    std::vector<Cluster> brute;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j)
            if ((sys.bath.spins[i].position - sys.bath.spins[j].position).norm() <=
                cutoff)
                brute.push_back({i, j});
    CHECK(c3.pairs == brute);
    for (std::size_t i = 1; i < c3.pairs.size(); ++i)
        CHECK(c3.pairs[i - 1] < c3.pairs[i]); // lexicographic

    ClusterSet c0 = enumerate_clusters(sys.bath, 2, 0.0);
    CHECK(c0.pairs.empty());
    CHECK_THROWS_AS((void)enumerate_clusters(sys.bath, 3, 0.5), ConfigError);
}

TEST_CASE("coherence is exactly 1 with an empty bath and at t -> 0") {
    SpinSystem sys = toy_system({});
    PulseSequence seq = build_sequence(SequenceKind::hahn, 1, 1.0);
    CceOptions opts;
    CceResult res = compute_coherence(sys, seq, {0.25, 0.5, 1.0}, opts);
    for (auto v : res.curve.values) CHECK(std::abs(v - 1.0) < 1e-15);

    SpinSystem sys2 = toy_system({{0, 0, 0}, {0, 0, 0.3}});
    CceResult res2 = compute_coherence(sys2, seq, {1e-9}, opts);
    CHECK(std::abs(res2.curve.values[0] - 1.0) < 1e-9);
}

TEST_CASE("hahn echo refocuses purely longitudinal single-spin dephasing") {
    // Bath spin displaced along z' from the central spin: the secular row is
    // (0, 0, A_zz), H_+ and H_- commute, and the echo is exactly 1.
    SpinSystem sys = toy_system({{0, 0, 0.0}}, Eigen::Vector3d(0, 0, -0.35));
    REQUIRE(sys.secular_rows[0].head<2>().norm() < 1e-15);
    PulseSequence hahn = build_sequence(SequenceKind::hahn, 1, 1.0);
    auto L = cluster_signal({0}, sys, hahn, {0.2, 0.7, 1.3});
    for (auto v : L) CHECK(std::abs(v - 1.0) < 1e-12);

    // Under free evolution the same spin dephases as cos(pi A t).
    PulseSequence fid = build_sequence(SequenceKind::ramsey, 0, 1.0);
    double A = sys.secular_rows[0].z();
    for (double t : {0.3, 1.1, 2.7}) {
        auto Lr = cluster_signal({0}, sys, fid, {t});
        CHECK(std::abs(Lr[0] - std::cos(M_PI * A * t)) < 1e-12);
    }
}

TEST_CASE("pair echo matches the analytic pseudospin formula") {
    // Two spins stacked along z' below the central spin: secular rows are
    // purely longitudinal (A1, A2) and the pair coupling in the primed frame
    // is b(Ix Ix + Iy Iy) + c Iz Iz with b = K g1 g2 / r12^3.
    Eigen::Vector3d p1(0, 0, 0.0), p2(0, 0, 0.32);
    SpinSystem sys = toy_system({p1, p2}, Eigen::Vector3d(0, 0, -0.42));
    double A1 = sys.secular_rows[0].z();
    double A2 = sys.secular_rows[1].z();
    double b = constants::dipolar_prefactor * 0.0020950 * 0.0020950 /
               std::pow(0.32, 3);
    for (double t : {0.5, 2.0, 11.0, 40.0}) {
        PulseSequence hahn = build_sequence(SequenceKind::hahn, 1, t);
        auto L = cluster_signal({0, 1}, sys, hahn, {t});
        double expected = pair_echo_analytic(A1, A2, b, t / 2.0);
        CHECK(std::abs(L[0].real() - expected) < 1e-9);
        CHECK(std::abs(L[0].imag()) < 1e-9);
    }
}

TEST_CASE("a 6 nm pair is uncorrelated: tilde contribution is unity") {
    Eigen::Vector3d p1(0, 0, 0.0), p2(0, 0, 6.0);
    SpinSystem sys = toy_system({p1, p2}, Eigen::Vector3d(0.4, 0, 3.0));
    PulseSequence hahn = build_sequence(SequenceKind::hahn, 1, 1.0);
    CceOptions opts;
    opts.pair_cutoff = 10.0;
    opts.dump_clusters = true;
    CceResult res = compute_coherence(sys, hahn, {0.5, 1.0}, opts);
    REQUIRE(res.clusters.pairs.size() == 1);
    REQUIRE(res.cluster_signals.size() == 3);
    // Ltilde_pair = L_pair / (L_1 L_2) == 1 when the coupling is negligible.
    for (std::size_t k = 0; k < 2; ++k) {
        auto l1 = res.cluster_signals[0][k];
        auto l2 = res.cluster_signals[1][k];
        auto lp = res.cluster_signals[2][k];
        CHECK(std::abs(lp - l1 * l2) < 1e-9);
    }
}

TEST_CASE("CCE-2 equals CCE-1 when the pair cutoff removes all pairs") {
    SpinSystem sys = toy_system({{0, 0, 0}, {0.25, 0, 0}, {0, 0.3, 0.1}});
    PulseSequence hahn = build_sequence(SequenceKind::hahn, 1, 1.0);
    std::vector<double> times = {0.3, 0.6, 1.2};
    CceOptions o1, o2;
    o1.order = 1;
    o2.order = 2;
    o2.pair_cutoff = 0.0;
    CceResult r1 = compute_coherence(sys, hahn, times, o1);
    CceResult r2 = compute_coherence(sys, hahn, times, o2);
    for (std::size_t i = 0; i < times.size(); ++i)
        CHECK(r1.curve.values[i] == r2.curve.values[i]);
}

TEST_CASE("CCE-2 factorizes exactly over non-interacting pairs") {
    // Two tight pairs separated by 10^4 nm: cross couplings scale as 1/r^3
    // and are ~1e-13 of the intra-pair coupling.
    std::vector<Eigen::Vector3d> pos = {{0, 0, 0},
                                        {0, 0, 0.3},
                                        {1e4, 0, 0},
                                        {1e4, 0, 0.3}};
    SpinSystem sys = toy_system(pos, Eigen::Vector3d(0.2, 0.3, -0.4));
    PulseSequence hahn = build_sequence(SequenceKind::hahn, 1, 1.0);
    std::vector<double> times = {0.4, 0.9, 1.6, 3.0};

    CceOptions opts;
    opts.pair_cutoff = 1.0; // keeps only the two intra-pair clusters
    CceResult cce = compute_coherence(sys, hahn, times, opts);
    REQUIRE(cce.clusters.pairs.size() == 2);

    auto full = cluster_signal({0, 1, 2, 3}, sys, hahn, times);
    for (std::size_t i = 0; i < times.size(); ++i)
        CHECK(std::abs(cce.curve.values[i] - full[i]) < 1e-10);
}

TEST_CASE("CCE-2 tracks exact three-spin propagation for weak correlations") {
    std::vector<Eigen::Vector3d> pos = {{0, 0, 0}, {0.9, 0, 0.1}, {0, 1.0, 0.6}};
    SpinSystem sys = toy_system(pos, Eigen::Vector3d(0.1, 0.2, -0.6));
    PulseSequence hahn = build_sequence(SequenceKind::hahn, 1, 1.0);
    std::vector<double> times = {5.0, 20.0, 60.0};
    CceOptions opts;
    opts.pair_cutoff = 5.0;
    CceResult cce = compute_coherence(sys, hahn, times, opts);
    auto full = cluster_signal({0, 1, 2}, sys, hahn, times);
    for (std::size_t i = 0; i < times.size(); ++i)
        CHECK(std::abs(cce.curve.values[i] - full[i]) < 1e-6);
}

TEST_CASE("coherence magnitude never exceeds 1 on the real bath") {
    SpinSystem sys = default_bath_system(1.2);
    PulseSequence hahn = build_sequence(SequenceKind::hahn, 1, 1.0);
    std::vector<double> times;
    for (int i = 1; i <= 12; ++i) times.push_back(0.125 * i);
    CceOptions opts;
    CceResult res = compute_coherence(sys, hahn, times, opts);
    for (auto v : res.curve.values) CHECK(std::abs(v) <= 1.0 + 1e-9);
}

TEST_CASE("worker count does not change a single bit of the result") {
    SpinSystem sys = default_bath_system(1.0);
    PulseSequence hahn = build_sequence(SequenceKind::hahn, 1, 1.0);
    std::vector<double> times = {0.2, 0.5, 0.9, 1.4};
    CceOptions o1, o4, o7;
    o1.workers = 1;
    o4.workers = 4;
    o7.workers = 7;
    CceResult r1 = compute_coherence(sys, hahn, times, o1);
    CceResult r4 = compute_coherence(sys, hahn, times, o4);
    CceResult r7 = compute_coherence(sys, hahn, times, o7);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(r1.curve.values[i].real() == r4.curve.values[i].real());
        CHECK(r1.curve.values[i].imag() == r4.curve.values[i].imag());
        CHECK(r1.curve.values[i].real() == r7.curve.values[i].real());
        CHECK(r1.curve.values[i].imag() == r7.curve.values[i].imag());
    }
}

TEST_CASE("more CPMG pulses preserve more coherence at fixed total time") {
    SpinSystem sys = default_bath_system(1.2);
    std::vector<double> times = {0.6};
    CceOptions opts;
    PulseSequence hahn = build_sequence(SequenceKind::hahn, 1, 1.0);
    PulseSequence cpmg4 = build_sequence(SequenceKind::cpmg, 4, 1.0);
    double w1 = std::abs(compute_coherence(sys, hahn, times, opts).curve.values[0]);
    double w4 = std::abs(compute_coherence(sys, cpmg4, times, opts).curve.values[0]);
    CHECK(w4 > w1);
}

TEST_CASE("bath cutoff 2.5 nm is converged within 10% against 3.15 nm") {
    std::vector<double> times;
    for (int i = 1; i <= 20; ++i) times.push_back(1.5 * i / 20.0);
    CceOptions opts;
    opts.workers = 1;
    PulseSequence hahn = build_sequence(SequenceKind::hahn, 1, 1.0);

    auto t2_for_cutoff = [&](double cutoff) {
        SpinSystem sys = default_bath_system(cutoff);
        CceResult res = compute_coherence(sys, hahn, times, opts);
        std::vector<double> w(times.size());
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = std::abs(res.curve.values[i]);
        StretchedFit fit = fit_stretched_exponential(times, w);
        return fit.T2;
    };
    double t2_small = t2_for_cutoff(2.5);
    double t2_large = t2_for_cutoff(3.15);
    CHECK(std::abs(t2_small - t2_large) / t2_large < 0.10);
}

TEST_CASE("assembly guard counts near-zero subcluster divisions") {
    ClusterSet clusters;
    clusters.singles = {{0}, {1}};
    clusters.pairs = {{0, 1}};
    std::vector<std::vector<std::complex<double>>> signals = {
        {{1e-9, 0.0}}, {{0.5, 0.0}}, {{0.3, 0.0}}};
    std::int64_t guards = 0;
    auto c = cce_assemble(clusters, signals, 1, 1e-6, &guards);
    CHECK(guards == 1);
    // Raw L_pair is used for the pair factor; magnitude clipped to 1.
    CHECK(std::abs(c[0]) <= 1.0 + 1e-12);
}
