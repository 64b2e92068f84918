#include "cespin/cce.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <mutex>
#include <thread>

#include <Eigen/Dense>

#include "cespin/errors.hpp"

namespace cespin {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

constexpr double two_pi = 2.0 * M_PI;

VectorXcd phases(const VectorXd& eigs, double duration) {
    VectorXcd out(eigs.size());
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
        double arg = -two_pi * eigs[i] * duration;
        out[i] = cplx(std::cos(arg), std::sin(arg));
    }
    return out;
}

struct EigenPair {
    VectorXd lp, lm;  // eigenvalues of H_plus / H_minus
    MatrixXcd Vp;     // eigenvectors of H_plus
    MatrixXcd W;      // Vp^dag Vm
    int dim;
};

EigenPair decompose(const ClusterHamiltonianPair& H) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> ep(H.H_plus);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> em(H.H_minus);
    if (ep.info() != Eigen::Success || em.info() != Eigen::Success)
        throw PhysicsError("cluster Hamiltonian eigendecomposition failed");
    EigenPair e;
    e.lp = ep.eigenvalues();
    e.lm = em.eigenvalues();
    e.Vp = ep.eigenvectors();
    e.W = ep.eigenvectors().adjoint() * em.eigenvectors();
    e.dim = H.dim();
    return e;
}

// Tr[A B] without forming the product.
cplx trace_product(const MatrixXcd& A, const MatrixXcd& B) {
    return (A.transpose().cwiseProduct(B)).sum();
}

cplx ramsey_point(const EigenPair& e, double t) {
    // L = (1/d) sum_{kj} |W_kj|^2 exp(-i 2 pi (lp_k - lm_j) t)
    cplx acc(0, 0);
    for (int k = 0; k < e.dim; ++k)
        for (int j = 0; j < e.dim; ++j) {
            double w2 = std::norm(e.W(k, j));
            if (w2 == 0.0) continue;
            double arg = -two_pi * (e.lp[k] - e.lm[j]) * t;
            acc += w2 * cplx(std::cos(arg), std::sin(arg));
        }
    return acc / static_cast<double>(e.dim);
}

cplx hahn_point(const EigenPair& e, double t) {
    double tau = 0.5 * t;
    VectorXcd Ep = phases(e.lp, tau), Em = phases(e.lm, tau);
    // Tr[Em* W^dag Ep* W  Em W^dag Ep W] / d
    MatrixXcd WdagEp = e.W.adjoint();
    MatrixXcd P = Em.conjugate().asDiagonal() *
                  ((WdagEp * Ep.conjugate().asDiagonal()) * e.W);
    MatrixXcd Q =
        Em.asDiagonal() * ((WdagEp * Ep.asDiagonal()) * e.W);
    return trace_product(P, Q) / static_cast<double>(e.dim);
}

MatrixXcd matrix_power(MatrixXcd base, long n) {
    MatrixXcd result = MatrixXcd::Identity(base.rows(), base.cols());
    while (n > 0) {
        if (n & 1) result = result * base;
        base = base * base;
        n >>= 1;
    }
    return result;
}

cplx cpmg_even_point(const EigenPair& e, int N, double t) {
    // Unit cell in the V_plus eigenbasis; U_+- = cell^(N/2).
    double tau = t / (2.0 * N);
    VectorXcd Ep1 = phases(e.lp, tau), Ep2 = phases(e.lp, 2.0 * tau);
    VectorXcd Em1 = phases(e.lm, tau), Em2 = phases(e.lm, 2.0 * tau);
    MatrixXcd Wd = e.W.adjoint();
    MatrixXcd cell_p = Ep1.asDiagonal() *
                       ((e.W * Em2.asDiagonal()) * Wd) * Ep1.asDiagonal();
    MatrixXcd K = (e.W * Em1.asDiagonal()) * Wd;
    MatrixXcd cell_m = K * Ep2.asDiagonal() * K;
    MatrixXcd Up = matrix_power(std::move(cell_p), N / 2);
    MatrixXcd Um = matrix_power(std::move(cell_m), N / 2);
    return trace_product(Um.adjoint(), Up) / static_cast<double>(e.dim);
}

cplx generic_point(const EigenPair& e, const std::vector<double>& bounds,
                   double /*t*/) {
    // Alternating segment product, evaluated in the V_plus basis:
    // exp(-i2pi H- s) -> W Em(s) W^dag, exp(-i2pi H+ s) -> Ep(s) diagonal.
    const int d = e.dim;
    MatrixXcd Wd = e.W.adjoint();
    MatrixXcd Up = MatrixXcd::Identity(d, d), Um = Up;
    bool plus_first = true;
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
        double dur = bounds[s + 1] - bounds[s];
        bool seg_plus = (s % 2 == 0);
        // U accumulates left-multiplied (later factors on the left).
        auto apply = [&](MatrixXcd& U, bool plus) {
            if (plus)
                U = phases(e.lp, dur).asDiagonal() * U;
            else
                U = (e.W * (phases(e.lm, dur).asDiagonal() * (Wd * U)));
        };
        apply(Up, seg_plus == plus_first);
        apply(Um, seg_plus != plus_first);
    }
    return trace_product(Um.adjoint(), Up) / static_cast<double>(d);
}

} // namespace

ClusterSet enumerate_clusters(const BathConfiguration& bath, int order,
                              double pair_cutoff) {
    if (order < 1 || order > 2)
        throw ConfigError("CCE order must be 1 or 2");
    if (pair_cutoff < 0.0) throw ConfigError("pair cutoff must be >= 0");
    ClusterSet set;
    const int n = static_cast<int>(bath.spins.size());
    set.singles.reserve(n);
    for (int i = 0; i < n; ++i) set.singles.push_back({i});
    if (order >= 2 && pair_cutoff > 0.0) {
        const double cut2 = pair_cutoff * pair_cutoff;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if ((bath.spins[i].position - bath.spins[j].position)
                        .squaredNorm() <= cut2)
                    set.pairs.push_back({i, j});
    }
    return set;
}

std::vector<cplx> cluster_signal(const Cluster& cluster,
                                 const SpinSystem& system,
                                 const PulseSequence& seq,
                                 const std::vector<double>& times) {
    for (double t : times)
        if (t < 0.0) throw PhysicsError("cluster_signal: negative time");
    ClusterHamiltonianPair H = conditional_cluster_hamiltonian(system, cluster);
    EigenPair e = decompose(H);

    std::vector<cplx> out(times.size());
    const bool even_cpmg = seq.kind == SequenceKind::cpmg &&
                           seq.n_pulses >= 2 && seq.n_pulses % 2 == 0;
    for (std::size_t it = 0; it < times.size(); ++it) {
        double t = times[it];
        if (t == 0.0) {
            out[it] = 1.0;
        } else if (seq.kind == SequenceKind::ramsey) {
            out[it] = ramsey_point(e, t);
        } else if (seq.kind == SequenceKind::hahn ||
                   (seq.kind == SequenceKind::cpmg && seq.n_pulses == 1)) {
            out[it] = hahn_point(e, t);
        } else if (even_cpmg) {
            out[it] = cpmg_even_point(e, seq.n_pulses, t);
        } else {
            out[it] = generic_point(e, seq.boundaries(t), t);
        }
    }
    return out;
}

double pair_echo_analytic(double A1, double A2, double b, double tau) {
    double dA = A1 - A2;
    double omega = std::sqrt(b * b + 0.25 * dA * dA);
    if (omega == 0.0) return 1.0;
    double k = (b * dA) * (b * dA) / (omega * omega * omega * omega);
    double s = std::sin(M_PI * omega * tau);
    return 1.0 - k * s * s * s * s;
}

std::vector<cplx> cce_assemble(
    const ClusterSet& clusters,
    const std::vector<std::vector<cplx>>& signals, std::size_t n_times,
    double tilde_guard, std::int64_t* guard_count) {
    const std::size_t ns = clusters.singles.size();
    if (signals.size() != clusters.total())
        throw PhysicsError("cce_assemble: signal/cluster count mismatch");
    for (const auto& s : signals)
        if (s.size() != n_times)
            throw PhysicsError("cce_assemble: signal length mismatch");

    std::vector<cplx> C(n_times, cplx(1, 0));
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t k = 0; k < n_times; ++k) C[k] *= signals[i][k];

    std::int64_t guards = 0;
    for (std::size_t p = 0; p < clusters.pairs.size(); ++p) {
        const Cluster& pair = clusters.pairs[p];
        // Sub-cluster signals live at the singles' own indices.
        const auto& Li = signals[pair[0]];
        const auto& Lj = signals[pair[1]];
        const auto& Lp = signals[ns + p];
        for (std::size_t k = 0; k < n_times; ++k) {
            cplx denom = Li[k] * Lj[k];
            if (std::abs(denom) < tilde_guard) {
                C[k] *= Lp[k];
                ++guards;
            } else {
                C[k] *= Lp[k] / denom;
            }
        }
    }
    // Truncation artifacts can push |C| marginally above 1 where the signal
    // has already collapsed; clip the magnitude, keep the phase.
    for (auto& c : C) {
        double m = std::abs(c);
        if (m > 1.0) c /= m;
    }
    if (guard_count) *guard_count = guards;
    return C;
}

CceResult compute_coherence(const SpinSystem& system, const PulseSequence& seq,
                            const std::vector<double>& times,
                            const CceOptions& opts) {
    CceResult res;
    res.clusters = enumerate_clusters(system.bath, opts.order, opts.pair_cutoff);

    // Validate all pair sub-clusters resolve (singles are exhaustive by
    // construction, so index == cluster id).
    const std::size_t n_singles = res.clusters.singles.size();

    std::vector<Cluster> all;
    all.reserve(res.clusters.total());
    all.insert(all.end(), res.clusters.singles.begin(),
               res.clusters.singles.end());
    all.insert(all.end(), res.clusters.pairs.begin(), res.clusters.pairs.end());

    std::vector<std::vector<cplx>> signals(all.size());
    const int workers = std::max(1, opts.workers);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&]() {
        try {
            for (;;) {
                std::size_t k = next.fetch_add(1);
                if (k >= all.size()) break;
                signals[k] = cluster_signal(all[k], system, seq, times);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };
    if (workers == 1) {
        work();
    } else {
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    res.curve.times = times;
    res.curve.values = cce_assemble(res.clusters, signals, times.size(),
                                    opts.tilde_guard, &res.guard_activations);
    res.curve.metadata["sequence"] = to_string(seq.kind);
    res.curve.metadata["n_pulses"] = std::to_string(
        seq.kind == SequenceKind::cpmg ? seq.n_pulses
                                       : (seq.kind == SequenceKind::hahn ? 1 : 0));
    res.curve.metadata["cce_order"] = std::to_string(opts.order);
    res.curve.metadata["bath_size"] = std::to_string(n_singles);
    res.curve.metadata["pairs"] = std::to_string(res.clusters.pairs.size());
    if (opts.dump_clusters) res.cluster_signals = std::move(signals);
    return res;
}

} // namespace cespin
