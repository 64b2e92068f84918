#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cespin/pulse.hpp"
#include "cespin/spin_hamiltonian.hpp"

namespace cespin {

// Sorted tuple of bath-spin indices; order = size (1 or 2 here).
using Cluster = std::vector<int>;

struct ClusterSet {
    std::vector<Cluster> singles; // canonical (index) order
    std::vector<Cluster> pairs;   // canonical lexicographic order
    std::size_t total() const { return singles.size() + pairs.size(); }
};

// Order-1 clusters: every bath spin.  Order-2: all pairs with separation
// <= pair_cutoff (nm), lexicographic.  order must be 1 or 2.
ClusterSet enumerate_clusters(const BathConfiguration& bath, int order,
                              double pair_cutoff);

struct CoherenceCurve {
    std::vector<double> times;                // us, strictly increasing
    std::vector<std::complex<double>> values; // C(t)
    std::map<std::string, std::string> metadata;
};

// L_C(t) = Tr[U_-(t)^dag U_+(t)] / dim with U_+- alternating
// exp(-i 2 pi H_+- tau) across the sequence's segments, swapping H_+ <-> H_-
// at every pi pulse; the sequence shape is rescaled to each requested total
// time.  rho = 1/dim (high-temperature bath).
std::vector<std::complex<double>> cluster_signal(const Cluster& cluster,
                                                 const SpinSystem& system,
                                                 const PulseSequence& seq,
                                                 const std::vector<double>& times);

// Closed-form Hahn-echo pseudospin signal for a secular I=1/2 pair:
//   H_+- = (-nu_L +- A1/2) Iz1 + (-nu_L +- A2/2) Iz2 + b (Ix1 Ix2 + Iy1 Iy2)
//          + c Iz1 Iz2
//   L(2 tau) = 1 - (b dA)^2/omega^4 * sin^4(pi omega tau),
//   dA = A1 - A2, omega = sqrt(b^2 + dA^2/4).
// Exported for tests.
double pair_echo_analytic(double A1, double A2, double b, double tau);

struct CceOptions {
    int order = 2;
    double pair_cutoff = 0.6;   // nm
    int workers = 1;
    bool dump_clusters = false; // keep per-cluster signals in the result
    double tilde_guard = 1e-6;  // |L_sub| below which raw L_C is used
};

struct CceResult {
    CoherenceCurve curve;
    ClusterSet clusters;
    // per-cluster |L|(t) tables when dump_clusters is set, cluster-major,
    // in canonical order (singles then pairs)
    std::vector<std::vector<std::complex<double>>> cluster_signals;
    std::int64_t guard_activations = 0; // tilde divisions skipped
};

// C(t) = prod_C Ltilde_C(t), Ltilde_C = L_C / prod_{C' subset C} Ltilde_{C'}.
// Cluster evaluation is parallel over `workers` threads; the product is
// reduced in canonical cluster order so results are bitwise independent of
// the worker count.
CceResult compute_coherence(const SpinSystem& system, const PulseSequence& seq,
                            const std::vector<double>& times,
                            const CceOptions& opts);

// Assembly step exposed for tests: combine per-cluster signals (canonical
// order) into C(t) with the tilde guard.
std::vector<std::complex<double>> cce_assemble(
    const ClusterSet& clusters,
    const std::vector<std::vector<std::complex<double>>>& signals,
    std::size_t n_times, double tilde_guard, std::int64_t* guard_count);

} // namespace cespin
