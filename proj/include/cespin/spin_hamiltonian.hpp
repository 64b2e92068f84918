#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "cespin/crystal.hpp"

namespace cespin {

struct CentralSpinParams {
    double effective_g = 0.0;          // scalar effective g of the chosen site
    Eigen::Vector3d field = Eigen::Vector3d::Zero(); // mT, lab frame
    // Orthonormal right-handed quantization frame with ez = B-hat; secular
    // hyperfine components are expressed in this frame.
    Eigen::Matrix3d frame = Eigen::Matrix3d::Identity(); // rows: ex', ey', ez'
};

// Build the quantization frame for a field direction: ez' = b-hat, ex' the
// stablest axis orthogonalized against it, ey' = ez' x ex'.
Eigen::Matrix3d quantization_frame(const Eigen::Vector3d& field_direction);

CentralSpinParams make_central_spin(double g, const Eigen::Vector3d& field_mT);

// nu = g * (mu_B/h) * B, linear MHz.
double electron_splitting(double g, double field_mT);

// nu_L = gbar * B.
double nuclear_larmor(const SpinSpecies& sp, double field_mT);

// Point-dipole coupling tensor D (MHz) with H_dd = I1 . D . I2,
// D = -(K gbar1 gbar2 / r^3)(3 nhat nhat^T - 1); symmetric, traceless.
// Throws PhysicsError below 0.05 nm.
Eigen::Matrix3d dipolar_tensor(const Eigen::Vector3d& r_nm,
                               double gbar1, double gbar2);

// Electron-nuclear point-dipole hyperfine tensor (MHz) using the effective
// electron gyromagnetic ratio g * mu_B/h.  Throws PhysicsError below 0.1 nm.
Eigen::Matrix3d hyperfine_tensor(const CentralSpinParams& central,
                                 const Eigen::Vector3d& r_nm,
                                 const SpinSpecies& sp);

// Secular row of the hyperfine tensor in the quantization frame:
// (A_zx', A_zy', A_zz') with z' along B.
Eigen::Vector3d secular_hyperfine_row(const CentralSpinParams& central,
                                      const Eigen::Matrix3d& A);

// Angular-momentum matrices for spin I (dimension 2I+1): Ix, Iy, Iz.
struct SpinOperators {
    Eigen::MatrixXcd Ix, Iy, Iz;
    static const SpinOperators& of(double I); // cached per multiplicity
};

struct ClusterHamiltonianPair {
    Eigen::MatrixXcd H_plus, H_minus;  // conditioned on central m_s = +-1/2
    int dim() const { return static_cast<int>(H_plus.rows()); }
};

struct SpinSystem {
    CentralSpinParams central;
    const CrystalSpec* crystal = nullptr;
    BathConfiguration bath;
    std::vector<Eigen::Vector3d> secular_rows; // per bath spin, primed frame
    std::vector<double> larmor;                // per bath spin, MHz
    // Axial quadrupole strength per site class (oct, tet, dod), MHz, applied
    // along the quantization axis: q * (Iz^2 - I(I+1)/3).  No effect on
    // spin-1/2 species (constant shift common to both branches).
    std::array<double, 3> quadrupole_MHz{0.0, 0.0, 0.0};
    int dimension_cap = 1296;
};

// Precompute per-spin hyperfine rows and Larmor frequencies for a bath.
SpinSystem make_spin_system(const CrystalSpec& spec,
                            const CentralSpinParams& central,
                            BathConfiguration bath,
                            int dimension_cap = 1296);

// Conditional cluster Hamiltonians under the secular (pure-dephasing)
// approximation:
//   H_+- = sum_k [ -nu_L,k Iz_k +- 1/2 (A_zx Ix + A_zy Iy + A_zz Iz)_k ]
//        + sum_{k<l} I_k . D'_kl . I_l        (full tensor, primed frame)
// Tensor-product order follows the given member order.  Throws PhysicsError
// when the product dimension exceeds system.dimension_cap.
ClusterHamiltonianPair conditional_cluster_hamiltonian(
    const SpinSystem& system, const std::vector<int>& members);

} // namespace cespin
