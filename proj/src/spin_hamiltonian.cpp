#include "cespin/spin_hamiltonian.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "cespin/constants.hpp"
#include "cespin/errors.hpp"

namespace cespin {

Eigen::Matrix3d quantization_frame(const Eigen::Vector3d& field_direction) {
    double n = field_direction.norm();
    if (n == 0.0) throw ConfigError("quantization frame: zero field direction");
    Eigen::Vector3d ez = field_direction / n;
    Eigen::Vector3d seed = std::abs(ez.z()) < 0.99 ? Eigen::Vector3d(0, 0, 1)
                                                   : Eigen::Vector3d(1, 0, 0);
    Eigen::Vector3d ex = (seed - seed.dot(ez) * ez).normalized();
    Eigen::Vector3d ey = ez.cross(ex);
    Eigen::Matrix3d frame;
    frame.row(0) = ex;
    frame.row(1) = ey;
    frame.row(2) = ez;
    return frame;
}

CentralSpinParams make_central_spin(double g, const Eigen::Vector3d& field_mT) {
    if (g <= 0.0) throw ConfigError("effective g must be positive");
    CentralSpinParams c;
    c.effective_g = g;
    c.field = field_mT;
    c.frame = quantization_frame(field_mT);
    return c;
}

double electron_splitting(double g, double field_mT) {
    if (g <= 0.0) throw ConfigError("effective g must be positive");
    if (field_mT < 0.0) throw ConfigError("field magnitude must be >= 0");
    return g * constants::mu_B_over_h * field_mT;
}

double nuclear_larmor(const SpinSpecies& sp, double field_mT) {
    if (field_mT < 0.0) throw ConfigError("field magnitude must be >= 0");
    return sp.gyromagnetic * field_mT;
}

Eigen::Matrix3d dipolar_tensor(const Eigen::Vector3d& r_nm, double gbar1,
                               double gbar2) {
    double r = r_nm.norm();
    if (r <= 0.05)
        throw PhysicsError("dipolar tensor: separation " + std::to_string(r) +
                           " nm below the 0.05 nm validity floor");
    Eigen::Vector3d n = r_nm / r;
    double scale = constants::dipolar_prefactor * gbar1 * gbar2 / (r * r * r);
    return -scale * (3.0 * n * n.transpose() - Eigen::Matrix3d::Identity());
}

Eigen::Matrix3d hyperfine_tensor(const CentralSpinParams& central,
                                 const Eigen::Vector3d& r_nm,
                                 const SpinSpecies& sp) {
    if (r_nm.norm() <= 0.1)
        throw PhysicsError("hyperfine tensor: separation below 0.1 nm");
    double gbar_e = central.effective_g * constants::mu_B_over_h;
    return dipolar_tensor(r_nm, gbar_e, sp.gyromagnetic);
}

Eigen::Vector3d secular_hyperfine_row(const CentralSpinParams& central,
                                      const Eigen::Matrix3d& A) {
    // z'-row of the tensor in the primed frame: A'_{za} = ez'.A.ea'.
    Eigen::Vector3d ez = central.frame.row(2);
    Eigen::Vector3d row = A.transpose() * ez; // (ez^T A)^T
    return central.frame * row;               // components along ex', ey', ez'
}

const SpinOperators& SpinOperators::of(double I) {
    static std::map<int, SpinOperators> cache;
    static std::mutex mutex;
    double twoI = 2.0 * I;
    if (I < 0.5 || std::abs(twoI - std::round(twoI)) > 1e-9)
        throw ConfigError("spin must be a half-integer >= 1/2");
    int dim = static_cast<int>(std::round(twoI)) + 1;

    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(dim);
    if (it != cache.end()) return it->second;

    SpinOperators ops;
    ops.Ix = Eigen::MatrixXcd::Zero(dim, dim);
    ops.Iy = Eigen::MatrixXcd::Zero(dim, dim);
    ops.Iz = Eigen::MatrixXcd::Zero(dim, dim);
    double spin = 0.5 * (dim - 1);
    for (int a = 0; a < dim; ++a) {
        double m = spin - a; // descending magnetic quantum number
        ops.Iz(a, a) = m;
        if (a + 1 < dim) {
            // <m|I+|m-1> = sqrt(I(I+1) - m(m-1))
            double c = std::sqrt(spin * (spin + 1.0) - m * (m - 1.0));
            ops.Ix(a, a + 1) = 0.5 * c;
            ops.Ix(a + 1, a) = 0.5 * c;
            ops.Iy(a, a + 1) = std::complex<double>(0, -0.5 * c);
            ops.Iy(a + 1, a) = std::complex<double>(0, 0.5 * c);
        }
    }
    return cache.emplace(dim, std::move(ops)).first->second;
}

SpinSystem make_spin_system(const CrystalSpec& spec,
                            const CentralSpinParams& central,
                            BathConfiguration bath, int dimension_cap) {
    SpinSystem sys;
    sys.central = central;
    sys.crystal = &spec;
    sys.bath = std::move(bath);
    sys.dimension_cap = dimension_cap;
    double B = central.field.norm();
    sys.secular_rows.reserve(sys.bath.spins.size());
    sys.larmor.reserve(sys.bath.spins.size());
    for (const auto& s : sys.bath.spins) {
        const SpinSpecies& sp = spec.species[s.species];
        Eigen::Matrix3d A = hyperfine_tensor(
            central, s.position - sys.bath.central_position, sp);
        sys.secular_rows.push_back(secular_hyperfine_row(central, A));
        sys.larmor.push_back(nuclear_larmor(sp, B));
    }
    return sys;
}

ClusterHamiltonianPair conditional_cluster_hamiltonian(
    const SpinSystem& system, const std::vector<int>& members) {
    if (members.empty())
        throw PhysicsError("cluster Hamiltonian: empty cluster");
    const auto& spins = system.bath.spins;
    const auto& species = system.crystal->species;

    long dim = 1;
    for (int idx : members) {
        if (idx < 0 || idx >= static_cast<int>(spins.size()))
            throw PhysicsError("cluster member index out of range");
        dim *= species[spins[idx].species].multiplicity();
        if (dim > system.dimension_cap)
            throw PhysicsError("cluster dimension " + std::to_string(dim) +
                               " exceeds cap " +
                               std::to_string(system.dimension_cap));
    }

    // Embed a single-spin operator at slot k of the tensor product.
    auto embed = [&](int k, const Eigen::MatrixXcd& op) {
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
        for (std::size_t j = 0; j < members.size(); ++j) {
            int dj = species[spins[members[j]].species].multiplicity();
            const Eigen::MatrixXcd& factor =
                (static_cast<int>(j) == k)
                    ? op
                    : Eigen::MatrixXcd::Identity(dj, dj).eval();
            Eigen::MatrixXcd next(out.rows() * factor.rows(),
                                  out.cols() * factor.cols());
            for (int r = 0; r < out.rows(); ++r)
                for (int c = 0; c < out.cols(); ++c)
                    next.block(r * factor.rows(), c * factor.cols(),
                               factor.rows(), factor.cols()) = out(r, c) * factor;
            out = std::move(next);
        }
        return out;
    };

    Eigen::MatrixXcd Hp = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd Hm = Eigen::MatrixXcd::Zero(dim, dim);
    const Eigen::Matrix3d& frame = system.central.frame;

    for (std::size_t j = 0; j < members.size(); ++j) {
        int idx = members[j];
        const auto& ops = SpinOperators::of(species[spins[idx].species].spin);
        Eigen::MatrixXcd Ix = embed(static_cast<int>(j), ops.Ix);
        Eigen::MatrixXcd Iy = embed(static_cast<int>(j), ops.Iy);
        Eigen::MatrixXcd Iz = embed(static_cast<int>(j), ops.Iz);
        const Eigen::Vector3d& a = system.secular_rows[idx];
        Eigen::MatrixXcd zeeman = -system.larmor[idx] * Iz;
        Eigen::MatrixXcd hf = 0.5 * (a.x() * Ix + a.y() * Iy + a.z() * Iz);
        double q = system.quadrupole_MHz[static_cast<int>(spins[idx].site_class)];
        if (q != 0.0) {
            double I = species[spins[idx].species].spin;
            Eigen::MatrixXcd quad =
                q * (Iz * Iz - (I * (I + 1.0) / 3.0) *
                                   Eigen::MatrixXcd::Identity(dim, dim));
            Hp += quad;
            Hm += quad;
        }
        Hp += zeeman + hf;
        Hm += zeeman - hf;

        for (std::size_t l = j + 1; l < members.size(); ++l) {
            int idx2 = members[l];
            const auto& ops2 = SpinOperators::of(species[spins[idx2].species].spin);
            Eigen::Matrix3d D = dipolar_tensor(
                spins[idx2].position - spins[idx].position,
                species[spins[idx].species].gyromagnetic,
                species[spins[idx2].species].gyromagnetic);
            // Express in the quantization frame: D' = F D F^T.
            Eigen::Matrix3d Dp = frame * D * frame.transpose();
            Eigen::MatrixXcd ops_j[3] = {Ix, Iy, Iz};
            Eigen::MatrixXcd ops_l[3] = {embed(static_cast<int>(l), ops2.Ix),
                                         embed(static_cast<int>(l), ops2.Iy),
                                         embed(static_cast<int>(l), ops2.Iz)};
            Eigen::MatrixXcd dd = Eigen::MatrixXcd::Zero(dim, dim);
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c)
                    if (Dp(r, c) != 0.0) dd += Dp(r, c) * (ops_j[r] * ops_l[c]);
            Hp += dd;
            Hm += dd;
        }
    }

    return {std::move(Hp), std::move(Hm)};
}

} // namespace cespin
