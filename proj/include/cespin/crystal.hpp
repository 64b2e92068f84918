#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace cespin {

enum class SiteClass { octahedral, tetrahedral, dodecahedral };

const char* to_string(SiteClass c);
SiteClass site_class_from_string(const std::string& s);

struct SpinSpecies {
    std::string name;
    double spin;                // I, half-integer >= 1/2
    double gyromagnetic;        // MHz/mT, linear frequency convention
    double abundance;           // [0, 1]
    int multiplicity() const { return static_cast<int>(2.0 * spin + 1.5); }
};

struct CrystalSite {
    Eigen::Vector3d frac;       // fractional coordinates in [0, 1)^3
    int species;                // index into species table
    SiteClass site_class;
};

struct CrystalSpec {
    double a_nm = 0.0;          // cubic lattice constant
    std::vector<SpinSpecies> species;
    std::vector<CrystalSite> sites;
    // Effective Ce g-values per magnetically inequivalent orientation,
    // valid only for lab field along g_direction.
    Eigen::Vector3d g_direction = Eigen::Vector3d::Zero();
    std::vector<double> site_g;

    double cell_volume() const { return a_nm * a_nm * a_nm; }
    int species_index(const std::string& name) const; // -1 if absent
};

// Parse and validate the sectioned text format ([lattice], [species],
// [sites], [site_g]).  Throws IoError if unreadable, ConfigError on
// schema/invariant violations.
CrystalSpec load_crystal_spec(const std::string& path);

struct BathSpin {
    Eigen::Vector3d position;   // nm, lab frame
    int species;
    SiteClass site_class;
    double distance;            // |position - central| in nm
};

struct BathConfiguration {
    Eigen::Vector3d central_position; // nm
    std::vector<BathSpin> spins;      // sorted by (distance, x, y, z)
    double cutoff_radius = 0.0;       // nm
};

// Default Ce substitution site: the dodecahedral site whose home-cell
// Cartesian position is nearest the cell origin (ties broken
// lexicographically).  Deterministic.
Eigen::Vector3d default_central_position(const CrystalSpec& spec);

// Enumerate lattice sites of the filtered species within `cutoff` of
// `center` over enough periodic images to cover the sphere.  Sites whose
// class appears in `exclude_classes` are dropped (used for the
// octahedral/tetrahedral deletion studies).  Canonical ordering: by
// distance, then lexicographic position.
BathConfiguration generate_bath(const CrystalSpec& spec,
                                const Eigen::Vector3d& center,
                                double cutoff,
                                const std::vector<std::string>& species_filter,
                                const std::vector<SiteClass>& exclude_classes = {});

struct SiteFrameSet {
    std::array<Eigen::Matrix3d, 6> frames; // rows = local x,y,z axes in lab coords
    std::array<double, 6> effective_g;
    std::array<double, 6> resonance_MHz(double field_mT) const;
};

// Six D2 orientation frames (fixed convention: local z along a <001> cube
// axis, local x along a <110> face diagonal, y = z cross x) with the
// per-site effective g stored in the crystal file.  The stored g table is
// only valid for the file's `direction`; a mismatching lab direction is a
// PhysicsError.
SiteFrameSet site_frames(const CrystalSpec& spec,
                         const Eigen::Vector3d& lab_field_direction);

} // namespace cespin
