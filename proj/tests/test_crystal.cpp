#include <doctest/doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "cespin/crystal.hpp"
#include "cespin/errors.hpp"

using namespace cespin;

namespace {

const CrystalSpec& yag() {
    static CrystalSpec spec = load_crystal_spec("data/yag.crystal");
    return spec;
}

std::string write_temp(const std::string& text) {
    static int counter = 0;
    auto path = std::filesystem::temp_directory_path() /
                ("crystal_test_" + std::to_string(++counter) + ".txt");
    std::ofstream os(path);
    os << text;
    return path.string();
}

} // namespace

TEST_CASE("crystal file loads with expected cell content") {
    const CrystalSpec& spec = yag();
    CHECK(spec.a_nm == doctest::Approx(1.2008));
    REQUIRE(spec.species.size() == 2);
    CHECK(spec.species_index("27Al") == 0);
    CHECK(spec.species_index("89Y") == 1);
    CHECK(spec.species_index("1H") == -1);
    CHECK(spec.species[0].spin == doctest::Approx(2.5));
    CHECK(spec.species[0].multiplicity() == 6);
    CHECK(spec.species[1].multiplicity() == 2);

    int oct = 0, tet = 0, dod = 0;
    for (const auto& s : spec.sites) {
        if (s.site_class == SiteClass::octahedral) ++oct;
        if (s.site_class == SiteClass::tetrahedral) ++tet;
        if (s.site_class == SiteClass::dodecahedral) ++dod;
    }
    CHECK(oct == 16);  // Wyckoff 16a
    CHECK(tet == 24);  // Wyckoff 24d
    CHECK(dod == 24);  // Wyckoff 24c
    for (const auto& s : spec.sites) {
        CHECK(s.frac.minCoeff() >= 0.0);
        CHECK(s.frac.maxCoeff() < 1.0);
    }
}

TEST_CASE("bath density matches 40 Al per cell") {
    const CrystalSpec& spec = yag();
    double cutoff = 3.0;
    BathConfiguration bath = generate_bath(spec, default_central_position(spec),
                                           cutoff, {"27Al"});
    double volume = 4.0 / 3.0 * M_PI * cutoff * cutoff * cutoff;
    double density = bath.spins.size() / volume;
    double expected = 40.0 / spec.cell_volume();
    CHECK(std::abs(density - expected) < 1.0);
}

TEST_CASE("bath enumeration matches a brute-force supercell") {
    const CrystalSpec& spec = yag();
    Eigen::Vector3d center = default_central_position(spec);
    double cutoff = 1.0;
    BathConfiguration bath = generate_bath(spec, center, cutoff, {"27Al"});

    std::vector<Eigen::Vector3d> brute;
    for (int ix = -2; ix <= 2; ++ix)
        for (int iy = -2; iy <= 2; ++iy)
            for (int iz = -2; iz <= 2; ++iz)
                for (const auto& s : spec.sites) {
                    if (spec.species[s.species].name != "27Al") continue;
                    Eigen::Vector3d p =
                        spec.a_nm * (s.frac + Eigen::Vector3d(ix, iy, iz));
                    double d = (p - center).norm();
                    if (d > 0.0 && d <= cutoff) brute.push_back(p);
                }
    REQUIRE(bath.spins.size() == brute.size());
    // Same multiset of positions.
    auto key = [](const Eigen::Vector3d& p) {
        return std::array<long long, 3>{llround(p.x() * 1e9),
                                        llround(p.y() * 1e9),
                                        llround(p.z() * 1e9)};
    };
    std::multiset<std::array<long long, 3>> a, b;
    for (const auto& s : bath.spins) a.insert(key(s.position));
    for (const auto& p : brute) b.insert(key(p));
    CHECK(a == b);
}

TEST_CASE("bath is sorted, excludes the center, and respects the cutoff") {
    const CrystalSpec& spec = yag();
    BathConfiguration bath =
        generate_bath(spec, default_central_position(spec), 2.0, {"27Al"});
    REQUIRE(!bath.spins.empty());
    for (std::size_t i = 1; i < bath.spins.size(); ++i)
        CHECK(bath.spins[i].distance >= bath.spins[i - 1].distance - 1e-9);
    CHECK(bath.spins.front().distance > 0.0);
    CHECK(bath.spins.back().distance <= 2.0);
}

TEST_CASE("bath translation invariance under a lattice vector") {
    const CrystalSpec& spec = yag();
    Eigen::Vector3d c0 = default_central_position(spec);
    Eigen::Vector3d c1 = c0 + spec.a_nm * Eigen::Vector3d(1, 0, 0);
    BathConfiguration b0 = generate_bath(spec, c0, 1.5, {"27Al"});
    BathConfiguration b1 = generate_bath(spec, c1, 1.5, {"27Al"});
    REQUIRE(b0.spins.size() == b1.spins.size());
    for (std::size_t i = 0; i < b0.spins.size(); ++i) {
        Eigen::Vector3d r0 = b0.spins[i].position - c0;
        Eigen::Vector3d r1 = b1.spins[i].position - c1;
        CHECK((r0 - r1).norm() < 1e-9);
        CHECK(b0.spins[i].species == b1.spins[i].species);
    }
}

TEST_CASE("class exclusion removes exactly that class") {
    const CrystalSpec& spec = yag();
    Eigen::Vector3d c = default_central_position(spec);
    BathConfiguration full = generate_bath(spec, c, 1.8, {"27Al"});
    BathConfiguration no_oct =
        generate_bath(spec, c, 1.8, {"27Al"}, {SiteClass::octahedral});
    BathConfiguration no_tet =
        generate_bath(spec, c, 1.8, {"27Al"}, {SiteClass::tetrahedral});
    for (const auto& s : no_oct.spins)
        CHECK(s.site_class != SiteClass::octahedral);
    for (const auto& s : no_tet.spins)
        CHECK(s.site_class != SiteClass::tetrahedral);
    CHECK(no_oct.spins.size() + no_tet.spins.size() == full.spins.size());
}

TEST_CASE("default central position sits on a dodecahedral site") {
    const CrystalSpec& spec = yag();
    Eigen::Vector3d c = default_central_position(spec);
    bool found = false;
    for (const auto& s : spec.sites)
        if (s.site_class == SiteClass::dodecahedral &&
            (spec.a_nm * s.frac - c).norm() < 1e-12)
            found = true;
    CHECK(found);
}

TEST_CASE("site frames are orthonormal and right-handed") {
    const CrystalSpec& spec = yag();
    SiteFrameSet frames = site_frames(spec, Eigen::Vector3d(1, 1, 0));
    for (const auto& R : frames.frames) {
        CHECK((R * R.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-12);
        CHECK(R.determinant() == doctest::Approx(1.0).epsilon(1e-12));
        // local z along a cube axis, local x along a face diagonal
        Eigen::Vector3d z = R.row(2);
        CHECK(z.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
        Eigen::Vector3d x = R.row(0).cwiseAbs();
        std::vector<double> comps{x[0], x[1], x[2]};
        std::sort(comps.begin(), comps.end());
        CHECK(comps[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(comps[2] == doctest::Approx(1.0 / std::sqrt(2.0)));
    }
}

TEST_CASE("qubit site has its local y axis along the field") {
    const CrystalSpec& spec = yag();
    SiteFrameSet frames = site_frames(spec, Eigen::Vector3d(1, 1, 0));
    Eigen::Vector3d b = Eigen::Vector3d(1, 1, 0).normalized();
    // Site index 1 carries g = 0.948 (the 650 MHz line at 49 mT): the field
    // lies along its local +-y axis.
    CHECK(frames.effective_g[1] == doctest::Approx(0.948));
    Eigen::Vector3d y1 = frames.frames[1].row(1);
    CHECK(std::abs(std::abs(y1.dot(b)) - 1.0) < 1e-12);
    auto res = frames.resonance_MHz(49.0);
    CHECK(res[1] == doctest::Approx(650.0).epsilon(0.01));
}

TEST_CASE("site frames reject a direction without a stored g table") {
    const CrystalSpec& spec = yag();
    CHECK_THROWS_AS((void)site_frames(spec, Eigen::Vector3d(0, 0, 1)),
                    PhysicsError);
}

TEST_CASE("crystal loader rejects bad input") {
    CHECK_THROWS_AS((void)load_crystal_spec("data/nonexistent.crystal"), IoError);

    CHECK_THROWS_AS(
        (void)load_crystal_spec(write_temp("[lattice]\na_nm = -3\n")),
        ConfigError);

    // site referencing an unknown species
    std::string text =
        "[lattice]\na_nm = 1.2\n"
        "[species]\n27Al 2.5 0.0111 1.0\n"
        "[sites]\n0 0 0 31P octahedral\n";
    CHECK_THROWS_AS((void)load_crystal_spec(write_temp(text)), ConfigError);

    // fractional coordinate out of range
    std::string text2 =
        "[lattice]\na_nm = 1.2\n"
        "[species]\n27Al 2.5 0.0111 1.0\n"
        "[sites]\n0 0 1.25 27Al octahedral\n";
    CHECK_THROWS_AS((void)load_crystal_spec(write_temp(text2)), ConfigError);
}

TEST_CASE("generate_bath validates inputs") {
    const CrystalSpec& spec = yag();
    Eigen::Vector3d c = default_central_position(spec);
    CHECK_THROWS_AS((void)generate_bath(spec, c, -1.0, {"27Al"}), ConfigError);
    CHECK_THROWS_AS((void)generate_bath(spec, c, 1.0, {"31P"}), ConfigError);
}
