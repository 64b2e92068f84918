#include "cespin/crystal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cespin/constants.hpp"
#include "cespin/errors.hpp"

namespace cespin {

const char* to_string(SiteClass c) {
    switch (c) {
        case SiteClass::octahedral: return "octahedral";
        case SiteClass::tetrahedral: return "tetrahedral";
        case SiteClass::dodecahedral: return "dodecahedral";
    }
    return "?";
}

SiteClass site_class_from_string(const std::string& s) {
    if (s == "octahedral") return SiteClass::octahedral;
    if (s == "tetrahedral") return SiteClass::tetrahedral;
    if (s == "dodecahedral") return SiteClass::dodecahedral;
    throw ConfigError("unknown site class '" + s + "'");
}

int CrystalSpec::species_index(const std::string& name) const {
    for (std::size_t i = 0; i < species.size(); ++i)
        if (species[i].name == name) return static_cast<int>(i);
    return -1;
}

namespace {

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

double parse_double(const std::string& s, const std::string& ctx) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("crystal file: cannot parse number '" + s + "' in " + ctx);
    }
}

} // namespace

CrystalSpec load_crystal_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open crystal file '" + path + "'");

    CrystalSpec spec;
    std::string line, section;
    int lineno = 0;
    bool has_g_direction = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        auto toks = tokens(line);
        if (toks.empty()) continue;
        const std::string ctx = path + ":" + std::to_string(lineno);

        if (toks.size() == 1 && toks[0].front() == '[' && toks[0].back() == ']') {
            section = toks[0].substr(1, toks[0].size() - 2);
            if (section != "lattice" && section != "species" &&
                section != "sites" && section != "site_g")
                throw ConfigError("crystal file: unknown section [" + section +
                                  "] at " + ctx);
            continue;
        }
        if (section == "lattice") {
            if (toks.size() == 3 && toks[0] == "a_nm" && toks[1] == "=")
                spec.a_nm = parse_double(toks[2], ctx);
            else
                throw ConfigError("crystal file: expected 'a_nm = <value>' at " + ctx);
        } else if (section == "species") {
            if (toks.size() != 4)
                throw ConfigError("crystal file: species line needs "
                                  "'name I gamma abundance' at " + ctx);
            SpinSpecies sp;
            sp.name = toks[0];
            sp.spin = parse_double(toks[1], ctx);
            sp.gyromagnetic = parse_double(toks[2], ctx);
            sp.abundance = parse_double(toks[3], ctx);
            double twoI = 2.0 * sp.spin;
            if (sp.spin < 0.5 || std::abs(twoI - std::round(twoI)) > 1e-9)
                throw ConfigError("crystal file: spin must be a half-integer >= 1/2"
                                  " for species '" + sp.name + "' at " + ctx);
            if (sp.abundance < 0.0 || sp.abundance > 1.0)
                throw ConfigError("crystal file: abundance outside [0,1] at " + ctx);
            spec.species.push_back(sp);
        } else if (section == "sites") {
            if (toks.size() != 5)
                throw ConfigError("crystal file: site line needs "
                                  "'fx fy fz species class' at " + ctx);
            CrystalSite site;
            for (int k = 0; k < 3; ++k) {
                site.frac[k] = parse_double(toks[k], ctx);
                if (site.frac[k] < 0.0 || site.frac[k] >= 1.0)
                    throw ConfigError("crystal file: fractional coordinate outside"
                                      " [0,1) at " + ctx);
            }
            site.species = spec.species_index(toks[3]);
            if (site.species < 0)
                throw ConfigError("crystal file: unknown species '" + toks[3] +
                                  "' at " + ctx + " (species must precede sites)");
            site.site_class = site_class_from_string(toks[4]);
            spec.sites.push_back(site);
        } else if (section == "site_g") {
            if (toks[0] == "direction" && toks.size() == 5 && toks[1] == "=") {
                for (int k = 0; k < 3; ++k)
                    spec.g_direction[k] = parse_double(toks[2 + k], ctx);
                if (spec.g_direction.norm() == 0.0)
                    throw ConfigError("crystal file: zero g direction at " + ctx);
                spec.g_direction.normalize();
                has_g_direction = true;
            } else if (toks[0] == "g" && toks.size() >= 3 && toks[1] == "=") {
                for (std::size_t k = 2; k < toks.size(); ++k)
                    spec.site_g.push_back(parse_double(toks[k], ctx));
            } else {
                throw ConfigError("crystal file: expected 'direction = x y z' or "
                                  "'g = ...' at " + ctx);
            }
        } else {
            throw ConfigError("crystal file: content before any section at " + ctx);
        }
    }

    if (spec.a_nm <= 0.0)
        throw ConfigError("crystal file: missing or non-positive lattice constant");
    if (spec.sites.empty())
        throw ConfigError("crystal file: empty site list");
    if (!spec.site_g.empty()) {
        if (!has_g_direction)
            throw ConfigError("crystal file: [site_g] g values without direction");
        if (spec.site_g.size() != 6)
            throw ConfigError("crystal file: [site_g] needs exactly 6 g values");
        for (double g : spec.site_g)
            if (g <= 0.0) throw ConfigError("crystal file: g values must be > 0");
    }
    return spec;
}

Eigen::Vector3d default_central_position(const CrystalSpec& spec) {
    bool found = false;
    Eigen::Vector3d best = Eigen::Vector3d::Zero();
    double best_d2 = 0.0;
    for (const auto& s : spec.sites) {
        if (s.site_class != SiteClass::dodecahedral) continue;
        Eigen::Vector3d pos = s.frac * spec.a_nm;
        double d2 = pos.squaredNorm();
        auto less = [&](const Eigen::Vector3d& a, double a2,
                        const Eigen::Vector3d& b, double b2) {
            if (a2 != b2) return a2 < b2;
            if (a.x() != b.x()) return a.x() < b.x();
            if (a.y() != b.y()) return a.y() < b.y();
            return a.z() < b.z();
        };
        if (!found || less(pos, d2, best, best_d2)) {
            best = pos;
            best_d2 = d2;
            found = true;
        }
    }
    if (!found)
        throw PhysicsError("crystal has no dodecahedral site for the central ion");
    return best;
}

BathConfiguration generate_bath(const CrystalSpec& spec,
                                const Eigen::Vector3d& center,
                                double cutoff,
                                const std::vector<std::string>& species_filter,
                                const std::vector<SiteClass>& exclude_classes) {
    if (cutoff < 0.0) throw ConfigError("bath cutoff must be >= 0");

    std::vector<int> keep_species;
    for (const auto& name : species_filter) {
        int idx = spec.species_index(name);
        if (idx < 0)
            throw ConfigError("bath species '" + name + "' not in crystal file");
        keep_species.push_back(idx);
    }
    auto kept = [&](int sp) {
        return std::find(keep_species.begin(), keep_species.end(), sp) !=
               keep_species.end();
    };
    auto excluded = [&](SiteClass c) {
        return std::find(exclude_classes.begin(), exclude_classes.end(), c) !=
               exclude_classes.end();
    };

    const double a = spec.a_nm;
    // Enough periodic images to cover the cutoff sphere around the center.
    int n_lo[3], n_hi[3];
    double images = 1.0;
    for (int k = 0; k < 3; ++k) {
        n_lo[k] = static_cast<int>(std::floor((center[k] - cutoff) / a)) - 1;
        n_hi[k] = static_cast<int>(std::ceil((center[k] + cutoff) / a)) + 1;
        images *= n_hi[k] - n_lo[k] + 1;
    }
    if (images * static_cast<double>(spec.sites.size()) > 8e7)
        throw ConfigError("bath cutoff " + std::to_string(cutoff) +
                          " nm exceeds the replication memory budget");

    BathConfiguration bath;
    bath.central_position = center;
    bath.cutoff_radius = cutoff;
    const double cut2 = cutoff * cutoff;
    for (int ix = n_lo[0]; ix <= n_hi[0]; ++ix)
        for (int iy = n_lo[1]; iy <= n_hi[1]; ++iy)
            for (int iz = n_lo[2]; iz <= n_hi[2]; ++iz)
                for (const auto& s : spec.sites) {
                    if (!kept(s.species) || excluded(s.site_class)) continue;
                    Eigen::Vector3d pos =
                        (s.frac + Eigen::Vector3d(ix, iy, iz)) * a;
                    double d2 = (pos - center).squaredNorm();
                    if (d2 > cut2 || d2 == 0.0) continue;
                    bath.spins.push_back(
                        {pos, s.species, s.site_class, std::sqrt(d2)});
                }

    // Sort on a quantized center-relative key: deterministic, and invariant
    // under lattice translations of the center (absolute coordinates are
    // not -- equal-distance shells would reorder).  Quantization sits far
    // above fp noise and far below any site separation.
    auto sort_key = [&center](const BathSpin& s) {
        Eigen::Vector3d r = s.position - center;
        return std::array<long long, 4>{
            std::llround(s.distance * 1e6), std::llround(r.x() * 1e9),
            std::llround(r.y() * 1e9), std::llround(r.z() * 1e9)};
    };
    std::sort(bath.spins.begin(), bath.spins.end(),
              [&](const BathSpin& p, const BathSpin& q) {
                  return sort_key(p) < sort_key(q);
              });

    for (std::size_t i = 1; i < bath.spins.size(); ++i)
        if ((bath.spins[i].position - bath.spins[i - 1].position).norm() <=
            1e-4)
            throw PhysicsError("bath contains overlapping sites");
    return bath;
}

std::array<double, 6> SiteFrameSet::resonance_MHz(double field_mT) const {
    std::array<double, 6> out{};
    for (int i = 0; i < 6; ++i)
        out[i] = effective_g[i] * constants::mu_B_over_h * field_mT;
    return out;
}

SiteFrameSet site_frames(const CrystalSpec& spec,
                         const Eigen::Vector3d& lab_field_direction) {
    if (lab_field_direction.norm() == 0.0)
        throw ConfigError("site_frames: zero-length field direction");
    if (spec.site_g.size() != 6)
        throw ConfigError("crystal file carries no [site_g] table");
    Eigen::Vector3d dir = lab_field_direction.normalized();
    // The stored effective-g table is only valid for the direction it was
    // derived for (the measured resonances fix g along that axis only).
    if (std::abs(dir.dot(spec.g_direction)) < std::cos(0.5 * M_PI / 180.0))
        throw PhysicsError(
            "effective g table in the crystal file is valid for direction [" +
            std::to_string(spec.g_direction.x()) + " " +
            std::to_string(spec.g_direction.y()) + " " +
            std::to_string(spec.g_direction.z()) +
            "] only; requested direction differs");

    // D2 orientations: local z along a <001> axis, local x along a <110>
    // face diagonal, y = z cross x (right-handed).
    const double s = 1.0 / std::sqrt(2.0);
    const Eigen::Vector3d zs[3] = {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
    const Eigen::Vector3d xs[6] = {{s, s, 0},  {-s, s, 0}, {0, s, s},
                                   {0, -s, s}, {s, 0, s},  {-s, 0, s}};
    SiteFrameSet set;
    for (int i = 0; i < 6; ++i) {
        Eigen::Vector3d z = zs[i / 2];
        Eigen::Vector3d x = xs[i];
        Eigen::Vector3d y = z.cross(x);
        Eigen::Matrix3d R;
        R.row(0) = x;
        R.row(1) = y;
        R.row(2) = z;
        set.frames[i] = R;
        set.effective_g[i] = spec.site_g[i];
    }
    return set;
}

} // namespace cespin
