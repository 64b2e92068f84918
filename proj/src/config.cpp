#include "cespin/config.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cespin/errors.hpp"

namespace cespin {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == ',') {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

double parse_double_token(const std::string& tok, const std::string& ctx) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ConfigError(ctx + ": cannot parse number '" + tok + "'");
    }
    if (pos != tok.size())
        throw ConfigError(ctx + ": trailing characters in number '" + tok + "'");
    if (!std::isfinite(v)) throw ConfigError(ctx + ": non-finite value");
    return v;
}

long long parse_int_token(const std::string& tok, const std::string& ctx) {
    std::size_t pos = 0;
    long long v;
    try {
        v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
        throw ConfigError(ctx + ": cannot parse integer '" + tok + "'");
    }
    if (pos != tok.size())
        throw ConfigError(ctx + ": trailing characters in integer '" + tok + "'");
    return v;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

SectionedFile SectionedFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

SectionedFile SectionedFile::parse_string(const std::string& text,
                                          const std::string& origin) {
    SectionedFile f;
    f.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string ctx = origin + ":" + std::to_string(lineno);
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(ctx + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(ctx + ": empty section name");
            f.sections_[section];
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(ctx + ": expected 'key = value'");
        if (section.empty())
            throw ConfigError(ctx + ": key outside any [section]");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(ctx + ": empty key");
        auto& sec = f.sections_[section];
        if (sec.count(key))
            throw ConfigError(ctx + ": duplicate key '" + section + "." + key + "'");
        sec[key] = Entry{value, false};
    }
    return f;
}

bool SectionedFile::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string SectionedFile::get(const std::string& section, const std::string& key) {
    auto s = sections_.find(section);
    if (s != sections_.end()) {
        auto k = s->second.find(key);
        if (k != s->second.end()) {
            k->second.consumed = true;
            return k->second.value;
        }
    }
    throw ConfigError(origin_ + ": missing required key '" + section + "." + key + "'");
}

std::string SectionedFile::get_or(const std::string& section,
                                  const std::string& key,
                                  const std::string& fallback) {
    return has(section, key) ? get(section, key) : fallback;
}

double SectionedFile::get_double(const std::string& section,
                                 const std::string& key, double fallback) {
    if (!has(section, key)) return fallback;
    return parse_double_token(get(section, key), origin_ + ": " + section + "." + key);
}

int SectionedFile::get_int(const std::string& section, const std::string& key,
                           int fallback) {
    if (!has(section, key)) return fallback;
    long long v = parse_int_token(get(section, key),
                                  origin_ + ": " + section + "." + key);
    if (v < INT_MIN || v > INT_MAX)
        throw ConfigError(origin_ + ": " + section + "." + key + " out of range");
    return static_cast<int>(v);
}

std::uint64_t SectionedFile::get_u64(const std::string& section,
                                     const std::string& key,
                                     std::uint64_t fallback) {
    if (!has(section, key)) return fallback;
    std::string tok = get(section, key);
    std::string ctx = origin_ + ": " + section + "." + key;
    std::size_t pos = 0;
    unsigned long long v;
    try {
        v = std::stoull(tok, &pos);
    } catch (const std::exception&) {
        throw ConfigError(ctx + ": cannot parse unsigned integer '" + tok + "'");
    }
    if (pos != tok.size())
        throw ConfigError(ctx + ": trailing characters in integer '" + tok + "'");
    return v;
}

bool SectionedFile::get_bool(const std::string& section, const std::string& key,
                             bool fallback) {
    if (!has(section, key)) return fallback;
    std::string v = get(section, key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(origin_ + ": " + section + "." + key +
                      ": expected boolean, got '" + v + "'");
}

std::vector<double> SectionedFile::get_doubles(const std::string& section,
                                               const std::string& key,
                                               const std::vector<double>& fallback) {
    if (!has(section, key)) return fallback;
    std::string ctx = origin_ + ": " + section + "." + key;
    std::vector<double> out;
    for (const auto& tok : split_tokens(get(section, key)))
        out.push_back(parse_double_token(tok, ctx));
    if (out.empty()) throw ConfigError(ctx + ": empty list");
    return out;
}

std::vector<int> SectionedFile::get_ints(const std::string& section,
                                         const std::string& key,
                                         const std::vector<int>& fallback) {
    if (!has(section, key)) return fallback;
    std::string ctx = origin_ + ": " + section + "." + key;
    std::vector<int> out;
    for (const auto& tok : split_tokens(get(section, key))) {
        long long v = parse_int_token(tok, ctx);
        if (v < INT_MIN || v > INT_MAX) throw ConfigError(ctx + ": out of range");
        out.push_back(static_cast<int>(v));
    }
    if (out.empty()) throw ConfigError(ctx + ": empty list");
    return out;
}

std::vector<std::string> SectionedFile::get_strings(
    const std::string& section, const std::string& key,
    const std::vector<std::string>& fallback) {
    if (!has(section, key)) return fallback;
    auto out = split_tokens(get(section, key));
    if (out.empty())
        throw ConfigError(origin_ + ": " + section + "." + key + ": empty list");
    return out;
}

void SectionedFile::override_key(const std::string& dotted,
                                 const std::string& value) {
    std::size_t dot = dotted.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == dotted.size())
        throw ConfigError("override '" + dotted + "' is not of the form section.key");
    std::string section = dotted.substr(0, dot);
    std::string key = dotted.substr(dot + 1);
    sections_[section][key] = Entry{value, false};
}

void SectionedFile::reject_unknown() const {
    std::string bad;
    for (const auto& [sec, keys] : sections_)
        for (const auto& [key, entry] : keys)
            if (!entry.consumed) {
                if (!bad.empty()) bad += ", ";
                bad += sec + "." + key;
            }
    if (!bad.empty())
        throw ConfigError(origin_ + ": unknown key(s): " + bad);
}

std::string SectionedFile::canonical_text() const {
    std::string out;
    for (const auto& [sec, keys] : sections_)
        for (const auto& [key, entry] : keys)
            out += sec + "." + key + "=" + entry.value + "\n";
    return out;
}

namespace {

const char* to_string(Polarization p) {
    switch (p) {
        case Polarization::sigma_plus: return "sigma_plus";
        case Polarization::linear: return "linear";
        case Polarization::elliptical: return "elliptical";
    }
    return "?";
}

Polarization polarization_from_string(const std::string& s) {
    if (s == "sigma_plus") return Polarization::sigma_plus;
    if (s == "linear") return Polarization::linear;
    if (s == "elliptical") return Polarization::elliptical;
    throw ConfigError("unknown polarization '" + s + "'");
}

const char* to_string(NoiseSpectrum::Model m) {
    switch (m) {
        case NoiseSpectrum::Model::lorentzian: return "lorentzian";
        case NoiseSpectrum::Model::hard_cutoff: return "hard_cutoff";
        case NoiseSpectrum::Model::sum: return "sum";
    }
    return "?";
}

template <class T>
std::string join(const std::vector<T>& v,
                 std::string (*fmt)(const T&)) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += " ";
        out += fmt(v[i]);
    }
    return out;
}

// Canonical serialization of every resolved value; this is the config-hash
// input, so defaults are captured too.
std::string serialize(const RunConfig& c, NoiseSpectrum::Model model) {
    std::ostringstream out;
    auto put = [&](const std::string& key, const std::string& value) {
        out << key << "=" << value << "\n";
    };
    put("bath.cutoff_nm", format_double(c.cutoff_nm));
    {
        std::string ex;
        for (std::size_t i = 0; i < c.exclude_classes.size(); ++i) {
            if (i) ex += " ";
            ex += to_string(c.exclude_classes[i]);
        }
        put("bath.exclude_classes", ex);
    }
    put("bath.species", join<std::string>(c.species, +[](const std::string& s) { return s; }));
    put("cce.cpmg_N", std::to_string(c.cpmg_N));
    put("cce.cpmg_N_list", join<int>(c.cpmg_N_list, +[](const int& v) { return std::to_string(v); }));
    put("cce.dimension_cap", std::to_string(c.dimension_cap));
    put("cce.n_times", std::to_string(c.n_times));
    put("cce.order", std::to_string(c.order));
    put("cce.pair_cutoff_nm", format_double(c.pair_cutoff_nm));
    put("cce.quadrupole_MHz", format_double(c.quadrupole_MHz[0]) + " " +
                                  format_double(c.quadrupole_MHz[1]) + " " +
                                  format_double(c.quadrupole_MHz[2]));
    put("cce.sequence", to_string(c.sequence));
    put("cce.t_max_us", format_double(c.t_max_us));
    put("crystal.field_direction", format_double(c.field_direction[0]) + " " +
                                       format_double(c.field_direction[1]) + " " +
                                       format_double(c.field_direction[2]));
    put("crystal.field_mT", format_double(c.field_mT));
    put("crystal.file", c.crystal_file);
    put("crystal.g_site", std::to_string(c.g_site));
    put("fit.input", c.fit_input);
    put("fit.model", c.fit_model);
    put("noise.amplitude", format_double(c.spectrum.amplitude));
    put("noise.delta2", format_double(c.spectrum.delta2));
    put("noise.model", to_string(model));
    put("noise.omega_c", format_double(c.spectrum.omega_c));
    put("noise.rolloff_p", format_double(c.spectrum.rolloff_p));
    put("noise.scan_N", join<int>(c.scan_N, +[](const int& v) { return std::to_string(v); }));
    put("noise.tau_c", format_double(c.spectrum.tau_c));
    put("optics.branching_ratio", format_double(c.optics.branching));
    put("optics.collection", format_double(c.optics.collection));
    put("optics.eps2", format_double(c.optics.eps2));
    put("optics.excited_lifetime_us", format_double(1.0 / c.optics.gamma));
    put("optics.odmr_drive", format_double(c.odmr_drive));
    put("optics.odmr_fwhm_MHz", format_double(c.odmr_fwhm));
    put("optics.odmr_nu0_MHz", format_double(c.odmr_nu0));
    put("optics.pump_rate", format_double(c.optics.pump_rate));
    put("optics.rabi_calibration", format_double(c.rabi_calibration));
    put("optics.rabi_powers", join<double>(c.rabi_powers, +[](const double& v) { return format_double(v); }));
    put("optics.rabi_sigma_delta", format_double(c.rabi_sigma_delta));
    put("optics.spin_T1_us", format_double(c.optics.T1_us));
    put("protocol.eps", format_double(c.protocol.eps));
    put("protocol.gap_us", format_double(c.protocol.gap_us));
    put("protocol.polarization", to_string(c.protocol.polarization));
    put("protocol.pulse_period_us", format_double(c.protocol.pulse_period_us));
    put("protocol.pulses_per_train", std::to_string(c.protocol.pulses_per_train));
    put("protocol.readout_pulses", std::to_string(c.protocol.readout_pulses));
    put("run.out_dir", c.out_dir);
    put("run.seed", std::to_string(c.seed));
    put("run.workers", std::to_string(c.workers));
    put("t1.gaps_us", join<double>(c.t1_gaps_us, +[](const double& v) { return format_double(v); }));
    put("t1.noise", format_double(c.t1_noise));
    return out.str();
}

RunConfig resolve(SectionedFile& f) {
    RunConfig c;

    c.out_dir = f.get_or("run", "out_dir", c.out_dir);
    c.workers = f.get_int("run", "workers", c.workers);
    c.seed = f.get_u64("run", "seed", c.seed);
    if (c.workers < 1) throw ConfigError("run.workers must be >= 1");

    c.crystal_file = f.get_or("crystal", "file", c.crystal_file);
    c.field_mT = f.get_double("crystal", "field_mT", c.field_mT);
    if (f.has("crystal", "field_direction")) {
        auto d = f.get_doubles("crystal", "field_direction", {});
        if (d.size() != 3)
            throw ConfigError("crystal.field_direction needs 3 components");
        c.field_direction = Eigen::Vector3d(d[0], d[1], d[2]);
    }
    c.g_site = f.get_int("crystal", "g_site", c.g_site);
    if (c.field_mT < 0.0) throw ConfigError("crystal.field_mT must be >= 0");
    if (c.field_direction.norm() == 0.0)
        throw ConfigError("crystal.field_direction must be nonzero");
    if (c.g_site < 0 || c.g_site > 5)
        throw ConfigError("crystal.g_site must be in [0, 5]");

    c.cutoff_nm = f.get_double("bath", "cutoff_nm", c.cutoff_nm);
    c.species = f.get_strings("bath", "species", c.species);
    for (const auto& name : f.get_strings("bath", "exclude_classes", {}))
        c.exclude_classes.push_back(site_class_from_string(name));
    if (c.cutoff_nm <= 0.0) throw ConfigError("bath.cutoff_nm must be > 0");

    c.order = f.get_int("cce", "order", c.order);
    c.pair_cutoff_nm = f.get_double("cce", "pair_cutoff_nm", c.pair_cutoff_nm);
    c.dimension_cap = f.get_int("cce", "dimension_cap", c.dimension_cap);
    c.sequence = sequence_kind_from_string(
        f.get_or("cce", "sequence", to_string(c.sequence)));
    c.cpmg_N = f.get_int("cce", "cpmg_N", c.cpmg_N);
    c.cpmg_N_list = f.get_ints("cce", "cpmg_N_list", c.cpmg_N_list);
    c.t_max_us = f.get_double("cce", "t_max_us", c.t_max_us);
    c.n_times = f.get_int("cce", "n_times", c.n_times);
    {
        std::vector<double> q(c.quadrupole_MHz.begin(), c.quadrupole_MHz.end());
        q = f.get_doubles("cce", "quadrupole_MHz", q);
        if (q.size() != 3)
            throw ConfigError("cce.quadrupole_MHz needs 3 values (oct tet dod)");
        std::copy(q.begin(), q.end(), c.quadrupole_MHz.begin());
    }
    if (c.order < 1 || c.order > 2) throw ConfigError("cce.order must be 1 or 2");
    if (c.pair_cutoff_nm < 0.0) throw ConfigError("cce.pair_cutoff_nm must be >= 0");
    if (c.dimension_cap < 4) throw ConfigError("cce.dimension_cap too small");
    if (c.cpmg_N < 1) throw ConfigError("cce.cpmg_N must be >= 1");
    for (int n : c.cpmg_N_list)
        if (n < 1) throw ConfigError("cce.cpmg_N_list entries must be >= 1");
    if (c.t_max_us <= 0.0) throw ConfigError("cce.t_max_us must be > 0");
    if (c.n_times < 2) throw ConfigError("cce.n_times must be >= 2");

    std::string model = f.get_or("noise", "model", "lorentzian");
    double delta2 = f.get_double("noise", "delta2", 25.0);
    double tau_c = f.get_double("noise", "tau_c", 500.0);
    double amplitude = f.get_double("noise", "amplitude", 5.0);
    double omega_c = f.get_double("noise", "omega_c", 0.2);
    double rolloff = f.get_double("noise", "rolloff_p", 6.0);
    NoiseSpectrum::Model m;
    if (model == "lorentzian") {
        c.spectrum = NoiseSpectrum::lorentzian(delta2, tau_c);
        c.spectrum.amplitude = amplitude;
        c.spectrum.omega_c = omega_c;
        c.spectrum.rolloff_p = rolloff;
        m = NoiseSpectrum::Model::lorentzian;
    } else if (model == "hard_cutoff") {
        c.spectrum = NoiseSpectrum::hard_cutoff(amplitude, omega_c, rolloff);
        c.spectrum.delta2 = delta2;
        c.spectrum.tau_c = tau_c;
        m = NoiseSpectrum::Model::hard_cutoff;
    } else if (model == "sum") {
        c.spectrum = NoiseSpectrum::lorentzian(delta2, tau_c);
        NoiseSpectrum hc = NoiseSpectrum::hard_cutoff(amplitude, omega_c, rolloff);
        c.spectrum.model = NoiseSpectrum::Model::sum;
        c.spectrum.amplitude = hc.amplitude;
        c.spectrum.omega_c = hc.omega_c;
        c.spectrum.rolloff_p = hc.rolloff_p;
        m = NoiseSpectrum::Model::sum;
    } else {
        throw ConfigError("noise.model must be lorentzian, hard_cutoff, or sum");
    }
    c.scan_N = f.get_ints("noise", "scan_N", c.scan_N);

    c.optics.pump_rate = f.get_double("optics", "pump_rate", c.optics.pump_rate);
    c.optics.branching = f.get_double("optics", "branching_ratio", c.optics.branching);
    double lifetime = f.get_double("optics", "excited_lifetime_us", 1.0 / c.optics.gamma);
    if (lifetime <= 0.0) throw ConfigError("optics.excited_lifetime_us must be > 0");
    c.optics.gamma = 1.0 / lifetime;
    c.optics.T1_us = f.get_double("optics", "spin_T1_us", c.optics.T1_us);
    c.optics.eps2 = f.get_double("optics", "eps2", c.optics.eps2);
    c.optics.collection = f.get_double("optics", "collection", c.optics.collection);
    c.odmr_nu0 = f.get_double("optics", "odmr_nu0_MHz", c.odmr_nu0);
    c.odmr_fwhm = f.get_double("optics", "odmr_fwhm_MHz", c.odmr_fwhm);
    c.odmr_drive = f.get_double("optics", "odmr_drive", c.odmr_drive);
    c.rabi_calibration = f.get_double("optics", "rabi_calibration", c.rabi_calibration);
    c.rabi_sigma_delta = f.get_double("optics", "rabi_sigma_delta", c.rabi_sigma_delta);
    c.rabi_powers = f.get_doubles("optics", "rabi_powers", c.rabi_powers);

    c.protocol.pulses_per_train =
        f.get_int("protocol", "pulses_per_train", c.protocol.pulses_per_train);
    c.protocol.pulse_period_us =
        f.get_double("protocol", "pulse_period_us", c.protocol.pulse_period_us);
    c.protocol.gap_us = f.get_double("protocol", "gap_us", c.protocol.gap_us);
    c.protocol.readout_pulses =
        f.get_int("protocol", "readout_pulses", c.protocol.readout_pulses);
    c.protocol.polarization = polarization_from_string(
        f.get_or("protocol", "polarization", to_string(c.protocol.polarization)));
    c.protocol.eps = f.get_double("protocol", "eps", c.protocol.eps);

    std::vector<double> default_gaps;
    for (int i = 0; i < 12; ++i) {
        double frac = 0.02 * std::pow(250.0, i / 11.0); // 0.02 T1 .. 5 T1
        default_gaps.push_back(frac * c.optics.T1_us);
    }
    c.t1_gaps_us = f.get_doubles("t1", "gaps_us", default_gaps);
    c.t1_noise = f.get_double("t1", "noise", c.t1_noise);
    for (double g : c.t1_gaps_us)
        if (g < 0.0) throw ConfigError("t1.gaps_us entries must be >= 0");
    if (c.t1_noise < 0.0) throw ConfigError("t1.noise must be >= 0");

    c.fit_model = f.get_or("fit", "model", c.fit_model);
    c.fit_input = f.get_or("fit", "input", c.fit_input);

    f.reject_unknown();
    c.resolved_text = serialize(c, m);
    return c;
}

} // namespace

RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides) {
    SectionedFile f = path.empty() ? SectionedFile::parse_string("", "<defaults>")
                                   : SectionedFile::parse_file(path);
    for (const auto& ov : overrides) {
        std::size_t eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + ov + "' is not of the form section.key=value");
        f.override_key(ov.substr(0, eq), ov.substr(eq + 1));
    }
    RunConfig cfg = resolve(f);
    if (!path.empty())
        cfg.config_dir = std::filesystem::path(path).parent_path().string();
    return cfg;
}

RunConfig default_run_config() { return load_run_config(""); }

} // namespace cespin
