#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cespin/crystal.hpp"
#include "cespin/noise.hpp"
#include "cespin/optics.hpp"
#include "cespin/pulse.hpp"

namespace cespin {

// Sectioned key=value text file ('#' comments).  Every key consumed is
// checked off; leftover keys are ConfigErrors (typo protection).
class SectionedFile {
public:
    static SectionedFile parse_file(const std::string& path);
    static SectionedFile parse_string(const std::string& text,
                                      const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key);
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback);
    double get_double(const std::string& section, const std::string& key,
                      double fallback);
    int get_int(const std::string& section, const std::string& key, int fallback);
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback);
    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback);
    std::vector<double> get_doubles(const std::string& section,
                                    const std::string& key,
                                    const std::vector<double>& fallback);
    std::vector<int> get_ints(const std::string& section, const std::string& key,
                              const std::vector<int>& fallback);
    std::vector<std::string> get_strings(const std::string& section,
                                         const std::string& key,
                                         const std::vector<std::string>& fallback);

    void override_key(const std::string& dotted, const std::string& value);
    // Throws ConfigError naming every never-consumed key.
    void reject_unknown() const;
    // Canonical "section.key=value" lines, sorted; input to the config hash.
    std::string canonical_text() const;

private:
    struct Entry { std::string value; mutable bool consumed = false; };
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::string origin_;
};

struct RunConfig {
    // [run]
    std::string out_dir = "out";
    int workers = 1;
    std::uint64_t seed = 1;
    // [crystal]
    std::string crystal_file = "data/yag.crystal";
    double field_mT = 49.0;
    Eigen::Vector3d field_direction = Eigen::Vector3d(1, 1, 0);
    int g_site = 1;              // index into the crystal file's g table
    // [bath]
    double cutoff_nm = 2.5;
    std::vector<std::string> species = {"27Al"};
    std::vector<SiteClass> exclude_classes;
    // [cce]
    int order = 2;
    double pair_cutoff_nm = 0.6;
    int dimension_cap = 1296;
    std::array<double, 3> quadrupole_MHz{0.0, 0.0, 0.0}; // oct, tet, dod
    SequenceKind sequence = SequenceKind::hahn;
    int cpmg_N = 1;
    std::vector<int> cpmg_N_list = {1, 4, 8, 16, 32};
    double t_max_us = 1.5;
    int n_times = 60;
    // [noise]
    NoiseSpectrum spectrum = NoiseSpectrum::lorentzian(25.0, 500.0);
    std::vector<int> scan_N = {1, 2, 4, 8, 16, 32};
    // [optics]
    OpticalParams optics;
    PulseTrainProtocol protocol;
    double odmr_nu0 = 650.0;     // MHz
    double odmr_fwhm = 12.0;     // MHz
    double odmr_drive = 0.02;    // w0, 1/us
    double rabi_calibration = 10.0; // MHz per sqrt(power unit)
    double rabi_sigma_delta = 0.0;  // MHz; 0 = no inhomogeneous averaging
    std::vector<double> rabi_powers = {0.04, 0.16, 1.0, 4.0};
    // [t1]
    std::vector<double> t1_gaps_us;  // default derived from optics.T1_us
    double t1_noise = 0.0;           // relative Poisson sigma, 0 = noiseless
    // [fit]
    std::string fit_model = "stretched_exponential";
    std::string fit_input;

    std::string resolved_text;   // canonical text after overrides (hash input)
    std::string config_dir;      // directory of the source file; not hashed
};

RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides = {});
RunConfig default_run_config();

} // namespace cespin
