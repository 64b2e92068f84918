#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI/CLI.hpp>
#include <nlohmann/json.hpp>

#include "cespin/cce.hpp"
#include "cespin/config.hpp"
#include "cespin/constants.hpp"
#include "cespin/crystal.hpp"
#include "cespin/errors.hpp"
#include "cespin/fitting.hpp"
#include "cespin/noise.hpp"
#include "cespin/optics.hpp"
#include "cespin/output.hpp"
#include "cespin/pulse.hpp"
#include "cespin/spin_hamiltonian.hpp"

namespace {

using namespace cespin;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string now_iso8601() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out.push_back(a + (b - a) * i / (n - 1));
    return out;
}

RunManifest make_manifest(const RunConfig& cfg) {
    RunManifest m;
    m.tool_version = tool_version();
    m.timestamp = now_iso8601();
    m.config_hash = fnv1a64(cfg.resolved_text);
    return m;
}

void add_output(RunManifest& m, const std::string& path, std::size_t rows) {
    m.outputs.push_back({path, fnv1a64_file(path), rows});
}

void finish(RunManifest& m, const RunConfig& cfg) {
    m.write(cfg.out_dir + "/manifest.json");
}

CrystalSpec load_crystal(const RunConfig& cfg) {
    return load_crystal_spec(cfg.crystal_file);
}

CentralSpinParams central_from_config(const RunConfig& cfg,
                                      const CrystalSpec& spec) {
    SiteFrameSet frames = site_frames(spec, cfg.field_direction);
    double g = frames.effective_g[static_cast<std::size_t>(cfg.g_site)];
    Eigen::Vector3d B = cfg.field_direction.normalized() * cfg.field_mT;
    return make_central_spin(g, B);
}

int sequence_N(const RunConfig& cfg) {
    switch (cfg.sequence) {
        case SequenceKind::ramsey: return 0;
        case SequenceKind::hahn: return 1;
        case SequenceKind::cpmg: return cfg.cpmg_N;
    }
    return 1;
}

int cmd_bath(const RunConfig& cfg) {
    CrystalSpec spec = load_crystal(cfg);
    Eigen::Vector3d center = default_central_position(spec);
    BathConfiguration bath =
        generate_bath(spec, center, cfg.cutoff_nm, cfg.species, cfg.exclude_classes);

    CsvColumn x{"x(nm)", {}}, y{"y(nm)", {}}, z{"z(nm)", {}},
        d{"distance(nm)", {}}, sp{"species(index)", {}}, cls{"class(index)", {}};
    for (const auto& s : bath.spins) {
        x.values.push_back(s.position[0]);
        y.values.push_back(s.position[1]);
        z.values.push_back(s.position[2]);
        d.values.push_back(s.distance);
        sp.values.push_back(s.species);
        cls.values.push_back(static_cast<double>(s.site_class));
    }
    std::string path = cfg.out_dir + "/bath.csv";
    write_csv(path, {x, y, z, d, sp, cls});

    RunManifest m = make_manifest(cfg);
    add_output(m, path, bath.spins.size());
    m.extra.emplace_back("bath_size", std::to_string(bath.spins.size()));
    m.extra.emplace_back("central_x_nm", fmt(center[0]));
    m.extra.emplace_back("central_y_nm", fmt(center[1]));
    m.extra.emplace_back("central_z_nm", fmt(center[2]));
    finish(m, cfg);
    std::cout << "bath: " << bath.spins.size() << " spins within " << cfg.cutoff_nm
              << " nm -> " << path << "\n";
    return 0;
}

int cmd_cce(const RunConfig& cfg, bool dump_clusters) {
    CrystalSpec spec = load_crystal(cfg);
    CentralSpinParams central = central_from_config(cfg, spec);
    BathConfiguration bath =
        generate_bath(spec, default_central_position(spec), cfg.cutoff_nm,
                      cfg.species, cfg.exclude_classes);
    SpinSystem system = make_spin_system(spec, central, std::move(bath),
                                         cfg.dimension_cap);
    system.quadrupole_MHz = cfg.quadrupole_MHz;

    std::vector<double> times;
    for (int i = 1; i <= cfg.n_times; ++i)
        times.push_back(cfg.t_max_us * i / cfg.n_times);
    PulseSequence seq = build_sequence(cfg.sequence, sequence_N(cfg), cfg.t_max_us);

    CceOptions opts;
    opts.order = cfg.order;
    opts.pair_cutoff = cfg.pair_cutoff_nm;
    opts.workers = cfg.workers;
    opts.dump_clusters = dump_clusters;
    CceResult res = compute_coherence(system, seq, times, opts);

    CsvColumn t{"time(us)", res.curve.times}, re{"coherence_re", {}},
        im{"coherence_im", {}}, ab{"coherence_abs", {}};
    for (const auto& v : res.curve.values) {
        re.values.push_back(v.real());
        im.values.push_back(v.imag());
        ab.values.push_back(std::abs(v));
    }
    std::string name = cfg.sequence == SequenceKind::ramsey ? "ramsey"
                       : cfg.sequence == SequenceKind::hahn
                           ? "hahn_echo"
                           : "cpmg" + std::to_string(cfg.cpmg_N) + "_echo";
    std::string path = cfg.out_dir + "/" + name + ".csv";
    write_csv(path, {t, re, im, ab});

    RunManifest m = make_manifest(cfg);
    add_output(m, path, res.curve.times.size());
    for (const auto& [k, v] : res.curve.metadata) m.extra.emplace_back(k, v);
    m.extra.emplace_back("guard_activations", std::to_string(res.guard_activations));

    if (dump_clusters) {
        CsvColumn ci{"cluster(index)", {}}, sz{"size", {}}, ia{"member_a", {}},
            ib{"member_b", {}}, fin{"abs_L_final", {}}, mn{"abs_L_min", {}};
        std::vector<Cluster> all = res.clusters.singles;
        all.insert(all.end(), res.clusters.pairs.begin(), res.clusters.pairs.end());
        for (std::size_t c = 0; c < all.size(); ++c) {
            const auto& sig = res.cluster_signals[c];
            double minabs = 1.0;
            for (const auto& v : sig) minabs = std::min(minabs, std::abs(v));
            ci.values.push_back(static_cast<double>(c));
            sz.values.push_back(static_cast<double>(all[c].size()));
            ia.values.push_back(all[c][0]);
            ib.values.push_back(all[c].size() > 1 ? all[c][1] : -1.0);
            fin.values.push_back(std::abs(sig.back()));
            mn.values.push_back(minabs);
        }
        std::string cpath = cfg.out_dir + "/clusters.csv";
        write_csv(cpath, {ci, sz, ia, ib, fin, mn});
        add_output(m, cpath, all.size());
    }

    double t2 = one_over_e_time(res.curve.times, ab.values);
    if (t2 > 0.0) m.extra.emplace_back("T2_1e_us", fmt(t2));
    try {
        StretchedFit fit = fit_stretched_exponential(res.curve.times, ab.values);
        m.extra.emplace_back("T2_fit_us", fmt(fit.T2));
        m.extra.emplace_back("stretch_k", fmt(fit.k));
        std::cout << "cce: T2 = " << fmt(fit.T2) << " us, k = " << fmt(fit.k)
                  << " -> " << path << "\n";
    } catch (const std::exception&) {
        std::cout << "cce: curve written (stretched fit not applicable) -> "
                  << path << "\n";
    }
    finish(m, cfg);
    return 0;
}

int cmd_filter(const RunConfig& cfg) {
    int N = sequence_N(cfg);
    double t2 = t2_from_spectrum(cfg.spectrum, cfg.sequence, N);
    std::vector<double> times = linspace(t2 / 30.0, 2.5 * t2, 60);
    SpectrumCoherence sc =
        coherence_from_spectrum(cfg.spectrum, cfg.sequence, N, times);

    std::string path = cfg.out_dir + "/filter_coherence.csv";
    write_csv(path, {{"time(us)", sc.times}, {"chi", sc.chi}, {"W", sc.W}});

    // Filter function sampled at the sequence's 1/e time, out to well past
    // the pass band at omega ~ pi N / t.
    PulseSequence seq = build_sequence(cfg.sequence, N, t2);
    std::vector<double> omega =
        linspace(0.0, 8.0 * M_PI * std::max(N, 1) / t2, 400);
    std::vector<double> F(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i)
        F[i] = filter_function(seq, omega[i], t2);
    std::string fpath = cfg.out_dir + "/filter_function.csv";
    write_csv(fpath, {{"omega(rad/us)", omega}, {"F", F}});

    RunManifest m = make_manifest(cfg);
    add_output(m, path, sc.times.size());
    add_output(m, fpath, omega.size());
    m.extra.emplace_back("T2_us", fmt(t2));
    finish(m, cfg);
    std::cout << "filter: T2 = " << fmt(t2) << " us -> " << path << "\n";
    return 0;
}

int cmd_scan(const RunConfig& cfg) {
    ScalingScan scan = scaling_exponent_scan(cfg.spectrum, cfg.scan_N);
    CsvColumn n{"N", {}}, t2{"T2(us)", {}};
    for (std::size_t i = 0; i < scan.N.size(); ++i) {
        n.values.push_back(scan.N[i]);
        t2.values.push_back(scan.T2[i]);
    }
    std::string path = cfg.out_dir + "/t2_scaling.csv";
    write_csv(path, {n, t2});

    RunManifest m = make_manifest(cfg);
    add_output(m, path, scan.N.size());
    m.extra.emplace_back("alpha", fmt(scan.alpha));
    m.extra.emplace_back("prefactor", fmt(scan.prefactor));
    finish(m, cfg);
    std::cout << "scan: T2(N) ~ N^" << fmt(scan.alpha) << " -> " << path << "\n";
    return 0;
}

int cmd_pump(const RunConfig& cfg) {
    FluorescenceTrace trace = simulate_protocol(cfg.protocol, cfg.optics);
    std::string path = cfg.out_dir + "/pump_trace.csv";
    write_csv(path, {{"time(us)", trace.times}, {"rate(photons_per_s)", trace.rate}});

    RunManifest m = make_manifest(cfg);
    add_output(m, path, trace.times.size());
    double fidelity = steady_state_fidelity(cfg.optics);
    double contrast = initialization_contrast(cfg.protocol, cfg.optics);
    m.extra.emplace_back("steady_state_fidelity", fmt(fidelity));
    m.extra.emplace_back("initialization_contrast", fmt(contrast));
    finish(m, cfg);
    std::cout << "pump: fidelity = " << fmt(fidelity) << ", contrast = "
              << fmt(contrast) << " -> " << path << "\n";
    return 0;
}

int cmd_odmr(const RunConfig& cfg) {
    std::vector<double> freqs =
        linspace(cfg.odmr_nu0 - 5.0 * cfg.odmr_fwhm,
                 cfg.odmr_nu0 + 5.0 * cfg.odmr_fwhm, 201);
    OdmrSpectrum spec =
        odmr_sweep(freqs, cfg.odmr_nu0, cfg.odmr_fwhm, cfg.odmr_drive, cfg.optics);
    std::string path = cfg.out_dir + "/odmr.csv";
    write_csv(path, {{"frequency(MHz)", spec.freq_MHz},
                     {"rate(photons_per_s)", spec.rate}});

    RunManifest m = make_manifest(cfg);
    add_output(m, path, freqs.size());
    LorentzianFit fit = fit_lorentzian(spec.freq_MHz, spec.rate);
    m.extra.emplace_back("center_MHz", fmt(fit.center));
    m.extra.emplace_back("fwhm_MHz", fmt(fit.fwhm));
    m.extra.emplace_back("height", fmt(fit.height));
    m.extra.emplace_back("baseline", fmt(fit.baseline));
    finish(m, cfg);
    std::cout << "odmr: center = " << fmt(fit.center) << " MHz, fwhm = "
              << fmt(fit.fwhm) << " MHz -> " << path << "\n";
    return 0;
}

int cmd_rabi(const RunConfig& cfg) {
    RunManifest m = make_manifest(cfg);
    std::vector<double> powers, freqs;
    for (std::size_t k = 0; k < cfg.rabi_powers.size(); ++k) {
        double P = cfg.rabi_powers[k];
        if (P <= 0.0) throw ConfigError("rabi powers must be > 0");
        double omega = cfg.rabi_calibration * std::sqrt(P);
        std::vector<double> durations = linspace(0.0, 3.0 / omega, 121);
        RabiTrace trace = rabi_trace(P, durations, cfg.rabi_calibration,
                                     cfg.rabi_sigma_delta, cfg.protocol, cfg.optics);
        std::string path =
            cfg.out_dir + "/rabi_power" + std::to_string(k) + ".csv";
        write_csv(path, {{"duration(us)", trace.durations_us},
                         {"signal(photons)", trace.signal},
                         {"population", trace.population}});
        add_output(m, path, durations.size());

        DampedCosineFit fit = fit_damped_cosine(trace.durations_us, trace.signal);
        powers.push_back(P);
        freqs.push_back(std::abs(fit.frequency));
        m.extra.emplace_back("rabi_MHz_power" + std::to_string(k),
                             fmt(std::abs(fit.frequency)));
    }
    std::string fpath = cfg.out_dir + "/rabi_frequencies.csv";
    write_csv(fpath, {{"power", powers}, {"frequency(MHz)", freqs}});
    add_output(m, fpath, powers.size());

    if (powers.size() >= 2) {
        PowerLawFit law = fit_power_law(powers, freqs);
        m.extra.emplace_back("power_exponent", fmt(law.exponent));
        m.extra.emplace_back("calibration_MHz", fmt(law.prefactor));
        std::cout << "rabi: Omega ~ P^" << fmt(law.exponent) << ", c = "
                  << fmt(law.prefactor) << " MHz -> " << fpath << "\n";
    } else {
        std::cout << "rabi: single power, f = " << fmt(freqs[0]) << " MHz -> "
                  << fpath << "\n";
    }
    finish(m, cfg);
    return 0;
}

int cmd_t1(const RunConfig& cfg) {
    RecoveryCurve curve = t1_protocol_curve(cfg.t1_gaps_us, cfg.protocol, cfg.optics);
    std::vector<double> signal = curve.signal;
    if (cfg.t1_noise > 0.0)
        signal = poisson_noisify(signal, cfg.t1_noise, cfg.seed);

    std::string path = cfg.out_dir + "/t1_recovery.csv";
    write_csv(path, {{"gap(us)", curve.gaps_us}, {"signal(photons)", signal}});

    RunManifest m = make_manifest(cfg);
    add_output(m, path, signal.size());
    RecoveryFit fit = fit_exponential_recovery(curve.gaps_us, signal);
    m.extra.emplace_back("T1_fit_us", fmt(fit.T1));
    m.extra.emplace_back("T1_input_us", fmt(cfg.optics.T1_us));
    finish(m, cfg);
    std::cout << "t1: fitted T1 = " << fmt(fit.T1) << " us (input "
              << fmt(cfg.optics.T1_us) << ") -> " << path << "\n";
    return 0;
}

int cmd_fit(const RunConfig& cfg) {
    if (cfg.fit_input.empty())
        throw ConfigError("fit: set fit.input to a CSV path");
    CsvTable tab = read_csv(cfg.fit_input);
    if (tab.columns.size() < 2)
        throw ConfigError("fit: input needs at least two columns");
    const std::vector<double>& x = tab.columns[0];
    const std::vector<double>& y = tab.columns[1];

    RunManifest m = make_manifest(cfg);
    std::vector<double> yfit(x.size());
    nlohmann::ordered_json jfit;
    jfit["model"] = cfg.fit_model;
    jfit["input"] = cfg.fit_input;
    if (cfg.fit_model == "power_law") {
        PowerLawFit law = fit_power_law(x, y);
        for (std::size_t i = 0; i < x.size(); ++i)
            yfit[i] = law.prefactor * std::pow(x[i], law.exponent);
        m.extra.emplace_back("exponent", fmt(law.exponent));
        m.extra.emplace_back("prefactor", fmt(law.prefactor));
        m.extra.emplace_back("residual_norm", fmt(law.residual_norm));
        jfit["parameters"] = {{"prefactor", law.prefactor},
                              {"exponent", law.exponent}};
        jfit["residual_norm"] = law.residual_norm;
        jfit["converged"] = true;
        jfit["iterations"] = 0;
        jfit["ill_conditioned"] = false;
        std::cout << "fit: y = " << fmt(law.prefactor) << " * x^"
                  << fmt(law.exponent) << "\n";
    } else {
        FitModel model;
        FitResult detail;
        if (cfg.fit_model == "stretched_exponential") {
            model = model_stretched_exponential();
            detail = fit_stretched_exponential(x, y).detail;
        } else if (cfg.fit_model == "lorentzian") {
            model = model_lorentzian();
            detail = fit_lorentzian(x, y).detail;
        } else if (cfg.fit_model == "exponential_recovery") {
            model = model_exponential_recovery();
            detail = fit_exponential_recovery(x, y).detail;
        } else if (cfg.fit_model == "damped_cosine") {
            model = model_damped_cosine();
            detail = fit_damped_cosine(x, y).detail;
        } else {
            throw ConfigError("fit: unknown model '" + cfg.fit_model + "'");
        }
        Eigen::VectorXd f(static_cast<Eigen::Index>(x.size()));
        Eigen::MatrixXd J(static_cast<Eigen::Index>(x.size()), detail.params.size());
        model.eval(detail.params, x, f, J);
        for (std::size_t i = 0; i < x.size(); ++i)
            yfit[i] = f[static_cast<Eigen::Index>(i)];
        std::cout << "fit (" << cfg.fit_model << "):";
        for (std::size_t j = 0; j < model.names.size(); ++j) {
            m.extra.emplace_back(model.names[j],
                                 fmt(detail.params[static_cast<Eigen::Index>(j)]));
            std::cout << " " << model.names[j] << " = "
                      << fmt(detail.params[static_cast<Eigen::Index>(j)]);
        }
        std::cout << "\n";
        m.extra.emplace_back("residual_norm", fmt(detail.residual_norm));
        m.extra.emplace_back("ill_conditioned",
                             detail.ill_conditioned ? "true" : "false");
        nlohmann::ordered_json params;
        for (std::size_t j = 0; j < model.names.size(); ++j)
            params[model.names[j]] = detail.params[static_cast<Eigen::Index>(j)];
        jfit["parameters"] = params;
        jfit["residual_norm"] = detail.residual_norm;
        jfit["converged"] = detail.converged;
        jfit["iterations"] = detail.iterations;
        jfit["ill_conditioned"] = detail.ill_conditioned;
        if (detail.covariance.size() > 0) {
            nlohmann::ordered_json cov = nlohmann::json::array();
            for (Eigen::Index r = 0; r < detail.covariance.rows(); ++r) {
                nlohmann::ordered_json row = nlohmann::json::array();
                for (Eigen::Index c = 0; c < detail.covariance.cols(); ++c)
                    row.push_back(detail.covariance(r, c));
                cov.push_back(row);
            }
            jfit["covariance"] = cov;
        }
    }
    std::string path = cfg.out_dir + "/fit_curve.csv";
    write_csv(path, {{tab.column_names[0], x}, {tab.column_names[1], y},
                     {"model", yfit}});
    add_output(m, path, x.size());
    std::string jpath = cfg.out_dir + "/fit_result.json";
    {
        std::ofstream os(jpath);
        if (!os) throw IoError("cannot open " + jpath);
        os << jfit.dump(2) << "\n";
        if (!os) throw IoError("failed writing " + jpath);
    }
    add_output(m, jpath, 1);
    finish(m, cfg);
    return 0;
}

int cmd_constants(const RunConfig& cfg) {
    std::cout << "mu_B/h   = " << fmt(constants::mu_B_over_h) << " MHz/mT\n"
              << "mu_N/h   = " << fmt(constants::mu_N_over_h) << " MHz/mT\n"
              << "K_dd     = " << fmt(constants::dipolar_prefactor)
              << " MHz nm^3 (MHz/mT)^-2\n"
              << "g_e      = " << fmt(constants::g_electron) << "\n";
    CrystalSpec spec = load_crystal(cfg);
    std::cout << "lattice a = " << fmt(spec.a_nm) << " nm, field = "
              << fmt(cfg.field_mT) << " mT\n";
    for (const auto& sp : spec.species)
        std::cout << sp.name << ": I = " << sp.spin << ", gbar = "
                  << fmt(sp.gyromagnetic) << " MHz/mT, nu_L = "
                  << fmt(sp.gyromagnetic * cfg.field_mT) << " MHz\n";
    SiteFrameSet frames = site_frames(spec, cfg.field_direction);
    auto res = frames.resonance_MHz(cfg.field_mT);
    for (int i = 0; i < 6; ++i)
        std::cout << "site " << i << ": g_eff = " << fmt(frames.effective_g[i])
                  << ", resonance = " << fmt(res[i]) << " MHz\n";

    RunManifest m = make_manifest(cfg);
    for (int i = 0; i < 6; ++i)
        m.extra.emplace_back("resonance_MHz_site" + std::to_string(i), fmt(res[i]));
    finish(m, cfg);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Central-spin coherence and optical-pumping toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int workers = 0;
    std::uint64_t seed = 0;
    bool seed_set = false, dump_clusters = false;
    std::vector<std::string> overrides;

    const std::vector<std::string> names = {"bath", "cce",  "filter", "scan",
                                            "pump", "odmr", "rabi",   "t1",
                                            "fit",  "constants"};
    const std::vector<std::string> descs = {
        "enumerate the nuclear bath around the defect",
        "cluster-expansion coherence curve",
        "filter-function coherence from a noise spectrum",
        "T2(N) scaling scan over CPMG orders",
        "optical pumping pulse-train fluorescence",
        "steady-state ODMR sweep",
        "optically read Rabi oscillations vs power",
        "pump/wait/readout T1 recovery",
        "fit a named model to a two-column CSV",
        "print physical constants and site resonances"};
    for (std::size_t i = 0; i < names.size(); ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("--config", config_path, "run configuration file");
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--workers", workers, "worker threads");
        sub->add_option("--seed", seed, "noise-injection RNG seed")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--set", overrides,
                        "override a config key, section.key=value (repeatable)");
        if (names[i] == "cce")
            sub->add_flag("--dump-clusters", dump_clusters,
                          "also write per-cluster signal summaries");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::vector<std::string> effective;
        if (const char* env = std::getenv("CESPIN_OUT"); env && *env)
            effective.push_back(std::string("run.out_dir=") + env);
        for (const auto& ov : overrides) effective.push_back(ov);
        if (!out_dir.empty()) effective.push_back("run.out_dir=" + out_dir);
        if (workers > 0) effective.push_back("run.workers=" + std::to_string(workers));
        if (seed_set) effective.push_back("run.seed=" + std::to_string(seed));

        RunConfig cfg = load_run_config(config_path, effective);
        std::error_code ec;
        std::filesystem::create_directories(cfg.out_dir, ec);
        if (ec) throw IoError("cannot create output directory '" + cfg.out_dir +
                              "': " + ec.message());

        const std::string* cmd = nullptr;
        for (const auto& n : names)
            if (app.got_subcommand(n)) cmd = &n;
        if (!cmd) throw ConfigError("no subcommand selected");

        if (*cmd == "bath") return cmd_bath(cfg);
        if (*cmd == "cce") return cmd_cce(cfg, dump_clusters);
        if (*cmd == "filter") return cmd_filter(cfg);
        if (*cmd == "scan") return cmd_scan(cfg);
        if (*cmd == "pump") return cmd_pump(cfg);
        if (*cmd == "odmr") return cmd_odmr(cfg);
        if (*cmd == "rabi") return cmd_rabi(cfg);
        if (*cmd == "t1") return cmd_t1(cfg);
        if (*cmd == "fit") return cmd_fit(cfg);
        if (*cmd == "constants") return cmd_constants(cfg);
        throw ConfigError("unhandled subcommand");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const PhysicsError& e) {
        std::cerr << "physics error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
