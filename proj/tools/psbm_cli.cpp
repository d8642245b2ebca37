// Batch front end: pulse verification, ISI plane scans, PSD dumps, frame
// construction/inspection, spreading-probability tables, and the Monte Carlo
// BER runner. Results are CSV/JSON files plus one manifest per invocation.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage/config error, 3 I/O error.

#include "psbm/ber.hpp"
#include "psbm/isi_map.hpp"
#include "psbm/pulse.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace psbm;

namespace {

constexpr const char* kVersion = "psbm 1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct Manifest {
    std::string command;
    json parameters = json::object();
    std::uint64_t master_seed = 0;
    std::vector<std::string> outputs;
    double duration_seconds = 0.0;

    json to_json(bool with_duration) const {
        json m;
        m["command"] = command;
        m["version"] = kVersion;
        m["parameters"] = parameters;
        m["master_seed"] = master_seed;
        m["outputs"] = outputs;
        if (with_duration)
            m["duration_seconds"] = duration_seconds;
        return m;
    }
};

void write_file(const fs::path& path, const std::string& content, Manifest& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
    manifest.outputs.push_back(path.string());
}

void finalize_manifest(const fs::path& out_dir, Manifest& manifest,
                       std::chrono::steady_clock::time_point t0) {
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream out(out_dir / ("manifest_" + manifest.command + ".json"), std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write manifest");
    out << manifest.to_json(true).dump(2) << "\n";
}

// ---- flat key-value config with [section kind name] headers ----

struct ConfigSection {
    std::string kind; // "experiment", "pair", or "" for the preamble
    std::string name;
    std::map<std::string, std::string> values;
    std::map<std::string, int> lines; // for diagnostics
};

std::vector<ConfigSection> parse_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read config: " + path.string());
    std::vector<ConfigSection> sections;
    sections.push_back({"", "", {}, {}});
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": unterminated section header");
            std::istringstream hs(line.substr(1, line.size() - 2));
            ConfigSection s;
            hs >> s.kind >> s.name;
            if (s.kind.empty())
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": empty section header");
            if (s.name.empty())
                s.name = s.kind;
            sections.push_back(std::move(s));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        sections.back().values[key] = value;
        sections.back().lines[key] = lineno;
    }
    return sections;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ','))
        out.push_back(std::stod(tok));
    return out;
}

// ---- experiment config mapping ----

struct ParsedExperiment {
    SimConfig cfg;
    bool seed_given = false;
};

ParsedExperiment experiment_from_section(const ConfigSection& sec,
                                         std::vector<std::string>& errors) {
    ParsedExperiment pe;
    SimConfig& c = pe.cfg;
    c.name = sec.name;
    auto bad = [&](const std::string& key, const std::string& why) {
        errors.push_back("[" + sec.kind + " " + sec.name + "] " + key + ": " + why);
    };
    for (const auto& [key, value] : sec.values) {
        try {
            if (key == "scheme") {
                if (value == "nyquist") c.scheme = Scheme::nyquist;
                else if (value == "psbm") c.scheme = Scheme::psbm;
                else bad(key, "unknown scheme '" + value + "'");
            } else if (key == "design") {
                if (value == "plain") c.design = SequenceDesign::plain;
                else if (value == "pilot_frame") c.design = SequenceDesign::pilot_frame;
                else if (value == "alternating_pilot") c.design = SequenceDesign::alternating_pilot;
                else if (value == "repetition") c.design = SequenceDesign::repetition;
                else if (value == "spreading") c.design = SequenceDesign::spreading;
                else if (value == "differential") c.design = SequenceDesign::differential;
                else bad(key, "unknown design '" + value + "'");
            } else if (key == "channel") {
                if (value == "awgn") c.channel = Channel::awgn;
                else if (value == "rayleigh_block") c.channel = Channel::rayleigh_block;
                else bad(key, "unknown channel '" + value + "'");
            } else if (key == "csi") {
                if (value == "perfect") c.csi = Csi::perfect;
                else if (value == "estimated") c.csi = Csi::estimated;
                else bad(key, "unknown csi '" + value + "'");
            } else if (key == "detector") {
                if (value == "ml_wmf") c.detector = Detector::ml_wmf;
                else if (value == "ml_plain") c.detector = Detector::ml_plain;
                else if (value == "slicer") c.detector = Detector::slicer;
                else if (value == "sic") c.detector = Detector::sic;
                else if (value == "diff") c.detector = Detector::diff;
                else if (value == "diff_wmf") c.detector = Detector::diff_wmf;
                else if (value == "repetition_combiner") c.detector = Detector::repetition_combiner;
                else bad(key, "unknown detector '" + value + "'");
            } else if (key == "modulation") {
                c.modulation_order = std::stoi(value);
            } else if (key == "Ld") {
                c.Ld = std::stoi(value);
            } else if (key == "Lp") {
                c.Lp = std::stoi(value);
            } else if (key == "snr_db") {
                c.snr_grid_db = parse_double_list(value);
            } else if (key == "min_errors") {
                c.min_errors = std::stol(value);
            } else if (key == "max_bits") {
                c.max_bits = std::stol(value);
            } else if (key == "seed") {
                c.master_seed = std::stoull(value);
                pe.seed_given = true;
            } else if (key == "fading_coherence") {
                c.fading_coherence = std::stoi(value);
            } else if (key == "pilot_amplitude") {
                c.pilot_amplitude = std::stod(value);
            } else if (key == "estimate_refine") {
                c.estimate_refine = (value == "1" || value == "true" || value == "yes");
            } else {
                bad(key, "unknown key");
            }
        } catch (const std::exception&) {
            bad(key, "cannot parse value '" + value + "'");
        }
    }
    return pe;
}

json config_to_json(const SimConfig& c) {
    json j;
    j["name"] = c.name;
    j["scheme"] = to_string(c.scheme);
    j["design"] = to_string(c.design);
    j["channel"] = to_string(c.channel);
    j["csi"] = to_string(c.csi);
    j["detector"] = to_string(c.detector);
    j["modulation"] = c.modulation_order;
    j["Ld"] = c.Ld;
    j["Lp"] = c.Lp;
    j["snr_db"] = c.snr_grid_db;
    j["min_errors"] = c.min_errors;
    j["max_bits"] = c.max_bits;
    j["seed"] = c.master_seed;
    j["fading_coherence"] = c.fading_coherence;
    j["pilot_amplitude"] = c.pilot_amplitude;
    j["estimate_refine"] = c.estimate_refine;
    j["snr_definition"] = "gamma_b = 1/(2 sigma_w^2), Es = 1 per symbol";
    return j;
}

json points_to_json(const BerCurve& curve) {
    json pts = json::array();
    for (const BerPoint& p : curve.points) {
        json e;
        e["snr_db"] = p.snr_db;
        e["bits"] = p.bits_sent;
        e["errors"] = p.bit_errors;
        e["ber"] = p.ber;
        e["ci"] = p.ci_halfwidth;
        pts.push_back(e);
    }
    return pts;
}

std::string csv_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

// ---- commands ----

int cmd_pulse_verify(const std::optional<std::string>& config_path, double d_max,
                     const fs::path& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<int> n_values;
    for (int n = 0; n <= 12; ++n)
        n_values.push_back(n);
    std::vector<double> d_grid;
    if (config_path) {
        for (const auto& sec : parse_config_file(*config_path)) {
            if (sec.values.count("d_max"))
                d_max = std::stod(sec.values.at("d_max"));
            if (sec.values.count("d_grid"))
                d_grid = parse_double_list(sec.values.at("d_grid"));
        }
    }
    if (d_grid.empty())
        for (double d = 0.5; d <= d_max + 1e-9; d += 0.5)
            d_grid.push_back(d);

    Manifest manifest;
    manifest.command = "pulse-verify";
    manifest.parameters["d_max"] = d_max;

    const auto table = truncation_study(n_values, d_grid);
    std::ostringstream csv;
    csv << "n,d,ratio\n";
    for (const auto& row : table)
        csv << row.n << ',' << csv_double(row.d) << ',' << csv_double(row.ratio) << '\n';

    bool all_pass = true;
    std::ostringstream report;
    for (int n : n_values) {
        const double v = pulse_inner_product(1.0, n / 4.0, d_max);
        const double want = lemma1_exact(n);
        const bool pass = std::abs(v - want) <= 1e-3;
        all_pass = all_pass && pass;
        report << "n=" << n << " exact=" << csv_double(want) << " quad=" << csv_double(v)
               << (pass ? " PASS" : " FAIL") << '\n';
    }
    std::cout << report.str();
    try {
        write_file(out_dir / "truncation_study.csv", csv.str(), manifest);
        write_file(out_dir / "pulse_verify_report.txt", report.str(), manifest);
        finalize_manifest(out_dir, manifest, t0);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    std::cout << (all_pass ? "pulse-verify: PASS" : "pulse-verify: FAIL") << " (d_max=" << d_max
              << ")\n";
    return all_pass ? kExitOk : kExitVerifyFail;
}

int cmd_isi_map(const std::optional<std::string>& config_path, const fs::path& out_dir,
                int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    IsiScanConfig cfg = IsiScanConfig::defaults();
    if (config_path) {
        double a0 = 0.0, a1 = 2.0, da = 0.01, t0g = 0.05, t1 = 0.95, dt = 0.01;
        for (const auto& sec : parse_config_file(*config_path)) {
            auto get = [&](const char* k, double& dst) {
                if (sec.values.count(k))
                    dst = std::stod(sec.values.at(k));
            };
            get("alpha_min", a0);
            get("alpha_max", a1);
            get("alpha_step", da);
            get("tau_min", t0g);
            get("tau_max", t1);
            get("tau_step", dt);
            get("d", cfg.trunc_halfwidth);
            if (sec.values.count("max_lag"))
                cfg.max_lag = std::stoi(sec.values.at("max_lag"));
            if (sec.values.count("thresholds"))
                cfg.mu_thresholds = parse_double_list(sec.values.at("thresholds"));
        }
        auto fill_grid = [](double lo, double hi, double step) {
            std::vector<double> g;
            const long n = std::lround((hi - lo) / step);
            for (long i = 0; i <= n; ++i)
                g.push_back(std::min(hi, lo + static_cast<double>(i) * step));
            return g;
        };
        cfg.alpha_grid = fill_grid(a0, a1, da);
        cfg.tau_grid = fill_grid(t0g, t1, dt);
    }
    cfg.threads = threads;
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }

    Manifest manifest;
    manifest.command = "isi-map";
    manifest.parameters["thresholds"] = cfg.mu_thresholds;
    manifest.parameters["d"] = cfg.trunc_halfwidth;

    const IsiCountGrid grid = scan_plane(cfg);
    std::ostringstream csv;
    csv << "alpha,tau,mu,count\n";
    for (std::size_t ai = 0; ai < grid.alphas.size(); ++ai)
        for (std::size_t ti = 0; ti < grid.taus.size(); ++ti)
            for (std::size_t mi = 0; mi < grid.mus.size(); ++mi)
                csv << csv_double(grid.alphas[ai]) << ',' << csv_double(grid.taus[ti]) << ','
                    << csv_double(grid.mus[mi]) << ',' << grid.count(ai, ti, mi) << '\n';

    std::ostringstream summary;
    for (double mu : grid.mus) {
        const auto regions = find_two_tap_regions(grid, mu);
        summary << "mu=" << csv_double(mu) << ": " << regions.size() << " two-tap region(s)\n";
        for (const Region& r : regions) {
            summary << "  alpha [" << csv_double(r.alpha_min) << ", " << csv_double(r.alpha_max)
                    << "] tau [" << csv_double(r.tau_min) << ", " << csv_double(r.tau_max)
                    << "] cells=" << r.cells;
            if (r.contains(1.0, 0.5))
                summary << "  <- contains (1.00, 0.50)";
            if (r.contains(1.07, 0.70) || r.contains(1.07, 0.71))
                summary << "  <- near (1.07, 0.70-0.71)";
            if (r.alpha_max >= 1.65 && r.alpha_min <= 1.85 && r.tau_max >= 0.47 &&
                r.tau_min <= 0.50)
                summary << "  <- near (1.65-1.85, 0.47-0.50)";
            summary << '\n';
        }
    }
    std::cout << summary.str();
    try {
        write_file(out_dir / "isi_map.csv", csv.str(), manifest);
        write_file(out_dir / "isi_map_regions.txt", summary.str(), manifest);
        finalize_manifest(out_dir, manifest, t0);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

int cmd_psd(const std::string& scheme, double alpha, double f_max, double f_step,
            const fs::path& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    Manifest manifest;
    manifest.command = "psd";
    manifest.parameters["scheme"] = scheme;
    manifest.parameters["alpha"] = alpha;

    PulseSpec p;
    p.alpha = scheme == "psbm" ? 1.0 : alpha;
    p.period = scheme == "psbm" ? 2.0 : 1.0;
    const std::vector<cplx> uncorrelated{cplx(1.0, 0.0)};
    std::ostringstream csv;
    csv << "f,psd\n";
    for (double f = -f_max; f <= f_max + 1e-12; f += f_step)
        csv << csv_double(f) << ',' << csv_double(psd(p, uncorrelated, f)) << '\n';
    try {
        write_file(out_dir / ("psd_" + scheme + ".csv"), csv.str(), manifest);
        finalize_manifest(out_dir, manifest, t0);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    std::cout << "spectral efficiency: psbm=" << spectral_efficiency_psbm()
              << " nyquist(alpha=" << alpha << ")=" << spectral_efficiency_nyquist(alpha) << "\n";
    return kExitOk;
}

int cmd_frame(const std::string& design, int Ld, int Lp, std::uint64_t seed, int M,
              const std::optional<std::string>& check_path, const fs::path& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    Manifest manifest;
    manifest.command = "frame";
    manifest.master_seed = seed;
    if (check_path) {
        std::ifstream in(*check_path);
        if (!in) {
            std::cerr << "error: cannot read " << *check_path << "\n";
            return kExitIo;
        }
        try {
            const Frame f = Frame::parse(in);
            std::cout << f.serialize();
            std::cout << "frame: " << f.size() << " positions, valid\n";
        } catch (const std::exception& e) {
            std::cerr << "invalid frame: " << e.what() << "\n";
            return kExitVerifyFail;
        }
        return kExitOk;
    }
    Rng rng(seed);
    const auto alphabet = psk_alphabet(M);
    std::vector<cplx> data;
    for (int i = 0; i < Ld; ++i)
        data.push_back(alphabet[rng.uniform_below(static_cast<std::uint64_t>(M))]);
    Frame f;
    try {
        f = design == "alternating_pilot" ? alternating_pilot_sequence(data, cplx(1.0, 0.0))
                                          : build_frame(Ld, Lp, data, cplx(1.0, 0.0));
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    manifest.parameters["design"] = design;
    manifest.parameters["Ld"] = Ld;
    manifest.parameters["Lp"] = Lp;
    try {
        write_file(out_dir / "frame.txt", f.serialize(), manifest);
        finalize_manifest(out_dir, manifest, t0);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    std::cout << f.serialize();
    return kExitOk;
}

int cmd_spread_prob(const std::optional<std::string>& config_path, int n_max,
                    std::vector<double> kappas, const fs::path& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    if (config_path) {
        for (const auto& sec : parse_config_file(*config_path)) {
            if (sec.values.count("n_max"))
                n_max = std::stoi(sec.values.at("n_max"));
            if (sec.values.count("kappas"))
                kappas = parse_double_list(sec.values.at("kappas"));
        }
    }
    if (n_max < 2) {
        std::cerr << "config error: n_max must be >= 2\n";
        return kExitUsage;
    }
    if (kappas.empty())
        kappas = {0.05, 0.10};
    Manifest manifest;
    manifest.command = "spread-prob";
    manifest.parameters["n_max"] = n_max;
    manifest.parameters["kappas"] = kappas;

    std::ostringstream csv;
    csv << "N,p_exact";
    for (double k : kappas)
        csv << ",p_kappa_" << csv_double(k);
    csv << '\n';
    for (int N = 2; N <= n_max; ++N) {
        csv << N << ',' << csv_double(orthogonality_probability(N));
        for (double k : kappas)
            csv << ',' << csv_double(near_orthogonality_probability(N, k));
        csv << '\n';
    }
    try {
        write_file(out_dir / "spread_prob.csv", csv.str(), manifest);
        finalize_manifest(out_dir, manifest, t0);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

int cmd_ber(const std::string& config_path, const fs::path& out_dir, int threads,
            bool paired, std::optional<std::uint64_t> seed_override) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<ConfigSection> sections;
    try {
        sections = parse_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }

    std::vector<ParsedExperiment> experiments;
    struct PairSpec {
        std::string name, a, b;
        double target_ber = 1e-3;
    };
    std::vector<PairSpec> pairs;
    std::vector<std::string> errors;
    for (const auto& sec : sections) {
        if (sec.kind == "experiment") {
            experiments.push_back(experiment_from_section(sec, errors));
        } else if (sec.kind == "pair") {
            PairSpec p;
            p.name = sec.name;
            if (sec.values.count("a"))
                p.a = sec.values.at("a");
            else
                errors.push_back("[pair " + sec.name + "] missing key 'a'");
            if (sec.values.count("b"))
                p.b = sec.values.at("b");
            else
                errors.push_back("[pair " + sec.name + "] missing key 'b'");
            if (sec.values.count("target_ber"))
                p.target_ber = std::stod(sec.values.at("target_ber"));
            pairs.push_back(p);
        } else if (!sec.kind.empty()) {
            errors.push_back("unknown section kind '" + sec.kind + "'");
        }
    }
    if (experiments.empty())
        errors.push_back("no [experiment ...] sections found");
    for (auto& pe : experiments) {
        if (seed_override) {
            pe.cfg.master_seed = *seed_override;
            pe.seed_given = true;
        }
        if (!pe.seed_given)
            std::cerr << "warning: [experiment " << pe.cfg.name
                      << "] has no seed; using deterministic default 0\n";
        pe.cfg.threads = threads;
        for (const auto& msg : pe.cfg.validate())
            errors.push_back("[experiment " + pe.cfg.name + "] " + msg);
    }
    if (!errors.empty()) {
        std::cerr << "config validation failed:\n";
        for (const auto& e : errors)
            std::cerr << "  " << e << "\n";
        return kExitUsage;
    }

    Manifest manifest;
    manifest.command = "ber";
    manifest.parameters["config"] = config_path;
    manifest.parameters["paired"] = paired;
    manifest.master_seed = experiments.front().cfg.master_seed;

    std::map<std::string, BerCurve> curves;
    try {
        for (const auto& pe : experiments) {
            const BerCurve curve = run_ber(pe.cfg);
            const std::string stem = pe.cfg.name + "_" + to_string(pe.cfg.scheme) + "_" +
                                     to_string(pe.cfg.detector) + "_seed" +
                                     std::to_string(pe.cfg.master_seed);
            write_file(out_dir / (stem + ".csv"), curve.to_csv(), manifest);
            json doc;
            doc["config"] = config_to_json(pe.cfg);
            const ThroughputReport tr = throughput_report(pe.cfg);
            doc["config"]["throughput"] = {{"relative_time", tr.relative_time},
                                           {"symbols_per_ts_psbm", tr.symbols_per_ts_psbm},
                                           {"symbols_per_ts_nyquist", tr.symbols_per_ts_nyquist},
                                           {"overhead_fraction", tr.overhead_fraction}};
            doc["points"] = points_to_json(curve);
            // run identity only; output paths and timing live in the
            // per-invocation manifest file
            doc["manifest"] = {{"command", manifest.command},
                               {"version", kVersion},
                               {"master_seed", pe.cfg.master_seed}};
            write_file(out_dir / (stem + ".json"), doc.dump(2) + "\n", manifest);
            curves.emplace(pe.cfg.name, curve);
            std::cout << "experiment " << pe.cfg.name << ": " << curve.points.size()
                      << " points written\n";
        }
        if (paired) {
            std::ostringstream gaptxt;
            for (const PairSpec& p : pairs) {
                if (!curves.count(p.a) || !curves.count(p.b)) {
                    std::cerr << "pair " << p.name << ": unknown experiment name\n";
                    return kExitUsage;
                }
                try {
                    const double gap = measure_gap(curves.at(p.a), curves.at(p.b), p.target_ber);
                    gaptxt << p.name << ": snr gap of " << p.b << " over " << p.a << " at ber "
                           << csv_double(p.target_ber) << " = " << csv_double(gap) << " dB\n";
                } catch (const std::exception& e) {
                    gaptxt << p.name << ": not measurable (" << e.what() << ")\n";
                }
            }
            std::cout << gaptxt.str();
            if (!pairs.empty())
                write_file(out_dir / "gaps.txt", gaptxt.str(), manifest);
        }
        finalize_manifest(out_dir, manifest, t0);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pulse-shape binary multiplex link simulator"};
    app.set_version_flag("--version", kVersion);
    app.fallthrough(); // global flags may follow the subcommand

    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("--threads", threads, "worker threads (speed only, never results)")
        ->capture_default_str();

    std::optional<std::string> config;
    app.add_option("--config", config, "config file");

    auto* pulse_verify = app.add_subcommand("pulse-verify", "check the closed-form overlaps");
    double d_max = 8.0;
    pulse_verify->add_option("--d-max", d_max, "truncation half-width for the check");

    auto* isi_map = app.add_subcommand("isi-map", "scan the roll-off/packing plane");

    auto* psd_cmd = app.add_subcommand("psd", "power spectral density dump");
    std::string psd_scheme = "psbm";
    double psd_alpha = 1.0, psd_fmax = 1.0, psd_step = 0.01;
    psd_cmd->add_option("--scheme", psd_scheme, "psbm or nyquist");
    psd_cmd->add_option("--alpha", psd_alpha, "roll-off for the nyquist pulse");
    psd_cmd->add_option("--f-max", psd_fmax, "frequency range (cycles per Ts)");
    psd_cmd->add_option("--f-step", psd_step, "frequency step");

    auto* frame_cmd = app.add_subcommand("frame", "build or validate a frame file");
    std::string frame_design = "pilot_frame";
    int frame_Ld = 8, frame_Lp = 1, frame_M = 2;
    std::optional<std::string> frame_check;
    frame_cmd->add_option("--design", frame_design, "pilot_frame or alternating_pilot");
    frame_cmd->add_option("--Ld", frame_Ld, "data group length");
    frame_cmd->add_option("--Lp", frame_Lp, "pilot group length");
    frame_cmd->add_option("--M", frame_M, "PSK order for random data");
    frame_cmd->add_option("--check", frame_check, "validate an existing frame file");

    auto* spread_cmd = app.add_subcommand("spread-prob", "orthogonality probability table");
    int n_max = 64;
    std::vector<double> kappas;
    spread_cmd->add_option("--n-max", n_max, "largest sequence length");
    spread_cmd->add_option("--kappa", kappas, "near-orthogonality thresholds");

    auto* ber_cmd = app.add_subcommand("ber", "Monte Carlo BER experiments");
    bool paired = false;
    ber_cmd->add_flag("--paired", paired, "measure SNR gaps between paired curves");

    app.require_subcommand(1);
    CLI11_PARSE(app, argc, argv);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << out_dir << "\n";
        return kExitIo;
    }

    try {
        if (pulse_verify->parsed())
            return cmd_pulse_verify(config, d_max, out_dir);
        if (isi_map->parsed())
            return cmd_isi_map(config, out_dir, threads);
        if (psd_cmd->parsed())
            return cmd_psd(psd_scheme, psd_alpha, psd_fmax, psd_step, out_dir);
        if (frame_cmd->parsed())
            return cmd_frame(frame_design, frame_Ld, frame_Lp, seed, frame_M, frame_check,
                             out_dir);
        if (spread_cmd->parsed())
            return cmd_spread_prob(config, n_max, kappas, out_dir);
        if (ber_cmd->parsed()) {
            if (!config) {
                std::cerr << "error: ber requires --config\n";
                return kExitUsage;
            }
            return cmd_ber(*config, out_dir, threads,
                           paired, seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
