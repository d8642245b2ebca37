// End-to-end checks of the command-line tool: exit codes, output files,
// config validation diagnostics, and byte-identical reruns.
//
// argv[1] = path to the psbm binary, argv[2] = presets directory.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
    if (!ok) {
        std::printf("    FAIL %s\n", what.c_str());
        ++g_failures;
    }
}

int run(const std::string& cmd) {
    const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::printf("usage: test_cli <psbm-binary> <presets-dir>\n");
        return 2;
    }
    const std::string bin = argv[1];
    const fs::path presets = argv[2];
    const fs::path work = fs::temp_directory_path() / "psbm_cli_test";
    fs::remove_all(work);
    fs::create_directories(work);

    // pulse verification passes at d = 8 and fails at d = 1
    check(run(bin + " pulse-verify --d-max 8 --out " + (work / "pv8").string()) == 0,
          "pulse-verify d=8 exits 0");
    check(fs::exists(work / "pv8" / "truncation_study.csv"), "truncation CSV written");
    check(fs::exists(work / "pv8" / "manifest_pulse-verify.json"), "manifest written");
    check(run(bin + " pulse-verify --d-max 1 --out " + (work / "pv1").string()) == 1,
          "pulse-verify d=1 exits 1 (verification failure)");

    // fig2 preset drives the same command
    check(run(bin + " pulse-verify --config " + (presets / "fig2.cfg").string() + " --out " +
              (work / "pv_cfg").string()) == 0,
          "pulse-verify with fig2 preset");

    // frame: build then validate the produced file
    check(run(bin + " frame --design alternating_pilot --Ld 5 --seed 3 --out " +
              (work / "frame").string()) == 0,
          "frame build exits 0");
    check(run(bin + " frame --check " + (work / "frame" / "frame.txt").string() + " --out " +
              (work / "frame2").string()) == 0,
          "frame --check accepts its own output");
    {
        std::ofstream bad(work / "bad_frame.txt");
        bad << "zero,1.0,0.0\n"; // a zero-role position carrying a value
    }
    check(run(bin + " frame --check " + (work / "bad_frame.txt").string() + " --out " +
              (work / "frame3").string()) == 1,
          "frame --check rejects an invalid file");

    // spreading probabilities via the fig5 preset
    check(run(bin + " spread-prob --config " + (presets / "fig5.cfg").string() + " --out " +
              (work / "sp").string()) == 0,
          "spread-prob with fig5 preset");
    {
        const std::string csv = slurp(work / "sp" / "spread_prob.csv");
        check(csv.find("N,p_exact,p_kappa_0.05,p_kappa_0.1") == 0, "spread CSV header");
        check(csv.find("\n4,0.375,") != std::string::npos, "N=4 exact probability row");
    }

    // psd dump
    check(run(bin + " psd --scheme psbm --out " + (work / "psd").string()) == 0, "psd runs");
    check(fs::exists(work / "psd" / "psd_psbm.csv"), "psd CSV written");

    // a small isi-map config
    {
        std::ofstream cfg(work / "map.cfg");
        cfg << "alpha_min = 0.95\nalpha_max = 1.05\nalpha_step = 0.01\n"
               "tau_min = 0.45\ntau_max = 0.55\ntau_step = 0.01\n"
               "thresholds = 0.05,0.01\n";
    }
    check(run(bin + " isi-map --config " + (work / "map.cfg").string() + " --out " +
              (work / "map").string()) == 0,
          "isi-map runs on a small grid");
    check(slurp(work / "map" / "isi_map_regions.txt").find("contains (1.00, 0.50)") !=
              std::string::npos,
          "region summary flags the half-packed point");

    // ber: a tiny two-experiment config with a gap pair
    {
        std::ofstream cfg(work / "ber.cfg");
        cfg << "[experiment nyq]\nscheme = nyquist\ndesign = plain\nchannel = awgn\n"
               "csi = perfect\ndetector = slicer\nmodulation = 2\nLd = 8\n"
               "snr_db = 0,2,4,6\nmin_errors = 150\nmax_bits = 500000\nseed = 5\n\n"
               "[experiment nyq_shift]\nscheme = nyquist\ndesign = plain\nchannel = awgn\n"
               "csi = perfect\ndetector = slicer\nmodulation = 2\nLd = 8\n"
               "snr_db = 0,2,4,6,8,10\nmin_errors = 150\nmax_bits = 500000\nseed = 5\n\n"
               "[pair demo]\na = nyq\nb = nyq_shift\ntarget_ber = 1e-2\n";
    }
    check(run(bin + " ber --config " + (work / "ber.cfg").string() + " --paired --out " +
              (work / "ber1").string()) == 0,
          "ber command runs");
    check(fs::exists(work / "ber1" / "nyq_nyquist_slicer_seed5.csv"), "ber CSV written");
    check(fs::exists(work / "ber1" / "nyq_nyquist_slicer_seed5.json"), "ber JSON written");
    check(fs::exists(work / "ber1" / "gaps.txt"), "gap report written");
    {
        const std::string doc = slurp(work / "ber1" / "nyq_nyquist_slicer_seed5.json");
        check(doc.find("\"config\"") != std::string::npos &&
                  doc.find("\"points\"") != std::string::npos &&
                  doc.find("\"manifest\"") != std::string::npos,
              "result JSON carries config/points/manifest keys");
    }

    // reruns are byte-identical, independent of thread count
    check(run(bin + " ber --config " + (work / "ber.cfg").string() + " --threads 4 --out " +
              (work / "ber2").string()) == 0,
          "ber rerun with 4 threads");
    check(slurp(work / "ber1" / "nyq_nyquist_slicer_seed5.csv") ==
              slurp(work / "ber2" / "nyq_nyquist_slicer_seed5.csv"),
          "CSV byte-identical across reruns and thread counts");
    check(slurp(work / "ber1" / "nyq_nyquist_slicer_seed5.json") ==
              slurp(work / "ber2" / "nyq_nyquist_slicer_seed5.json"),
          "result JSON byte-identical across reruns");

    // config validation enumerates every invalid field
    {
        std::ofstream cfg(work / "bad.cfg");
        cfg << "[experiment broken]\nscheme = psbm\ndesign = spreading\nchannel = awgn\n"
               "csi = estimated\ndetector = diff\nmodulation = 3\nLd = 6\n"
               "snr_db = 0\nmin_errors = 200\nseed = 1\n";
    }
    check(run(bin + " ber --config " + (work / "bad.cfg").string() + " --out " +
              (work / "ber3").string()) == 2,
          "invalid config exits 2");

    // missing config file is an I/O-style usage failure
    check(run(bin + " ber --config /nonexistent.cfg --out " + (work / "ber4").string()) == 2,
          "missing config exits 2");

    std::printf("test_cli: %d failure(s)\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
