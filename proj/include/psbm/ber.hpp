#pragma once

#include "psbm/detection.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace psbm {

enum class Scheme { nyquist, psbm };
enum class SequenceDesign { plain, pilot_frame, alternating_pilot, repetition, spreading, differential };
enum class Channel { awgn, rayleigh_block };
enum class Csi { perfect, estimated };
// diff     : product detector (nyquist) / closed-form decision feedback (psbm)
// diff_wmf : coherent differential (nyquist) / whitened backward DF (psbm)
enum class Detector { ml_wmf, ml_plain, slicer, sic, diff, diff_wmf, repetition_combiner };

const char* to_string(Scheme v);
const char* to_string(SequenceDesign v);
const char* to_string(Channel v);
const char* to_string(Csi v);
const char* to_string(Detector v);

struct SimConfig {
    std::string name = "run";
    Scheme scheme = Scheme::nyquist;
    SequenceDesign design = SequenceDesign::plain;
    Channel channel = Channel::awgn;
    Csi csi = Csi::perfect;
    Detector detector = Detector::slicer;
    int modulation_order = 2; // M-PSK, M in {2, 4, 8}
    int Ld = 8;
    int Lp = 1;
    std::vector<double> snr_grid_db;
    long min_errors = 200;
    long max_bits = 2000000;
    std::uint64_t master_seed = 0;
    // fading granularity in symbols for rayleigh_block: 0 = one coefficient
    // per frame, k > 0 = independent coefficient every k consecutive samples
    int fading_coherence = 0;
    double pilot_amplitude = 1.0;
    int threads = 1;
    int batch_blocks = 512; // stopping-rule granularity; fixed for determinism
    bool estimate_refine = true; // decision-directed re-estimation (psbm, estimated CSI)

    // empty when valid; otherwise one message per invalid field
    std::vector<std::string> validate() const;
};

struct BerPoint {
    double snr_db;
    long bits_sent;
    long bit_errors;
    double ber;
    double ci_halfwidth; // 95%, normal approximation
};

struct BerCurve {
    SimConfig config;
    std::vector<BerPoint> points;

    // snr_db,bits,errors,ber,ci with header row
    std::string to_csv() const;
};

// sigma_w from gamma_b via gamma_b = 1 / (2 sigma_w^2), Es = 1
double snr_to_sigma(double gamma_b_db);

// Q(sqrt(2 gamma_b)) for linear gamma_b
double theoretical_bpsk_awgn(double gamma_b);

// Seeded Monte Carlo over independent blocks until min_errors or max_bits per
// SNR point. Deterministic for a fixed master_seed and batch size regardless
// of thread count: blocks are seeded by (seed, point, block) counters and the
// stopping rule advances in whole batches.
BerCurve run_ber(const SimConfig& cfg);

// Horizontal SNR gap at target_ber: snr_b(target) - snr_a(target), each found
// by log-linear interpolation between the bracketing grid points.
double measure_gap(const BerCurve& curve_a, const BerCurve& curve_b, double target_ber);

struct ThroughputReport {
    double symbols_per_ts_psbm;
    double symbols_per_ts_nyquist;
    double relative_time; // psbm / nyquist transmission time for the same payload
    std::size_t frame_positions;
    std::size_t data_positions;
    double overhead_fraction;
};

ThroughputReport throughput_report(const SimConfig& cfg);

} // namespace psbm
