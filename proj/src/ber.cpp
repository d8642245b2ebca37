#include "psbm/ber.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace psbm {

const char* to_string(Scheme v) { return v == Scheme::nyquist ? "nyquist" : "psbm"; }

const char* to_string(SequenceDesign v) {
    switch (v) {
        case SequenceDesign::plain: return "plain";
        case SequenceDesign::pilot_frame: return "pilot_frame";
        case SequenceDesign::alternating_pilot: return "alternating_pilot";
        case SequenceDesign::repetition: return "repetition";
        case SequenceDesign::spreading: return "spreading";
        case SequenceDesign::differential: return "differential";
    }
    return "?";
}

const char* to_string(Channel v) { return v == Channel::awgn ? "awgn" : "rayleigh_block"; }
const char* to_string(Csi v) { return v == Csi::perfect ? "perfect" : "estimated"; }

const char* to_string(Detector v) {
    switch (v) {
        case Detector::ml_wmf: return "ml_wmf";
        case Detector::ml_plain: return "ml_plain";
        case Detector::slicer: return "slicer";
        case Detector::sic: return "sic";
        case Detector::diff: return "diff";
        case Detector::diff_wmf: return "diff_wmf";
        case Detector::repetition_combiner: return "repetition_combiner";
    }
    return "?";
}

namespace {

int bits_per_symbol(int M) { return M == 2 ? 1 : (M == 4 ? 2 : 3); }

int bit_diff(int tx_idx, int rx_idx) {
    return std::popcount(gray_encode(static_cast<unsigned>(tx_idx)) ^
                         gray_encode(static_cast<unsigned>(rx_idx)));
}

struct BlockResult {
    long bits = 0;
    long errors = 0;
};

// per-curve immutable context shared by all blocks
struct CurveCtx {
    std::vector<cplx> alphabet;
    SpreadingPair spread_pair; // spreading design only
};

std::vector<cplx> draw_fading(const SimConfig& cfg, std::size_t frame_len, Rng& rng) {
    std::vector<cplx> h(frame_len, cplx{1.0, 0.0});
    if (cfg.channel != Channel::rayleigh_block)
        return h;
    const std::size_t K = cfg.fading_coherence <= 0
                              ? frame_len
                              : static_cast<std::size_t>(cfg.fading_coherence);
    for (std::size_t lo = 0; lo < frame_len; lo += K) {
        const cplx hb = rng.cgauss(1.0);
        for (std::size_t i = lo; i < std::min(frame_len, lo + K); ++i)
            h[i] = hb;
    }
    return h;
}

// scalar LMMSE per fading block from the pilot samples inside it; pilots in
// distinct blocks are combined separately, pilots inside one block jointly
// (they sit two samples apart, so their noise is uncorrelated)
std::vector<cplx> estimate_per_block(const SimConfig& cfg, const Frame& frame,
                                     std::span<const cplx> r, double sigma,
                                     std::span<const cplx> pilot_effective,
                                     std::span<const cplx> pilot_correction) {
    const std::size_t NN = frame.size();
    const std::size_t K = cfg.fading_coherence <= 0 ? NN
                                                    : static_cast<std::size_t>(cfg.fading_coherence);
    const auto pilots = frame.indices_of(Role::pilot);
    std::vector<cplx> h_hat(NN, cplx{0.0, 0.0});
    for (std::size_t lo = 0; lo < NN; lo += K) {
        const std::size_t hi = std::min(NN, lo + K);
        std::vector<cplx> obs, vals;
        for (std::size_t j = 0; j < pilots.size(); ++j) {
            const std::size_t pos = pilots[j];
            if (pos < lo || pos >= hi)
                continue;
            cplx sample = r[pos];
            if (!pilot_correction.empty())
                sample -= pilot_correction[j];
            obs.push_back(sample);
            vals.push_back(pilot_effective[j]);
        }
        cplx est{0.0, 0.0};
        if (!obs.empty())
            est = lmmse_estimate_diag(obs, vals, sigma * sigma, 1.0).h_hat;
        for (std::size_t i = lo; i < hi; ++i)
            h_hat[i] = est;
    }
    return h_hat;
}

BlockResult count_index_errors(std::span<const int> tx, std::span<const int> rx, int M) {
    BlockResult br;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        br.bits += bits_per_symbol(M);
        br.errors += bit_diff(tx[i], rx[i]);
    }
    return br;
}

// ---- per-design block simulators ----

BlockResult block_plain(const SimConfig& cfg, const CurveCtx& ctx, double sigma, Rng& rng) {
    const int M = cfg.modulation_order;
    const std::size_t N = static_cast<std::size_t>(cfg.Ld);
    std::vector<int> tx(N);
    std::vector<cplx> s(N);
    for (std::size_t i = 0; i < N; ++i) {
        tx[i] = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(M)));
        s[i] = ctx.alphabet[static_cast<std::size_t>(tx[i])];
    }
    const std::vector<cplx> h = draw_fading(cfg, N, rng);

    std::vector<cplx> decided;
    if (cfg.scheme == Scheme::psbm) {
        const std::vector<cplx> r = transmit(s, h, sigma, rng);
        if (cfg.detector == Detector::ml_wmf || cfg.detector == Detector::ml_plain) {
            DetectorConfig dc{ctx.alphabet, cfg.detector == Detector::ml_wmf, 20};
            const TriangularFactor A0 = factorize(IsiMatrix(static_cast<int>(N)));
            const std::vector<cplx> known(N, cplx{0.0, 0.0});
            const std::vector<std::uint8_t> mask(N, 0);
            decided = ml_detect_masked(r, A0, h, known, mask, dc);
        } else if (cfg.detector == Detector::sic) {
            std::vector<cplx> eq(N);
            for (std::size_t i = 0; i < N; ++i)
                eq[i] = r[i] / h[i];
            const SicResult sr = sic_detect(eq, ctx.alphabet);
            decided.resize(N);
            for (std::size_t i = 0; i < N; ++i)
                decided[i] = (i % 2 == 0) ? sr.a[i / 2] : sr.b[i / 2];
        } else { // slicer, no equalization
            decided.resize(N);
            for (std::size_t i = 0; i < N; ++i)
                decided[i] = ctx.alphabet[static_cast<std::size_t>(
                    slice_index(r[i] / h[i], ctx.alphabet))];
        }
    } else {
        const std::vector<cplx> r = transmit_nyquist(s, h, sigma, rng);
        decided.resize(N);
        for (std::size_t i = 0; i < N; ++i)
            decided[i] =
                ctx.alphabet[static_cast<std::size_t>(slice_index(r[i] / h[i], ctx.alphabet))];
    }
    std::vector<int> rx(N);
    for (std::size_t i = 0; i < N; ++i)
        rx[i] = slice_index(decided[i], ctx.alphabet);
    return count_index_errors(tx, rx, M);
}

BlockResult block_pilot_frame(const SimConfig& cfg, const CurveCtx& ctx, double sigma, Rng& rng) {
    const int M = cfg.modulation_order;
    const std::size_t N = static_cast<std::size_t>(cfg.Ld);
    std::vector<int> tx(N);
    std::vector<cplx> data(N);
    for (std::size_t i = 0; i < N; ++i) {
        tx[i] = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(M)));
        data[i] = ctx.alphabet[static_cast<std::size_t>(tx[i])];
    }
    const Frame frame = (cfg.design == SequenceDesign::pilot_frame)
                            ? build_frame(cfg.Ld, cfg.Lp, data, cplx{cfg.pilot_amplitude, 0.0})
                            : alternating_pilot_sequence(data, cplx{cfg.pilot_amplitude, 0.0});
    const std::vector<cplx> s = frame.symbols();
    const std::size_t NN = frame.size();
    const std::vector<cplx> h = draw_fading(cfg, NN, rng);
    const auto data_idx = frame.indices_of(Role::data);
    const auto pilot_idx = frame.indices_of(Role::pilot);

    // noiseless non-data contribution at the pilot positions (pilot and zero
    // neighbors are known; any data neighbor contributes interference)
    std::vector<cplx> pilot_effective(pilot_idx.size());
    {
        std::vector<cplx> s_nodata = s;
        for (std::size_t k : data_idx)
            s_nodata[k] = cplx{0.0, 0.0};
        const IsiMatrix A(static_cast<int>(NN));
        const std::vector<cplx> y = A.apply(s_nodata);
        for (std::size_t j = 0; j < pilot_idx.size(); ++j)
            pilot_effective[j] = y[pilot_idx[j]];
    }
    // true data ISI entering each pilot sample, in channel units (times h)
    auto pilot_data_isi = [&](std::span<const cplx> d_vals,
                              std::span<const cplx> gains) {
        std::vector<cplx> corr(pilot_idx.size(), cplx{0.0, 0.0});
        for (std::size_t j = 0; j < pilot_idx.size(); ++j) {
            const std::size_t pos = pilot_idx[j];
            cplx isi{0.0, 0.0};
            if (pos > 0 && frame.positions[pos - 1].role == Role::data) {
                const auto it = std::find(data_idx.begin(), data_idx.end(), pos - 1);
                isi += 0.5 * d_vals[static_cast<std::size_t>(it - data_idx.begin())];
            }
            if (pos + 1 < NN && frame.positions[pos + 1].role == Role::data) {
                const auto it = std::find(data_idx.begin(), data_idx.end(), pos + 1);
                isi += 0.5 * d_vals[static_cast<std::size_t>(it - data_idx.begin())];
            }
            corr[j] = isi * gains[pos];
        }
        return corr;
    };

    std::vector<int> rx(N);
    if (cfg.scheme == Scheme::psbm) {
        const std::vector<cplx> r = transmit(s, h, sigma, rng);
        const TriangularFactor A0 = factorize(IsiMatrix(static_cast<int>(NN)));
        std::vector<cplx> h_hat;
        if (cfg.csi == Csi::perfect) {
            h_hat = h;
        } else {
            h_hat = estimate_per_block(cfg, frame, r, sigma, pilot_effective, {});
        }
        DetectorConfig dc{ctx.alphabet, cfg.detector == Detector::ml_wmf, 20};
        std::vector<cplx> known = s;
        std::vector<std::uint8_t> mask(NN, 1);
        for (std::size_t k : data_idx) {
            mask[k] = 0;
            known[k] = cplx{0.0, 0.0};
        }
        std::vector<cplx> decided = ml_detect_masked(r, A0, h_hat, known, mask, dc);
        if (cfg.csi == Csi::estimated && cfg.estimate_refine &&
            cfg.design == SequenceDesign::alternating_pilot) {
            // decision-directed pass: subtract the rebuilt data ISI from the
            // pilot samples and re-estimate, then detect again
            std::vector<cplx> d_hat(data_idx.size());
            for (std::size_t i = 0; i < data_idx.size(); ++i)
                d_hat[i] = decided[data_idx[i]];
            const std::vector<cplx> corr = pilot_data_isi(d_hat, h_hat);
            h_hat = estimate_per_block(cfg, frame, r, sigma, pilot_effective, corr);
            decided = ml_detect_masked(r, A0, h_hat, known, mask, dc);
        }
        for (std::size_t i = 0; i < N; ++i)
            rx[i] = slice_index(decided[data_idx[i]], ctx.alphabet);
    } else {
        const std::vector<cplx> r = transmit_nyquist(s, h, sigma, rng);
        std::vector<cplx> h_hat;
        if (cfg.csi == Csi::perfect) {
            h_hat = h;
        } else {
            // zero-ISI channel: the pilot values themselves are the effective pilots
            std::vector<cplx> vals(pilot_idx.size());
            for (std::size_t j = 0; j < pilot_idx.size(); ++j)
                vals[j] = s[pilot_idx[j]];
            h_hat = estimate_per_block(cfg, frame, r, sigma, vals, {});
        }
        for (std::size_t i = 0; i < N; ++i) {
            const std::size_t pos = data_idx[i];
            const cplx hh = h_hat[pos] == cplx{0.0, 0.0} ? cplx{1e-12, 0.0} : h_hat[pos];
            rx[i] = slice_index(r[pos] / hh, ctx.alphabet);
        }
    }
    return count_index_errors(tx, rx, M);
}

BlockResult block_repetition(const SimConfig& cfg, const CurveCtx& ctx, double sigma, Rng& rng) {
    const int M = cfg.modulation_order;
    const int tx = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(M)));
    const cplx d = ctx.alphabet[static_cast<std::size_t>(tx)];
    const RepetitionPair seqs = repetition_sequences(cfg.Ld, d);
    const std::vector<cplx>& s = cfg.scheme == Scheme::psbm ? seqs.psbm : seqs.nyquist;
    const std::vector<cplx> h = draw_fading(cfg, s.size(), rng);
    // both sequences ride the half-packed channel; the zero-interleaved one is
    // the canonical Nyquist transmission
    const std::vector<cplx> r = transmit(s, h, sigma, rng);
    const cplx combined = repetition_combine(
        r, cfg.scheme == Scheme::psbm ? RepetitionScheme::psbm : RepetitionScheme::nyquist);
    const int Nrep = cfg.Ld;
    const double gain = cfg.scheme == Scheme::psbm
                            ? (4.0 * Nrep - 3.0) / std::sqrt(2.0)
                            : static_cast<double>(Nrep);
    const cplx h0 = h[0];
    const int rx = slice_index(combined / (gain * h0), ctx.alphabet);
    BlockResult br;
    br.bits = bits_per_symbol(M);
    br.errors = bit_diff(tx, rx);
    return br;
}

BlockResult block_spreading(const SimConfig& cfg, const CurveCtx& ctx, double sigma, Rng& rng) {
    const int M = cfg.modulation_order;
    const int tx1 = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(M)));
    const int tx2 = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(M)));
    const SpreadStreams st = spread_streams(ctx.alphabet[static_cast<std::size_t>(tx1)],
                                            ctx.alphabet[static_cast<std::size_t>(tx2)],
                                            ctx.spread_pair);
    const std::vector<cplx> h = draw_fading(cfg, st.interleaved.size(), rng);
    const std::vector<cplx> r = transmit(st.interleaved, h, sigma, rng);
    std::vector<cplx> eq(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        eq[i] = r[i] / h[i];
    const TwoStreams ts = two_stream_view(eq);
    const DespreadResult dr = despread(ts.odd, ts.even, ctx.spread_pair);
    BlockResult br;
    br.bits = 2 * bits_per_symbol(M);
    br.errors = bit_diff(tx1, slice_index(dr.d1, ctx.alphabet)) +
                bit_diff(tx2, slice_index(dr.d2, ctx.alphabet));
    return br;
}

BlockResult block_differential(const SimConfig& cfg, const CurveCtx& ctx, double sigma, Rng& rng) {
    const int M = cfg.modulation_order;
    const std::size_t N = static_cast<std::size_t>(cfg.Ld);
    std::vector<int> tx(N);
    std::vector<cplx> c(N);
    for (std::size_t i = 0; i < N; ++i) {
        tx[i] = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(M)));
        c[i] = ctx.alphabet[static_cast<std::size_t>(tx[i])];
    }
    const std::vector<cplx> s = diff_encode(c);
    const std::vector<cplx> h(N, cplx{1.0, 0.0});
    std::vector<cplx> decoded;
    if (cfg.scheme == Scheme::psbm) {
        const std::vector<cplx> r = transmit(s, h, sigma, rng);
        if (cfg.detector == Detector::diff_wmf) {
            const TriangularFactor A0 = factorize(IsiMatrix(static_cast<int>(N)));
            decoded = diff_decode_sequence_wmf(r, A0, ctx.alphabet);
        } else {
            decoded = diff_decode_sequence(r, ctx.alphabet);
        }
    } else {
        const std::vector<cplx> r = transmit_nyquist(s, h, sigma, rng);
        decoded = cfg.detector == Detector::diff_wmf ? nyquist_diff_coherent(r, ctx.alphabet)
                                                     : nyquist_diff_product(r, ctx.alphabet);
    }
    std::vector<int> rx(N);
    for (std::size_t i = 0; i < N; ++i)
        rx[i] = slice_index(decoded[i], ctx.alphabet);
    return count_index_errors(tx, rx, M);
}

BlockResult simulate_block(const SimConfig& cfg, const CurveCtx& ctx, double sigma, Rng& rng) {
    switch (cfg.design) {
        case SequenceDesign::plain:
            return block_plain(cfg, ctx, sigma, rng);
        case SequenceDesign::pilot_frame:
        case SequenceDesign::alternating_pilot:
            return block_pilot_frame(cfg, ctx, sigma, rng);
        case SequenceDesign::repetition:
            return block_repetition(cfg, ctx, sigma, rng);
        case SequenceDesign::spreading:
            return block_spreading(cfg, ctx, sigma, rng);
        case SequenceDesign::differential:
            return block_differential(cfg, ctx, sigma, rng);
    }
    return {};
}

} // namespace

std::vector<std::string> SimConfig::validate() const {
    std::vector<std::string> bad;
    if (modulation_order != 2 && modulation_order != 4 && modulation_order != 8)
        bad.push_back("modulation_order: must be 2, 4 or 8");
    if (Ld <= 0)
        bad.push_back("Ld: must be positive");
    if (Lp <= 0)
        bad.push_back("Lp: must be positive");
    if (snr_grid_db.empty())
        bad.push_back("snr_grid_db: must be nonempty");
    if (min_errors < 1)
        bad.push_back("min_errors: must be >= 1");
    if (min_errors < 100)
        bad.push_back("min_errors: >= 100 required for publication-grade points");
    if (max_bits < 1)
        bad.push_back("max_bits: must be >= 1");
    if (batch_blocks < 1)
        bad.push_back("batch_blocks: must be >= 1");
    if (fading_coherence < 0)
        bad.push_back("fading_coherence: must be >= 0");

    const bool is_psbm = scheme == Scheme::psbm;
    switch (design) {
        case SequenceDesign::plain:
            if (csi == Csi::estimated)
                bad.push_back("csi: estimated requires a pilot-bearing design");
            if (is_psbm) {
                if (detector != Detector::ml_wmf && detector != Detector::ml_plain &&
                    detector != Detector::sic && detector != Detector::slicer)
                    bad.push_back("detector: plain psbm supports ml_wmf/ml_plain/sic/slicer");
            } else if (detector != Detector::slicer) {
                bad.push_back("detector: plain nyquist uses slicer");
            }
            break;
        case SequenceDesign::pilot_frame:
        case SequenceDesign::alternating_pilot:
            if (is_psbm) {
                if (detector != Detector::ml_wmf && detector != Detector::ml_plain)
                    bad.push_back("detector: pilot frames with psbm use ml_wmf or ml_plain");
            } else if (detector != Detector::slicer) {
                bad.push_back("detector: pilot frames with nyquist use slicer");
            }
            if (design == SequenceDesign::pilot_frame && csi == Csi::estimated &&
                fading_coherence != 0)
                bad.push_back("fading_coherence: pilot_frame estimation needs one gain per frame");
            if (design == SequenceDesign::alternating_pilot && csi == Csi::estimated &&
                fading_coherence != 0 && fading_coherence != 2)
                bad.push_back("fading_coherence: alternating-pilot estimation needs 0 or 2 "
                              "(a pilot inside every fading block)");
            break;
        case SequenceDesign::repetition:
            if (detector != Detector::repetition_combiner)
                bad.push_back("detector: repetition uses repetition_combiner");
            if (Ld < 2)
                bad.push_back("Ld: repetition needs N >= 2");
            if (csi == Csi::estimated)
                bad.push_back("csi: repetition runs with perfect CSI");
            if (fading_coherence != 0)
                bad.push_back("fading_coherence: repetition combining needs one gain per frame");
            break;
        case SequenceDesign::spreading:
            if (!is_psbm)
                bad.push_back("scheme: spreading is a psbm design");
            if (detector != Detector::slicer)
                bad.push_back("detector: spreading despreads then slices (use slicer)");
            if (Ld < 2 || (Ld & (Ld - 1)) != 0)
                bad.push_back("Ld: spreading length must be a power of two (walsh pair)");
            if (csi == Csi::estimated)
                bad.push_back("csi: spreading runs with perfect CSI");
            if (fading_coherence != 0)
                bad.push_back("fading_coherence: spreading needs one gain per frame");
            break;
        case SequenceDesign::differential:
            if (detector != Detector::diff && detector != Detector::diff_wmf)
                bad.push_back("detector: differential uses diff or diff_wmf");
            if (channel != Channel::awgn)
                bad.push_back("channel: differential experiments run over awgn");
            if (csi == Csi::estimated)
                bad.push_back("csi: differential detection needs no CSI (use perfect)");
            break;
    }
    if (channel == Channel::awgn && csi == Csi::estimated &&
        design != SequenceDesign::pilot_frame && design != SequenceDesign::alternating_pilot)
        bad.push_back("csi: estimated CSI over awgn requires a pilot design");
    return bad;
}

double snr_to_sigma(double gamma_b_db) {
    return std::sqrt(1.0 / (2.0 * std::pow(10.0, gamma_b_db / 10.0)));
}

double theoretical_bpsk_awgn(double gamma_b) {
    if (gamma_b < 0.0)
        throw std::invalid_argument("theoretical_bpsk_awgn: gamma_b must be >= 0");
    return 0.5 * std::erfc(std::sqrt(gamma_b));
}

BerCurve run_ber(const SimConfig& cfg) {
    const std::vector<std::string> bad = cfg.validate();
    if (!bad.empty()) {
        std::string msg = "run_ber: invalid config:";
        for (const auto& b : bad)
            msg += "\n  " + b;
        throw std::invalid_argument(msg);
    }

    CurveCtx ctx;
    ctx.alphabet = psk_alphabet(cfg.modulation_order);
    if (cfg.design == SequenceDesign::spreading) {
        Rng dummy(0);
        ctx.spread_pair = make_spreading_pair(SpreadKind::walsh, cfg.Ld, dummy);
    }

    BerCurve curve;
    curve.config = cfg;
    const int nthreads = std::max(1, cfg.threads);

    for (std::size_t pi = 0; pi < cfg.snr_grid_db.size(); ++pi) {
        // gamma_b = 1/(2 sigma_w^2) with sigma_w the per-dimension deviation,
        // so the complex per-sample noise variance is 2 sigma_w^2 = 1/gamma_b;
        // this makes the Nyquist BPSK slicer land exactly on Q(sqrt(2 gamma_b))
        const double sigma = std::sqrt(2.0) * snr_to_sigma(cfg.snr_grid_db[pi]);
        long bits = 0, errors = 0;
        std::uint64_t next_block = 0;
        while (errors < cfg.min_errors && bits < cfg.max_bits) {
            const std::uint64_t B = static_cast<std::uint64_t>(cfg.batch_blocks);
            std::vector<BlockResult> partial(static_cast<std::size_t>(nthreads));
            auto worker = [&](int t) {
                BlockResult acc;
                for (std::uint64_t b = static_cast<std::uint64_t>(t); b < B;
                     b += static_cast<std::uint64_t>(nthreads)) {
                    Rng rng(derive_seed(cfg.master_seed, pi, next_block + b));
                    const BlockResult r = simulate_block(cfg, ctx, sigma, rng);
                    acc.bits += r.bits;
                    acc.errors += r.errors;
                }
                partial[static_cast<std::size_t>(t)] = acc;
            };
            if (nthreads == 1) {
                worker(0);
            } else {
                std::vector<std::thread> pool;
                for (int t = 0; t < nthreads; ++t)
                    pool.emplace_back(worker, t);
                for (auto& th : pool)
                    th.join();
            }
            for (const BlockResult& p : partial) {
                bits += p.bits;
                errors += p.errors;
            }
            next_block += B;
        }
        BerPoint pt;
        pt.snr_db = cfg.snr_grid_db[pi];
        pt.bits_sent = bits;
        pt.bit_errors = errors;
        pt.ber = bits > 0 ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0;
        pt.ci_halfwidth = bits > 0 ? 1.96 * std::sqrt(pt.ber * (1.0 - pt.ber) /
                                                      static_cast<double>(bits))
                                   : 0.0;
        curve.points.push_back(pt);
    }
    return curve;
}

std::string BerCurve::to_csv() const {
    std::ostringstream os;
    os << "snr_db,bits,errors,ber,ci\n";
    char buf[128];
    for (const BerPoint& p : points) {
        std::snprintf(buf, sizeof(buf), "%.10g,%ld,%ld,%.10g,%.10g\n", p.snr_db, p.bits_sent,
                      p.bit_errors, p.ber, p.ci_halfwidth);
        os << buf;
    }
    return os.str();
}

namespace {

double snr_at_ber(const BerCurve& c, double target) {
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
        const BerPoint& a = c.points[i];
        const BerPoint& b = c.points[i + 1];
        if (a.ber >= target && target > b.ber && b.ber > 0.0 && a.ber > 0.0) {
            const double la = std::log10(a.ber), lb = std::log10(b.ber);
            const double lt = std::log10(target);
            return a.snr_db + (b.snr_db - a.snr_db) * (la - lt) / (la - lb);
        }
    }
    throw std::invalid_argument("measure_gap: curve does not bracket the target BER");
}

} // namespace

double measure_gap(const BerCurve& curve_a, const BerCurve& curve_b, double target_ber) {
    return snr_at_ber(curve_b, target_ber) - snr_at_ber(curve_a, target_ber);
}

ThroughputReport throughput_report(const SimConfig& cfg) {
    ThroughputReport t{};
    std::size_t frame = 0, data = 0;
    switch (cfg.design) {
        case SequenceDesign::plain:
        case SequenceDesign::differential:
            frame = static_cast<std::size_t>(cfg.Ld);
            data = frame;
            break;
        case SequenceDesign::pilot_frame:
            frame = static_cast<std::size_t>(cfg.Ld + 2 * cfg.Lp + 2);
            data = static_cast<std::size_t>(cfg.Ld);
            break;
        case SequenceDesign::alternating_pilot:
            frame = static_cast<std::size_t>(2 * cfg.Ld + 1);
            data = static_cast<std::size_t>(cfg.Ld);
            break;
        case SequenceDesign::repetition:
            frame = static_cast<std::size_t>(2 * cfg.Ld - 1);
            data = 1; // one payload symbol, diversity-repeated
            break;
        case SequenceDesign::spreading:
            frame = static_cast<std::size_t>(2 * cfg.Ld);
            data = 2; // two payload symbols per spread block
            break;
    }
    t.frame_positions = frame;
    t.data_positions = data;
    t.overhead_fraction = 1.0 - static_cast<double>(data) / static_cast<double>(frame);
    if (cfg.design == SequenceDesign::repetition) {
        // the zero-interleaved reference occupies the same Ts slots
        t.relative_time = 1.0;
        t.symbols_per_ts_psbm = static_cast<double>(data) / static_cast<double>(frame);
        t.symbols_per_ts_nyquist = t.symbols_per_ts_psbm;
    } else {
        // equal pulse bandwidth: a Nyquist slot lasts 2 Ts
        t.relative_time = 0.5;
        t.symbols_per_ts_psbm = static_cast<double>(data) / static_cast<double>(frame);
        t.symbols_per_ts_nyquist = t.symbols_per_ts_psbm / 2.0;
    }
    return t;
}

} // namespace psbm
