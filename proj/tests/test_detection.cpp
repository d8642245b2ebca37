#include "psbm/detection.hpp"
#include "test_common.hpp"

#include <algorithm>
#include <bit>
#include <numbers>

using namespace psbm;

namespace {

// independent dense solve of A x = b (Gaussian elimination with partial
// pivoting); used as an oracle for the whitened-metric identity
std::vector<cplx> dense_solve(std::vector<cplx> A, std::vector<cplx> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::abs(A[row * n + col]) > std::abs(A[piv * n + col]))
                piv = row;
        for (std::size_t k = 0; k < n; ++k)
            std::swap(A[col * n + k], A[piv * n + k]);
        std::swap(b[col], b[piv]);
        for (std::size_t row = col + 1; row < n; ++row) {
            const cplx f = A[row * n + col] / A[col * n + col];
            for (std::size_t k = col; k < n; ++k)
                A[row * n + k] -= f * A[col * n + k];
            b[row] -= f * b[col];
        }
    }
    std::vector<cplx> x(n);
    for (std::size_t row = n; row-- > 0;) {
        cplx s = b[row];
        for (std::size_t k = row + 1; k < n; ++k)
            s -= A[row * n + k] * x[k];
        x[row] = s / A[row * n + row];
    }
    return x;
}

std::vector<cplx> apply_isi(std::span<const cplx> s, cplx h) {
    const IsiMatrix A(static_cast<int>(s.size()));
    std::vector<cplx> y = A.apply(s);
    for (auto& v : y)
        v *= h;
    return y;
}

} // namespace

TEST(gray_code_roundtrip) {
    for (unsigned b = 0; b < 8; ++b)
        CHECK(gray_decode(gray_encode(b)) == b);
    // adjacent PSK indices differ in exactly one bit of their labels
    for (unsigned i = 0; i < 8; ++i) {
        const unsigned a = gray_encode(i), b = gray_encode((i + 1) % 8);
        CHECK(std::popcount(a ^ b) == 1);
    }
}

TEST(whiten_recovers_precoloring_noise) {
    Rng rng(3);
    const int N = 12;
    const TriangularFactor f = factorize(IsiMatrix(N));
    std::vector<cplx> w(N);
    for (auto& z : w)
        z = rng.cgauss(1.0);
    const std::vector<cplx> colored = f.color(w);
    const std::vector<cplx> back = whiten(colored, f);
    for (int i = 0; i < N; ++i)
        CHECK_CLOSE(back[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(i)], 1e-12);
    // N = 1 is the identity
    const TriangularFactor f1 = factorize(IsiMatrix(1));
    const std::vector<cplx> one{cplx(0.3, 0.7)};
    CHECK_CLOSE(whiten(one, f1)[0], one[0], 1e-15);
}

TEST(ml_noiseless_recovery) {
    Rng rng(17);
    const auto bpsk = psk_alphabet(2);
    const int N = 6;
    const IsiMatrix A(N);
    const TriangularFactor A0 = factorize(A);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cplx> s(N);
        for (auto& v : s)
            v = bpsk[rng.uniform_below(2)];
        const cplx h = rng.cgauss(1.0);
        const std::vector<cplx> r = apply_isi(s, h);
        DetectorConfig cfg{bpsk, true, 16};
        const std::vector<cplx> got = ml_detect(r, A, A0, h, cfg);
        for (int i = 0; i < N; ++i)
            CHECK_CLOSE(got[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(i)], 1e-9);
    }
}

TEST(ml_metric_equals_quadratic_form) {
    // argmin over the whitened metric equals argmin of (r - sAh) A^-1 (r - sAh)^H,
    // the latter evaluated through an independent dense solve
    Rng rng(23);
    const auto bpsk = psk_alphabet(2);
    const int N = 5;
    const IsiMatrix A(N);
    const TriangularFactor A0 = factorize(A);
    std::vector<cplx> Adense(static_cast<std::size_t>(N) * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            Adense[static_cast<std::size_t>(i * N + j)] = A.entry(i, j);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<cplx> r(N);
        for (auto& v : r)
            v = rng.cgauss(2.0);
        const cplx h = rng.cgauss(1.0);
        DetectorConfig cfg{bpsk, true, 16};
        const std::vector<cplx> ml = ml_detect(r, A, A0, h, cfg);
        double best = 0.0;
        std::vector<cplx> bf;
        for (unsigned code = 0; code < (1u << N); ++code) {
            std::vector<cplx> s(N);
            for (int i = 0; i < N; ++i)
                s[static_cast<std::size_t>(i)] = bpsk[(code >> (N - 1 - i)) & 1u];
            const std::vector<cplx> y = apply_isi(s, h);
            std::vector<cplx> v(static_cast<std::size_t>(N));
            for (int i = 0; i < N; ++i)
                v[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] -
                                                 y[static_cast<std::size_t>(i)];
            // v A^-1 v^H
            std::vector<cplx> vh(v.size());
            for (std::size_t i = 0; i < v.size(); ++i)
                vh[i] = std::conj(v[i]);
            const std::vector<cplx> x = dense_solve(Adense, vh);
            cplx q{0.0, 0.0};
            for (std::size_t i = 0; i < v.size(); ++i)
                q += v[i] * x[i];
            if (code == 0 || q.real() < best) {
                best = q.real();
                bf = s;
            }
        }
        for (int i = 0; i < N; ++i)
            CHECK_CLOSE(ml[static_cast<std::size_t>(i)], bf[static_cast<std::size_t>(i)], 1e-9);
    }
}

TEST(ml_scale_invariance) {
    Rng rng(29);
    const auto qpsk = psk_alphabet(4);
    const int N = 4;
    const IsiMatrix A(N);
    const TriangularFactor A0 = factorize(A);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<cplx> r(N);
        for (auto& v : r)
            v = rng.cgauss(1.0);
        const cplx h = rng.cgauss(1.0);
        const cplx scale(1.7, -2.3);
        DetectorConfig cfg{qpsk, true, 16};
        const std::vector<cplx> a = ml_detect(r, A, A0, h, cfg);
        std::vector<cplx> rs(r);
        for (auto& v : rs)
            v *= scale;
        const std::vector<cplx> b = ml_detect(rs, A, A0, h * scale, cfg);
        for (int i = 0; i < N; ++i)
            CHECK_CLOSE(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(i)], 1e-12);
    }
}

TEST(ml_exhaustive_limit_enforced) {
    const auto qpsk = psk_alphabet(4);
    const int N = 24;
    const IsiMatrix A(N);
    const TriangularFactor A0 = factorize(A);
    const std::vector<cplx> r(N, cplx{0, 0});
    DetectorConfig cfg{qpsk, true, 16};
    CHECK_THROWS(ml_detect(r, A, A0, cplx(1, 0), cfg));
}

TEST(ml_masked_pilots_exact) {
    // pilots pinned, data recovered exactly in the noiseless channel
    Rng rng(31);
    const auto bpsk = psk_alphabet(2);
    const std::vector<cplx> data{bpsk[1], bpsk[0], bpsk[1], bpsk[1]};
    const Frame f = alternating_pilot_sequence(data, cplx(1, 0));
    const std::vector<cplx> s = f.symbols();
    const std::size_t NN = s.size();
    std::vector<cplx> h(NN);
    for (std::size_t i = 0; i < NN; ++i)
        h[i] = rng.cgauss(1.0); // per-sample fading
    const IsiMatrix A(static_cast<int>(NN));
    std::vector<cplx> r = A.apply(s);
    for (std::size_t i = 0; i < NN; ++i)
        r[i] *= h[i];
    const TriangularFactor A0 = factorize(A);
    std::vector<cplx> known = s;
    std::vector<std::uint8_t> mask(NN, 1);
    for (std::size_t k : f.indices_of(Role::data)) {
        mask[k] = 0;
        known[k] = cplx{0, 0};
    }
    DetectorConfig cfg{bpsk, true, 16};
    const std::vector<cplx> got = ml_detect_masked(r, A0, h, known, mask, cfg);
    const auto didx = f.indices_of(Role::data);
    for (std::size_t i = 0; i < data.size(); ++i)
        CHECK_CLOSE(got[didx[i]], data[i], 1e-9);
}

TEST(slicer_basics) {
    const auto qpsk = psk_alphabet(4);
    const std::vector<cplx> r{cplx(2.1, 0.1), cplx(-0.1, 1.7)};
    const std::vector<cplx> out = symbol_slicer(r, cplx(2, 0), qpsk);
    CHECK_CLOSE(out[0], qpsk[0], 0.0);
    CHECK_CLOSE(out[1], qpsk[1], 0.0);
    CHECK_THROWS(symbol_slicer(r, cplx(0, 0), qpsk));
    // per-dimension slicing equals nearest-point for QPSK
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        const cplx z = rng.cgauss(2.0);
        const int nearest = slice_index(z, qpsk);
        // rotate to the diagonal grid where per-dimension decisions act
        const cplx w = z * std::polar(1.0, -std::numbers::pi / 4.0);
        const int per_dim_re = w.real() >= 0 ? 1 : 0;
        const int per_dim_im = w.imag() >= 0 ? 1 : 0;
        const int map[2][2] = {{3, 2}, {0, 1}}; // (sign pattern) -> index
        CHECK(nearest == map[per_dim_re][per_dim_im]);
    }
}

TEST(sic_noiseless) {
    const auto bpsk = psk_alphabet(2);
    // interleaved (a1, b1, a2, b2, a3, b3) through the half-packed channel
    const std::vector<cplx> a{cplx(1, 0), cplx(-1, 0), cplx(1, 0)};
    const std::vector<cplx> b{cplx(-1, 0), cplx(-1, 0), cplx(1, 0)};
    std::vector<cplx> s;
    for (int i = 0; i < 3; ++i) {
        s.push_back(a[static_cast<std::size_t>(i)]);
        s.push_back(b[static_cast<std::size_t>(i)]);
    }
    const IsiMatrix A(6);
    const std::vector<cplx> r = A.apply(s);
    const SicResult res = sic_detect(r, bpsk);
    for (int i = 0; i < 3; ++i) {
        CHECK_CLOSE(res.a[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(i)], 0.0);
        CHECK_CLOSE(res.b[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(i)], 0.0);
    }
}

TEST(sic_silent_a_stream) {
    const auto bpsk = psk_alphabet(2);
    const std::vector<cplx> b{cplx(1, 0), cplx(-1, 0)};
    const std::vector<cplx> s{cplx(0, 0), b[0], cplx(0, 0), b[1]};
    const IsiMatrix A(4);
    const std::vector<cplx> r = A.apply(s);
    const SicResult res = sic_detect(r, bpsk);
    CHECK_CLOSE(res.b[0], b[0], 0.0);
    CHECK_CLOSE(res.b[1], b[1], 0.0);
}

TEST(sic_error_propagation_arithmetic) {
    // a wrong b decision shifts the two adjacent a statistics by +-1 each
    // (cancellation of (b_{n-1} + b_n)/2 with b off by 2 moves each by 1)
    const cplx wrong_shift = 0.5 * (cplx(1, 0) - cplx(-1, 0));
    CHECK_CLOSE(wrong_shift, cplx(1, 0), 0.0);
}

TEST(lmmse_scalar_formula) {
    // single pilot, prior 1: h = p* r / (|p|^2 + sigma^2)
    const cplx p(2, 0), r(1.3, -0.4);
    const double s2 = 0.5;
    const ChannelEstimate e = lmmse_estimate_diag(std::vector<cplx>{r}, std::vector<cplx>{p},
                                                  s2, 1.0);
    CHECK_CLOSE(e.h_hat, std::conj(p) * r / (std::norm(p) + s2), 1e-12);
    // dense-covariance path agrees with the diagonal path
    const std::vector<cplx> C{cplx(s2, 0)};
    const ChannelEstimate e2 = lmmse_estimate(std::vector<cplx>{r}, std::vector<cplx>{p}, C, 1.0);
    CHECK_CLOSE(e2.h_hat, e.h_hat, 1e-12);
    CHECK_CLOSE(e2.error_variance, e.error_variance, 1e-12);
}

TEST(lmmse_noiseless_limit) {
    const cplx h(0.8, -0.6);
    std::vector<cplx> p{cplx(1, 0), cplx(-1, 0), cplx(1, 0)};
    std::vector<cplx> obs(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        obs[i] = h * p[i];
    const ChannelEstimate e = lmmse_estimate_diag(obs, p, 1e-12, 1.0);
    CHECK_CLOSE(e.h_hat, h, 1e-6);
    CHECK(e.error_variance < 1e-11);
}

TEST(lmmse_error_variance_consistency) {
    // empirical MSE matches the reported error variance within 3%
    Rng rng(427);
    const int Np = 4, trials = 100000;
    const double s2 = 0.25;
    std::vector<cplx> p(Np, cplx(1, 0));
    double mse = 0.0, reported = 0.0;
    for (int t = 0; t < trials; ++t) {
        const cplx h = rng.cgauss(1.0);
        std::vector<cplx> obs(Np);
        for (int i = 0; i < Np; ++i)
            obs[static_cast<std::size_t>(i)] = h * p[static_cast<std::size_t>(i)] +
                                               rng.cgauss(s2);
        const ChannelEstimate e = lmmse_estimate_diag(obs, p, s2, 1.0);
        mse += std::norm(e.h_hat - h);
        reported = e.error_variance;
    }
    mse /= trials;
    CHECK(std::abs(mse - reported) <= 0.03 * reported);
}

TEST(lmmse_n_pilot_gain) {
    // estimation error variance shrinks N-fold with N pilots (high-SNR regime)
    const double s2 = 0.01;
    std::vector<cplx> p1{cplx(1, 0)};
    std::vector<cplx> o1{cplx(1, 0)};
    const double v1 = lmmse_estimate_diag(o1, p1, s2, 1e9).error_variance;
    std::vector<cplx> p8(8, cplx(1, 0));
    std::vector<cplx> o8(8, cplx(1, 0));
    const double v8 = lmmse_estimate_diag(o8, p8, s2, 1e9).error_variance;
    CHECK_CLOSE(v1 / v8, 8.0, 1e-6);
}

TEST(lmmse_rejects_degenerate) {
    std::vector<cplx> obs{cplx(1, 0)};
    std::vector<cplx> p{cplx(0, 0)};
    CHECK_THROWS(lmmse_estimate_diag(obs, p, 0.1, 1.0));
    std::vector<cplx> Cbad{cplx(-1, 0)};
    std::vector<cplx> p1{cplx(1, 0)};
    CHECK_THROWS(lmmse_estimate(obs, p1, Cbad, 1.0));
}

TEST(pilot_combiner_data_free_frame) {
    const std::vector<cplx> zeros{cplx(0, 0), cplx(0, 0), cplx(0, 0)};
    const Frame f = alternating_pilot_sequence(zeros, cplx(1, 0));
    const std::vector<cplx> s = f.symbols();
    const cplx h(0.6, 0.8);
    std::vector<cplx> h_vec(s.size(), h);
    Rng nil(0);
    const std::vector<cplx> r = transmit(s, h_vec, 0.0, nil);
    const CombinedPilot full = pilot_combiner(r, f, CombinerVariant::full);
    CHECK(full.n_pilots == 4);
    CHECK_CLOSE(full.combined, 4.0 * h, 1e-13);
    CHECK(full.residual_power < 1e-20);
    // the as-stated variant drops the last pilot
    const CombinedPilot stated = pilot_combiner(r, f, CombinerVariant::as_stated);
    CHECK(stated.n_pilots == 3);
    CHECK_CLOSE(stated.combined, 3.0 * h, 1e-13);
}

TEST(pilot_combiner_with_data) {
    Rng rng(9);
    const auto bpsk = psk_alphabet(2);
    std::vector<cplx> data;
    for (int i = 0; i < 5; ++i)
        data.push_back(bpsk[rng.uniform_below(2)]);
    const Frame f = alternating_pilot_sequence(data, cplx(1, 0));
    const std::vector<cplx> s = f.symbols();
    std::vector<cplx> h_vec(s.size(), cplx(1, 0));
    Rng nil(0);
    const std::vector<cplx> r = transmit(s, h_vec, 0.0, nil);
    // the telescoped full sum cancels the data interference identically
    const CombinedPilot full = pilot_combiner(r, f, CombinerVariant::full, data);
    CHECK_CLOSE(full.combined, cplx(6, 0), 1e-13);
    CHECK(full.residual_power < 1e-20);
    // the literal display leaves a residual; decision feedback removes it
    const CombinedPilot stated = pilot_combiner(r, f, CombinerVariant::as_stated, data);
    const CombinedPilot dd = pilot_combiner(r, f, CombinerVariant::decision_directed, data);
    CHECK_CLOSE(dd.combined, cplx(5, 0), 1e-13);
    CHECK(dd.residual_power < 1e-20);
    CHECK_CLOSE(stated.combined - cplx(5, 0),
                cplx(std::sqrt(stated.residual_power), 0) *
                    (stated.combined.real() >= 5.0 ? 1.0 : -1.0),
                1e-12);
}

TEST(pilot_combiner_noise_variance) {
    // pilot samples sit two slots apart: combined noise variance = Np sigma^2
    Rng rng(2025);
    const std::vector<cplx> zeros{cplx(0, 0), cplx(0, 0), cplx(0, 0)};
    const Frame f = alternating_pilot_sequence(zeros, cplx(1, 0));
    const std::vector<cplx> s = f.symbols();
    const std::vector<cplx> h(s.size(), cplx(0, 0)); // pure noise
    double acc = 0.0;
    const int trials = 300000;
    for (int t = 0; t < trials; ++t) {
        const std::vector<cplx> r = transmit(s, h, 1.0, rng);
        acc += std::norm(pilot_combiner(r, f, CombinerVariant::full).combined);
    }
    CHECK(std::abs(acc / trials - 4.0) <= 0.08); // 4 pilots, 2%
}

TEST(despread_exact_and_contaminated) {
    Rng rng(0);
    const SpreadingPair walsh = make_spreading_pair(SpreadKind::walsh, 4, rng);
    const cplx d1(1, 0), d2(0, 1);
    const SpreadStreams st = spread_streams(d1, d2, walsh);
    const IsiMatrix A(8);
    const std::vector<cplx> r = A.apply(st.interleaved);
    const TwoStreams ts = two_stream_view(r);
    const DespreadResult dr = despread(ts.odd, ts.even, walsh);
    // the reported interference coefficients reproduce the estimates exactly
    CHECK_CLOSE(dr.d1, d1 + d2 * dr.d1_interference_coef, 1e-13);
    CHECK_CLOSE(dr.d2, d2 + d1 * dr.d2_interference_coef, 1e-13);
    // for this pair the d1 contamination has magnitude 1/(2N)
    CHECK_CLOSE(std::abs(dr.d1_interference_coef), 1.0 / 8.0, 1e-13);
    // silent second stream: exact recovery
    const SpreadStreams st0 = spread_streams(d1, cplx(0, 0), walsh);
    const std::vector<cplx> r0 = A.apply(st0.interleaved);
    const TwoStreams ts0 = two_stream_view(r0);
    CHECK_CLOSE(despread(ts0.odd, ts0.even, walsh).d1, d1, 1e-13);
}

TEST(despread_noise_variance) {
    Rng rng(888);
    const SpreadingPair walsh = make_spreading_pair(SpreadKind::walsh, 8, rng);
    double acc = 0.0;
    const int trials = 200000;
    for (int t = 0; t < trials; ++t) {
        const NoiseBlock nb = gen_noise(16, 1.0, NoiseMethod::triangular, rng);
        const TwoStreams ts = two_stream_view(nb.samples);
        const DespreadResult dr = despread(ts.odd, ts.even, walsh);
        acc += std::norm(dr.d1);
    }
    // lag-2 samples are uncorrelated: variance sigma^2 / N
    CHECK(std::abs(acc / trials - 1.0 / 8.0) <= 0.005);
}

TEST(repetition_combine_values) {
    Rng nil(0);
    const RepetitionPair p2 = repetition_sequences(2);
    const std::vector<cplx> h3(3, cplx(1, 0));
    const std::vector<cplx> rn = transmit(p2.nyquist, h3, 0.0, nil);
    CHECK_CLOSE(repetition_combine(rn, RepetitionScheme::nyquist), cplx(2, 0), 1e-13);
    const std::vector<cplx> rp = transmit(p2.psbm, h3, 0.0, nil);
    // (2*3/2 + 2(N1-2)) d / sqrt(2) = 5/sqrt(2) for N1 = 3
    CHECK_CLOSE(repetition_combine(rp, RepetitionScheme::psbm),
                cplx(5.0 / std::sqrt(2.0), 0), 1e-13);
}

TEST(repetition_measured_snr_ratio) {
    // empirical combiner SNR ratio matches (2N - 3/2)/N within 2%
    for (int N : {2, 4}) {
        Rng rng(1000 + N);
        const RepetitionPair seqs = repetition_sequences(N);
        const std::size_t len = seqs.psbm.size();
        const std::vector<cplx> h(len, cplx(1, 0));
        const double sigma = 1.0;
        const int trials = 200000;
        double var_n = 0.0, var_p = 0.0;
        cplx mean_n{0, 0}, mean_p{0, 0};
        std::vector<cplx> sn(trials), sp(trials);
        for (int t = 0; t < trials; ++t) {
            const std::vector<cplx> rn = transmit(seqs.nyquist, h, sigma, rng);
            const std::vector<cplx> rp = transmit(seqs.psbm, h, sigma, rng);
            sn[static_cast<std::size_t>(t)] = repetition_combine(rn, RepetitionScheme::nyquist);
            sp[static_cast<std::size_t>(t)] = repetition_combine(rp, RepetitionScheme::psbm);
            mean_n += sn[static_cast<std::size_t>(t)];
            mean_p += sp[static_cast<std::size_t>(t)];
        }
        mean_n /= trials;
        mean_p /= trials;
        for (int t = 0; t < trials; ++t) {
            var_n += std::norm(sn[static_cast<std::size_t>(t)] - mean_n);
            var_p += std::norm(sp[static_cast<std::size_t>(t)] - mean_p);
        }
        var_n /= trials;
        var_p /= trials;
        const double snr_n = std::norm(mean_n) / var_n;
        const double snr_p = std::norm(mean_p) / var_p;
        const double want = repetition_snr_ratio(N);
        CHECK(std::abs(snr_p / snr_n - want) <= 0.02 * want);
    }
}

TEST(diff_decoders_noiseless_roundtrip) {
    for (int M : {2, 4, 8}) {
        Rng rng(40 + M);
        const auto alphabet = psk_alphabet(M);
        for (int len : {1, 2, 16, 64}) {
            std::vector<cplx> c;
            for (int i = 0; i < len; ++i)
                c.push_back(alphabet[rng.uniform_below(static_cast<std::uint64_t>(M))]);
            const std::vector<cplx> s = diff_encode(c);
            const std::vector<cplx> h(s.size(), cplx(1, 0));
            Rng nil(0);
            const std::vector<cplx> r = transmit(s, h, 0.0, nil);
            const std::vector<cplx> dec = diff_decode_sequence(r, alphabet);
            const TriangularFactor A0 = factorize(IsiMatrix(len));
            const std::vector<cplx> decw = diff_decode_sequence_wmf(r, A0, alphabet);
            for (int i = 0; i < len; ++i) {
                CHECK_CLOSE(dec[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i)], 1e-9);
                CHECK_CLOSE(decw[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i)], 1e-9);
            }
            // zero-ISI baselines on clean samples
            const std::vector<cplx> decp = nyquist_diff_product(s, alphabet);
            const std::vector<cplx> decc = nyquist_diff_coherent(s, alphabet);
            for (int i = 0; i < len; ++i) {
                CHECK_CLOSE(decp[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i)], 1e-9);
                CHECK_CLOSE(decc[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(i)], 1e-9);
            }
        }
    }
}

TEST(diff_decoder_fault_injection_bounded_burst) {
    // a single corrupted sample produces a burst of limited mean length; the
    // decision-feedback chains relock in most blocks instead of failing to
    // the block boundary
    Rng rng(77);
    const auto qpsk = psk_alphabet(4);
    const int len = 64, trials = 200;
    const TriangularFactor A0 = factorize(IsiMatrix(len));
    long total_fwd = 0, total_bwd = 0;
    int relocked_fwd = 0, relocked_bwd = 0;
    for (int t = 0; t < trials; ++t) {
        std::vector<cplx> c;
        for (int i = 0; i < len; ++i)
            c.push_back(qpsk[rng.uniform_below(4)]);
        const std::vector<cplx> s = diff_encode(c);
        const std::vector<cplx> h(s.size(), cplx(1, 0));
        Rng nil(0);
        std::vector<cplx> r = transmit(s, h, 0.0, nil);
        const std::size_t pos = 8 + rng.uniform_below(len - 16);
        r[pos] += cplx(0.9, 0.9) * qpsk[rng.uniform_below(4)];
        const std::vector<cplx> dec_fwd = diff_decode_sequence(r, qpsk);
        const std::vector<cplx> dec_bwd = diff_decode_sequence_wmf(r, A0, qpsk);
        auto stats = [&](const std::vector<cplx>& dec, long& total, int& relocked) {
            int count = 0, last = -1;
            for (int i = 0; i < len; ++i) {
                if (std::abs(dec[static_cast<std::size_t>(i)] -
                             c[static_cast<std::size_t>(i)]) > 1e-9) {
                    ++count;
                    last = i;
                }
            }
            total += count;
            // relocked: the final stretch decodes cleanly again
            if (last < len - 4)
                ++relocked;
        };
        stats(dec_fwd, total_fwd, relocked_fwd);
        stats(dec_bwd, total_bwd, relocked_bwd);
    }
    // the closed-form chain relocks quickly (measured mean ~2.4 symbols)
    CHECK(total_fwd <= 6 * trials);
    CHECK(relocked_fwd >= trials * 3 / 4);
    // the whitened chain smears an r-domain impulse over the downstream
    // samples (the coloring inverse has no decay), so its burst is longer but
    // still a bounded fraction of the block; under stationary noise it is the
    // stronger decoder
    CHECK(total_bwd <= 30 * trials);
}

TEST(ml_dominates_sic_and_whitened_slicing) {
    // block errors over random BPSK at 6 dB: ML at or below both baselines
    Rng rng(606);
    const auto bpsk = psk_alphabet(2);
    const int N = 4, trials = 10000;
    const double s_w = std::sqrt(1.0 / (2.0 * std::pow(10.0, 0.6))); // 6 dB
    const IsiMatrix A(N);
    const TriangularFactor A0 = factorize(A);
    int err_ml = 0, err_sic = 0, err_slice = 0;
    for (int t = 0; t < trials; ++t) {
        std::vector<cplx> s(N);
        for (auto& v : s)
            v = bpsk[rng.uniform_below(2)];
        std::vector<cplx> r = A.apply(s);
        const NoiseBlock nb = gen_noise(N, s_w, NoiseMethod::triangular, rng);
        for (int i = 0; i < N; ++i)
            r[static_cast<std::size_t>(i)] += nb.samples[static_cast<std::size_t>(i)];
        DetectorConfig cfg{bpsk, true, 16};
        const std::vector<cplx> ml = ml_detect(r, A, A0, cplx(1, 0), cfg);
        const SicResult sic = sic_detect(r, bpsk);
        const std::vector<cplx> z = whiten(r, A0);
        const std::vector<cplx> sl = symbol_slicer(z, cplx(1, 0), bpsk);
        bool bml = false, bsic = false, bsl = false;
        for (int i = 0; i < N; ++i) {
            const std::size_t u = static_cast<std::size_t>(i);
            if (std::abs(ml[u] - s[u]) > 1e-9) bml = true;
            const cplx sic_v = (i % 2 == 0) ? sic.a[u / 2] : sic.b[u / 2];
            if (std::abs(sic_v - s[u]) > 1e-9) bsic = true;
            if (std::abs(sl[u] - s[u]) > 1e-9) bsl = true;
        }
        err_ml += bml;
        err_sic += bsic;
        err_slice += bsl;
    }
    const double two_sigma = 2.0 * std::sqrt(static_cast<double>(err_ml) + 1.0);
    CHECK(err_ml <= err_sic + two_sigma);
    CHECK(err_ml <= err_slice + two_sigma);
}

TEST_MAIN()
