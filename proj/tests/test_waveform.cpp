#include "psbm/waveform.hpp"

#include "psbm/detection.hpp"
#include "psbm/link.hpp"
#include "test_common.hpp"

using namespace psbm;

namespace {

PulseSpec nyquist_pulse(double alpha = 0.5, int os = 32, double d = 4.0) {
    PulseSpec p;
    p.alpha = alpha;
    p.period = 1.0;
    p.trunc_halfwidth = d;
    p.oversampling = os;
    return p;
}

PulseSpec psbm_pulse(int os = 16, double d = 4.0) {
    PulseSpec p;
    p.alpha = 1.0;
    p.period = 2.0;
    p.trunc_halfwidth = d;
    p.oversampling = os;
    return p;
}

} // namespace

TEST(single_pulse_energy) {
    SymbolSequence s;
    s.symbols = {cplx(1.0, 0.0)};
    const Waveform w = modulate_psbm(s, 1.0, 32, 8.0);
    CHECK(std::abs(w.energy() - 1.0) <= 1e-4);
    const Waveform wn = modulate_nyquist(s, nyquist_pulse(0.5, 32, 8.0));
    CHECK(std::abs(wn.energy() - 1.0) <= 1e-4);
}

TEST(nyquist_matched_filter_recovers_symbols) {
    SymbolSequence s;
    for (int i = 0; i < 16; ++i)
        s.symbols.push_back(i % 2 ? cplx(-1, 0) : cplx(1, 0));
    const PulseSpec p = nyquist_pulse(0.5, 32, 8.0);
    const Waveform w = modulate_nyquist(s, p);
    const std::vector<cplx> r = matched_filter_sample(w, p, 16);
    for (int i = 0; i < 16; ++i)
        CHECK_CLOSE(r[static_cast<std::size_t>(i)], s.symbols[static_cast<std::size_t>(i)], 5e-3);
}

TEST(psbm_tap_structure) {
    // s = (1, 0, 0): samples approach (1, 0.5, 0)
    SymbolSequence s;
    s.symbols = {cplx(1, 0), cplx(0, 0), cplx(0, 0)};
    const Waveform w = modulate_psbm(s, 1.0, 32, 8.0);
    const std::vector<cplx> r = matched_filter_sample(w, psbm_pulse(32, 8.0), 3);
    CHECK_CLOSE(r[0], cplx(1.0, 0.0), 2e-3);
    CHECK_CLOSE(r[1], cplx(0.5, 0.0), 2e-3);
    CHECK_CLOSE(r[2], cplx(0.0, 0.0), 2e-3);
}

TEST(psbm_two_symbol_examples) {
    SymbolSequence s;
    s.symbols = {cplx(1, 0), cplx(1, 0)};
    const Waveform w = modulate_psbm(s, 1.0, 32, 8.0);
    const std::vector<cplx> r = matched_filter_sample(w, psbm_pulse(32, 8.0), 2);
    CHECK_CLOSE(r[0], cplx(1.5, 0.0), 2e-3);
    CHECK_CLOSE(r[1], cplx(1.5, 0.0), 2e-3);

    SymbolSequence s2;
    s2.symbols = {cplx(1, 0), cplx(-1, 0)};
    const Waveform w2 = modulate_psbm(s2, 1.0, 32, 8.0);
    const std::vector<cplx> r2 = matched_filter_sample(w2, psbm_pulse(32, 8.0), 2);
    CHECK_CLOSE(r2[0], cplx(0.5, 0.0), 2e-3);
    CHECK_CLOSE(r2[1], cplx(-0.5, 0.0), 2e-3);
}

TEST(psbm_interior_sample_form) {
    // r_1 = b + (a + c)/2 for s = (a, b, c)
    SymbolSequence s;
    s.symbols = {cplx(0.7, 0.1), cplx(-0.3, 0.4), cplx(0.2, -0.9)};
    const Waveform w = modulate_psbm(s, 1.0, 32, 8.0);
    const std::vector<cplx> r = matched_filter_sample(w, psbm_pulse(32, 8.0), 3);
    const cplx want = s.symbols[1] + 0.5 * (s.symbols[0] + s.symbols[2]);
    CHECK_CLOSE(r[1], want, 2e-3);
}

TEST(waveform_matches_discrete_model) {
    // Hard truncation at d = 4 leaves genuine pulse-edge overlap terms near
    // symbol lags 7..10 of about 1e-3 each (verified against adaptive
    // quadrature of the truncated-pulse correlations), so the block max-abs
    // deviation from the ideal (1/2, 1, 1/2) model sits a little above 2e-3
    // for 16-symbol QPSK blocks. The engine is checked against that physical
    // floor here; the tighter figure is re-measured by the acceptance suite.
    Rng rng(31337);
    const auto alphabet = psk_alphabet(4);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        SymbolSequence s;
        for (int i = 0; i < 16; ++i)
            s.symbols.push_back(alphabet[rng.uniform_below(4)]);
        const Waveform w = modulate_psbm(s, 1.0, 16, 4.0);
        const std::vector<cplx> r = matched_filter_sample(w, psbm_pulse(16, 4.0), 16);
        const IsiMatrix A(16);
        const std::vector<cplx> y = A.apply(s.symbols);
        for (int i = 0; i < 16; ++i)
            worst = std::max(worst, std::abs(r[static_cast<std::size_t>(i)] -
                                             y[static_cast<std::size_t>(i)]));
    }
    CHECK(worst <= 4.5e-3);
}

TEST(waveform_matches_discrete_model_fine) {
    // doubling d cuts the deviation by an order of magnitude
    Rng rng(4242);
    const auto alphabet = psk_alphabet(4);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        SymbolSequence s;
        for (int i = 0; i < 16; ++i)
            s.symbols.push_back(alphabet[rng.uniform_below(4)]);
        const Waveform w = modulate_psbm(s, 1.0, 32, 8.0);
        const std::vector<cplx> r = matched_filter_sample(w, psbm_pulse(32, 8.0), 16);
        const IsiMatrix A(16);
        const std::vector<cplx> y = A.apply(s.symbols);
        for (int i = 0; i < 16; ++i)
            worst = std::max(worst, std::abs(r[static_cast<std::size_t>(i)] -
                                             y[static_cast<std::size_t>(i)]));
    }
    CHECK(worst <= 6e-4);
}

TEST(waveform_matches_truncated_tap_model_closely) {
    // The engine's only approximation beyond truncation is grid sampling:
    // against the discrete model built from the truncated-pulse correlations
    // themselves (quadrature taps at half-period lags), the residual is an
    // order of magnitude below the (1/2, 1, 1/2) comparison.
    Rng rng(1234);
    const auto alphabet = psk_alphabet(4);
    // overlap-limited correlation of two pulses each truncated to |t| <= d,
    // evaluated by a test-local Simpson rule
    auto truncated_tap = [](double x, double d) {
        const double lo = std::max(-d, x - d), hi = std::min(d, x + d);
        if (hi <= lo)
            return 0.0;
        const int n = 4096;
        double sum = 0.0;
        const double h = (hi - lo) / n;
        for (int i = 0; i <= n; ++i) {
            const double t = lo + h * i;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            sum += w * rrc_value(1.0, t) * rrc_value(1.0, t - x);
        }
        return sum * h / 3.0;
    };
    std::vector<double> taps;
    for (int lag = 0; lag <= 12; ++lag)
        taps.push_back(truncated_tap(0.5 * lag, 4.0));
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        SymbolSequence s;
        for (int i = 0; i < 16; ++i)
            s.symbols.push_back(alphabet[rng.uniform_below(4)]);
        const Waveform w = modulate_psbm(s, 1.0, 16, 4.0);
        const std::vector<cplx> r = matched_filter_sample(w, psbm_pulse(16, 4.0), 16);
        for (int n = 0; n < 16; ++n) {
            cplx y{0.0, 0.0};
            for (int k = 0; k < 16; ++k) {
                const int lag = std::abs(n - k);
                if (lag <= 12)
                    y += s.symbols[static_cast<std::size_t>(k)] *
                         taps[static_cast<std::size_t>(lag)];
            }
            worst = std::max(worst, std::abs(r[static_cast<std::size_t>(n)] - y));
        }
    }
    CHECK(worst <= 4e-4);
}

TEST(energy_per_symbol_long_sequence) {
    Rng rng(99);
    const auto alphabet = psk_alphabet(4);
    SymbolSequence s;
    const int N = 512;
    for (int i = 0; i < N; ++i)
        s.symbols.push_back(alphabet[rng.uniform_below(4)]);
    const Waveform w = modulate_psbm(s, 1.0, 16, 4.0);
    CHECK(std::abs(w.energy() / N - 1.0) <= 0.05);
}

TEST(modulation_linearity) {
    SymbolSequence s1, s2;
    s1.symbols = {cplx(1, 0), cplx(0, 1), cplx(-1, 0)};
    s2.symbols = {cplx(0, -1), cplx(1, 0), cplx(0, 1)};
    const cplx a(0.7, -0.2), b(-1.3, 0.4);
    SymbolSequence mix;
    for (int i = 0; i < 3; ++i)
        mix.symbols.push_back(a * s1.symbols[static_cast<std::size_t>(i)] +
                              b * s2.symbols[static_cast<std::size_t>(i)]);
    const Waveform w1 = modulate_psbm(s1), w2 = modulate_psbm(s2), wm = modulate_psbm(mix);
    for (std::size_t i = 0; i < wm.samples.size(); ++i)
        CHECK_CLOSE(wm.samples[i], a * w1.samples[i] + b * w2.samples[i], 1e-12);
}

TEST(bad_inputs_rejected) {
    SymbolSequence empty;
    CHECK_THROWS(modulate_psbm(empty));
    PulseSpec wrong = psbm_pulse();
    CHECK_THROWS(modulate_nyquist(empty, wrong)); // empty and period != Ts
    SymbolSequence one;
    one.symbols = {cplx(1, 0)};
    CHECK_THROWS(modulate_nyquist(one, wrong)); // period must equal Ts
    Waveform tiny;
    tiny.sample_rate = 16;
    tiny.samples.assign(4, cplx{0, 0});
    CHECK_THROWS(matched_filter_sample(tiny, psbm_pulse(), 1));
}

TEST_MAIN()
