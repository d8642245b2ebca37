#include "psbm/waveform.hpp"

#include <cmath>
#include <stdexcept>

namespace psbm {

namespace {

// sampled unit-energy pulse g(t) = rrc_a(t/Tp)/sqrt(Tp) on the oversampling
// grid, truncated to |t| <= d Tp; support is centered and grid-aligned
std::vector<double> sample_pulse(const PulseSpec& p, int os) {
    const double Tp = p.period;
    const int half = static_cast<int>(std::lround(p.trunc_halfwidth * Tp * os));
    std::vector<double> g(static_cast<std::size_t>(2 * half) + 1);
    const double norm = 1.0 / std::sqrt(Tp);
    for (int i = -half; i <= half; ++i) {
        const double t = static_cast<double>(i) / os;
        g[static_cast<std::size_t>(i + half)] = norm * rrc_value(p.alpha, t / Tp);
    }
    return g;
}

Waveform superpose(std::span<const cplx> s, const PulseSpec& p, int os) {
    if (s.empty())
        throw std::invalid_argument("modulate: empty symbol sequence");
    const std::vector<double> g = sample_pulse(p, os);
    const int half = (static_cast<int>(g.size()) - 1) / 2;
    const int n = static_cast<int>(s.size());
    Waveform w;
    w.sample_rate = os;
    w.t0 = -static_cast<double>(half) / os;
    w.samples.assign(static_cast<std::size_t>((n - 1) * os + 2 * half) + 1, cplx{0.0, 0.0});
    for (int k = 0; k < n; ++k) {
        const int base = k * os; // pulse k starts at sample index base
        for (int i = 0; i < static_cast<int>(g.size()); ++i)
            w.samples[static_cast<std::size_t>(base + i)] +=
                s[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(i)];
    }
    return w;
}

} // namespace

double Waveform::energy() const {
    double e = 0.0;
    for (const cplx& z : samples)
        e += std::norm(z);
    return e / sample_rate;
}

Waveform modulate_nyquist(const SymbolSequence& s, const PulseSpec& pulse) {
    pulse.validate();
    if (std::abs(pulse.period - 1.0) > 1e-12)
        throw std::invalid_argument("modulate_nyquist: pulse period must equal Ts");
    return superpose(s.symbols, pulse, pulse.oversampling);
}

Waveform modulate_psbm(const SymbolSequence& s, double Ts, int oversampling,
                       double trunc_halfwidth) {
    if (Ts <= 0.0)
        throw std::invalid_argument("modulate_psbm: Ts must be > 0");
    PulseSpec p;
    p.alpha = 1.0;
    p.period = 2.0; // 2 Ts, in Ts units
    p.trunc_halfwidth = trunc_halfwidth;
    p.oversampling = oversampling;
    Waveform w = superpose(s.symbols, p, oversampling);
    if (Ts != 1.0) {
        w.sample_rate /= Ts;
        w.t0 *= Ts;
    }
    return w;
}

std::vector<cplx> matched_filter_sample(const Waveform& y, const PulseSpec& pulse,
                                        int n_symbols) {
    pulse.validate();
    const int os = static_cast<int>(std::lround(y.sample_rate));
    const std::vector<double> g = sample_pulse(pulse, os);
    const int half = (static_cast<int>(g.size()) - 1) / 2;
    if (static_cast<int>(y.samples.size()) < static_cast<int>(g.size()))
        throw std::invalid_argument("matched_filter_sample: waveform shorter than pulse support");
    std::vector<cplx> r(static_cast<std::size_t>(n_symbols));
    const long base0 = std::lround(-y.t0 * os); // sample index of t = 0
    for (int n = 0; n < n_symbols; ++n) {
        // integral of y(t) g(t - n) over the pulse support, rectangle rule
        cplx acc{0.0, 0.0};
        const long center = base0 + static_cast<long>(n) * os;
        for (int i = -half; i <= half; ++i) {
            const long idx = center + i;
            if (idx < 0 || idx >= static_cast<long>(y.samples.size()))
                continue;
            acc += y.samples[static_cast<std::size_t>(idx)] * g[static_cast<std::size_t>(i + half)];
        }
        r[static_cast<std::size_t>(n)] = acc / y.sample_rate;
    }
    return r;
}

} // namespace psbm
