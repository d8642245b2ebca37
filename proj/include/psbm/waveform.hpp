#pragma once

#include "psbm/pulse.hpp"
#include "psbm/rng.hpp"

#include <span>
#include <vector>

namespace psbm {

// Oversampled complex baseband waveform. Time is in symbol periods Ts.
struct Waveform {
    std::vector<cplx> samples;
    double sample_rate = 16.0; // samples per Ts
    double t0 = 0.0;           // time of samples[0]

    double energy() const; // sum |x|^2 / sample_rate
};

struct SymbolSequence {
    std::vector<cplx> symbols;
    double energy = 1.0; // Es target
};

// x(t) = sum_k s_k p(t - k), pulse period = Ts (tau = 0), truncated to
// +-trunc_halfwidth periods. Validation-grade direct superposition.
Waveform modulate_nyquist(const SymbolSequence& s, const PulseSpec& pulse);

// x(t) = sum_k s_k rrc1((t - k Ts) / (2 Ts)) / sqrt(2 Ts): pulse period 2 Ts,
// one symbol every Ts.
Waveform modulate_psbm(const SymbolSequence& s, double Ts = 1.0, int oversampling = 16,
                       double trunc_halfwidth = 4.0);

// r_n = (y (*) p*(-t)) at t = n Ts; for RRC p*(-t) = p(t). The pulse argument
// must describe the same pulse used at the transmitter (period in Ts units).
std::vector<cplx> matched_filter_sample(const Waveform& y, const PulseSpec& pulse,
                                        int n_symbols);

} // namespace psbm
