#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace psbm {

// One root raised-cosine pulse. Time is measured in pulse periods Tp unless
// stated otherwise; the pulse itself is unit-energy on an infinite interval.
struct PulseSpec {
    double alpha = 1.0;        // roll-off, 0 <= alpha <= 2
    double period = 1.0;       // Tp in symbol periods Ts
    double trunc_halfwidth = 4.0; // d, in units of Tp
    int oversampling = 16;     // samples per Tp

    void validate() const {
        if (alpha < 0.0 || alpha > 2.0)
            throw std::invalid_argument("PulseSpec: alpha must be in [0, 2]");
        if (period <= 0.0)
            throw std::invalid_argument("PulseSpec: period must be > 0");
        if (trunc_halfwidth <= 0.0)
            throw std::invalid_argument("PulseSpec: trunc_halfwidth must be > 0");
        if (oversampling < 2)
            throw std::invalid_argument("PulseSpec: oversampling must be >= 2");
    }
};

// ISI tap profile at a given symbol spacing: value(k) for |k| <= max_lag,
// even-symmetric by construction.
struct IsiTapProfile {
    std::vector<double> taps_nonneg; // taps_nonneg[k] = value at lag +-k, k = 0..max_lag
    double symbol_spacing = 1.0;     // (1 - tau), in units of Tp

    int max_lag() const { return static_cast<int>(taps_nonneg.size()) - 1; }
    double tap(int k) const { return taps_nonneg[static_cast<std::size_t>(k < 0 ? -k : k)]; }
};

// rrc_alpha(t) with t in pulse periods. Removable singularities at t = 0 and
// |t| = 1/(4 alpha) are evaluated by a two-term expansion of numerator and
// denominator, so the function is total and continuous.
double rrc_value(double alpha, double t);

// Closed form for alpha = 1: 4 cos(2 pi t) / (pi (1 - 16 t^2)), limit 1 at |t| = 1/4.
double rrc1_value(double t);

// Fourier transform of the unit-energy RRC pulse (pulse period 1), real and
// even. Supported only for alpha in [0, 1]; support is |f| <= (1 + alpha)/2.
double rrc_spectrum(double alpha, double f);

// Spectrum of rrc1: cos(pi f / 2) for |f| <= 1, else 0.
double rrc1_spectrum(double f);

// Composite-Simpson value of \int_{-d}^{+d} rrc_a(t) rrc_a(t - offset) dt.
// steps_per_period picks the grid (default 1024 subintervals per Tp); absolute
// accuracy is well below 1e-8 for the pulse family used here.
double pulse_inner_product(double alpha, double offset, double d,
                           int steps_per_period = 1024);

// Exact value of \int rrc1(t) rrc1(t - n/4) dt over the infinite interval.
// Equals the 100% roll-off raised-cosine autocorrelation sampled at quarter
// periods: sinc(n/4) cos(pi n/4) / (1 - n^2/4). For odd n > 1 this carries the
// sign (-1)^((n+1)/2) on 8/(pi (n-2) n (n+2)); magnitudes match the tabulated
// closed form, and the sign is verified against quadrature in the tests.
double lemma1_exact(int n);

struct TruncationRow {
    int n;
    double d;
    double value;    // truncated integral
    double exact;    // infinite-interval value
    double ratio;    // value/exact, or the absolute value when exact == 0
    bool exact_zero; // true for even n > 2
};

// Convergence table of the truncated integral versus d.
std::vector<TruncationRow> truncation_study(std::span<const int> n_values,
                                            std::span<const double> d_grid,
                                            int steps_per_period = 1024);

// PSD of a linearly modulated signal: (1/Ts) |P(f)|^2 sum_k R_s(k) e^{j2pi f k Ts}
// with P the transform of the unit-energy pulse of period Tp = pulse.period * Ts.
// f is in cycles per Ts; symbol_autocorr holds R_s(0..K), conjugate symmetry is
// assumed for negative lags. With pulse.period = 2 and uncorrelated unit-energy
// symbols this gives 2 |RRC1(2 f)|^2.
double psd(const PulseSpec& pulse, std::span<const std::complex<double>> symbol_autocorr,
           double f, double Ts = 1.0);

// Symbols per second per (one-sided) Hz of occupied bandwidth.
inline double spectral_efficiency_nyquist(double alpha) { return 2.0 / (1.0 + alpha); }
inline double spectral_efficiency_psbm() { return 2.0; }

namespace detail {

// Per-alpha cached pulse table for fast inner products at grid-aligned offsets.
// Step is 1/400 Tp, which divides both the quarter-period lags of the closed
// form and the 0.01 grids used by the plane scan.
class PulseTable {
  public:
    PulseTable(double alpha, double d, double max_offset, int steps_per_period = 400);

    // offset must be a multiple of the table step (within 1e-9)
    double inner_product(double offset) const;

    double step() const { return 1.0 / steps_; }

  private:
    int steps_;
    int half_;              // grid points in [0, d]
    std::vector<double> values_; // rrc at |t| = i/steps_, i = 0..table_max_
    std::vector<double> weights_; // Simpson weights * h/3 over [-d, d]
    double d_;
};

} // namespace detail

} // namespace psbm
