#include "psbm/pulse.hpp"

#include <cmath>
#include <numbers>

namespace psbm {

namespace {

constexpr double kPi = std::numbers::pi;

// numerator sin((1-a) pi t) + 4 a t cos((1+a) pi t) and its first two
// derivatives; denominator pi t (1 - 16 a^2 t^2) and its derivatives.
struct RatioParts {
    double num, num1, num2;
    double den, den1, den2;
};

RatioParts rrc_parts(double alpha, double t) {
    const double a = 1.0 - alpha;
    const double b = 1.0 + alpha;
    const double sa = std::sin(a * kPi * t), ca = std::cos(a * kPi * t);
    const double sb = std::sin(b * kPi * t), cb = std::cos(b * kPi * t);
    RatioParts p;
    p.num = sa + 4.0 * alpha * t * cb;
    p.num1 = a * kPi * ca + 4.0 * alpha * cb - 4.0 * alpha * b * kPi * t * sb;
    p.num2 = -a * a * kPi * kPi * sa - 8.0 * alpha * b * kPi * sb -
             4.0 * alpha * b * b * kPi * kPi * t * cb;
    p.den = kPi * t * (1.0 - 16.0 * alpha * alpha * t * t);
    p.den1 = kPi - 48.0 * kPi * alpha * alpha * t * t;
    p.den2 = -96.0 * kPi * alpha * alpha * t;
    return p;
}

// Two-term expansion of num/den about the removable singularity at t0:
// limit + slope * (t - t0), with limit = num'/den' and the slope from the
// second-order terms. Valid because num(t0) = den(t0) = 0 and den'(t0) != 0.
double ratio_at_singularity(double alpha, double t0, double t) {
    const RatioParts p = rrc_parts(alpha, t0);
    const double limit = p.num1 / p.den1;
    const double slope = (p.num2 * p.den1 - p.num1 * p.den2) / (2.0 * p.den1 * p.den1);
    return limit + slope * (t - t0);
}

} // namespace

double rrc_value(double alpha, double t) {
    if (alpha < 0.0)
        throw std::invalid_argument("rrc_value: alpha must be >= 0");
    // window around t = 0 (den ~ pi t)
    if (std::abs(t) < 1e-9)
        return ratio_at_singularity(alpha, 0.0, t);
    if (alpha > 0.0) {
        const double t0 = 1.0 / (4.0 * alpha);
        if (std::abs(1.0 - 16.0 * alpha * alpha * t * t) < 1e-6)
            return ratio_at_singularity(alpha, t < 0 ? -t0 : t0, t);
    }
    const double a = 1.0 - alpha;
    const double b = 1.0 + alpha;
    const double num = std::sin(a * kPi * t) + 4.0 * alpha * t * std::cos(b * kPi * t);
    const double den = kPi * t * (1.0 - 16.0 * alpha * alpha * t * t);
    return num / den;
}

double rrc1_value(double t) {
    const double u = std::abs(t);
    const double den = 1.0 - 16.0 * u * u;
    if (std::abs(den) < 1e-6) {
        // rrc1(1/4 + e) = 1 - 2e + O(e^2)
        return 1.0 - 2.0 * (u - 0.25);
    }
    return 4.0 * std::cos(2.0 * kPi * u) / (kPi * den);
}

double rrc_spectrum(double alpha, double f) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("rrc_spectrum: alpha must be in [0, 1]");
    const double af = std::abs(f);
    const double lo = (1.0 - alpha) / 2.0;
    const double hi = (1.0 + alpha) / 2.0;
    if (af <= lo)
        return 1.0;
    if (af >= hi)
        return 0.0;
    return std::cos(kPi / (2.0 * alpha) * (af - lo));
}

double rrc1_spectrum(double f) {
    const double af = std::abs(f);
    if (af > 1.0)
        return 0.0;
    return std::cos(kPi * f / 2.0);
}

double pulse_inner_product(double alpha, double offset, double d, int steps_per_period) {
    if (d <= 0.0)
        throw std::invalid_argument("pulse_inner_product: d must be > 0");
    long n = std::lround(2.0 * d * steps_per_period);
    if (n < 2)
        n = 2;
    if (n % 2)
        ++n;
    const double h = 2.0 * d / static_cast<double>(n);
    auto f = [&](double t) { return rrc_value(alpha, t) * rrc_value(alpha, t - offset); };
    double sum = f(-d) + f(d);
    for (long i = 1; i < n; ++i) {
        const double t = -d + h * static_cast<double>(i);
        sum += (i % 2 ? 4.0 : 2.0) * f(t);
    }
    return sum * h / 3.0;
}

double lemma1_exact(int n) {
    if (n < 0)
        throw std::invalid_argument("lemma1_exact: n must be >= 0");
    if (n == 0)
        return 1.0;
    if (n == 1)
        return 8.0 / (3.0 * kPi);
    if (n == 2)
        return 0.5;
    if (n % 2 == 0)
        return 0.0;
    const double mag = 8.0 / (kPi * static_cast<double>(n - 2) * n * (n + 2));
    // sign of sinc(n/4) cos(pi n/4) / (1 - n^2/4) for odd n
    return (((n + 1) / 2) % 2 == 0) ? mag : -mag;
}

std::vector<TruncationRow> truncation_study(std::span<const int> n_values,
                                            std::span<const double> d_grid,
                                            int steps_per_period) {
    std::vector<TruncationRow> table;
    table.reserve(n_values.size() * d_grid.size());
    for (int n : n_values) {
        const double exact = lemma1_exact(n);
        const bool zero = (n > 2 && n % 2 == 0) || exact == 0.0;
        for (double d : d_grid) {
            const double v = pulse_inner_product(1.0, n / 4.0, d, steps_per_period);
            TruncationRow row{n, d, v, exact, 0.0, zero};
            row.ratio = zero ? std::abs(v) : v / exact;
            table.push_back(row);
        }
    }
    return table;
}

double psd(const PulseSpec& pulse, std::span<const std::complex<double>> symbol_autocorr,
           double f, double Ts) {
    pulse.validate();
    if (symbol_autocorr.empty() || symbol_autocorr[0].real() <= 0.0)
        throw std::invalid_argument("psd: R_s(0) must be positive");
    const double Tp = pulse.period * Ts;
    const double P = rrc_spectrum(pulse.alpha, Tp * f); // transform of the period-1 prototype
    // unit-energy pulse of period Tp has |P(f)|^2 = Tp |RRC(Tp f)|^2
    const double mag2 = Tp * P * P;
    double s = symbol_autocorr[0].real();
    for (std::size_t k = 1; k < symbol_autocorr.size(); ++k) {
        const double ph = 2.0 * kPi * f * static_cast<double>(k) * Ts;
        s += 2.0 * (symbol_autocorr[k].real() * std::cos(ph) -
                    symbol_autocorr[k].imag() * std::sin(ph));
    }
    return mag2 / Ts * s;
}

namespace detail {

PulseTable::PulseTable(double alpha, double d, double max_offset, int steps_per_period)
    : steps_(steps_per_period), d_(d) {
    half_ = static_cast<int>(std::lround(d * steps_));
    const int table_max = half_ + static_cast<int>(std::lround(max_offset * steps_)) + 1;
    values_.resize(static_cast<std::size_t>(table_max) + 1);
    for (int i = 0; i <= table_max; ++i)
        values_[static_cast<std::size_t>(i)] = rrc_value(alpha, static_cast<double>(i) / steps_);
    const int n = 2 * half_; // subintervals over [-d, d], even
    weights_.resize(static_cast<std::size_t>(n) + 1);
    const double h3 = (1.0 / steps_) / 3.0;
    for (int i = 0; i <= n; ++i) {
        double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        weights_[static_cast<std::size_t>(i)] = w * h3;
    }
}

double PulseTable::inner_product(double offset) const {
    const double so = offset * steps_;
    const long shift = std::lround(so);
    if (std::abs(so - static_cast<double>(shift)) > 1e-9)
        throw std::invalid_argument("PulseTable: offset not on the table grid");
    // t_i = (i - half_)/steps_, need rrc(t_i) * rrc(t_i - offset)
    double sum = 0.0;
    const int n = 2 * half_;
    for (int i = 0; i <= n; ++i) {
        const long a = std::labs(static_cast<long>(i) - half_);
        const long b = std::labs(static_cast<long>(i) - half_ - shift);
        sum += weights_[static_cast<std::size_t>(i)] * values_[static_cast<std::size_t>(a)] *
               values_[static_cast<std::size_t>(b)];
    }
    return sum;
}

} // namespace detail

} // namespace psbm
