#include "psbm/link.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace psbm {

IsiMatrix::IsiMatrix(int order) : n_(order) {
    if (order < 1)
        throw std::invalid_argument("IsiMatrix: order must be >= 1");
}

double IsiMatrix::entry(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_)
        throw std::out_of_range("IsiMatrix::entry");
    const int d = i - j;
    if (d == 0)
        return 1.0;
    if (d == 1 || d == -1)
        return 0.5;
    return 0.0;
}

std::vector<cplx> IsiMatrix::apply(std::span<const cplx> s) const {
    if (static_cast<int>(s.size()) != n_)
        throw std::invalid_argument("IsiMatrix::apply: size mismatch");
    std::vector<cplx> y(s.begin(), s.end());
    for (int i = 0; i < n_; ++i) {
        if (i > 0)
            y[static_cast<std::size_t>(i)] += 0.5 * s[static_cast<std::size_t>(i - 1)];
        if (i + 1 < n_)
            y[static_cast<std::size_t>(i)] += 0.5 * s[static_cast<std::size_t>(i + 1)];
    }
    return y;
}

double IsiMatrix::min_eigenvalue() const {
    return 1.0 + std::cos(static_cast<double>(n_) * std::numbers::pi / (n_ + 1.0));
}

TriangularFactor factorize(const IsiMatrix& A) {
    const int n = A.order();
    TriangularFactor f;
    f.diag_.resize(static_cast<std::size_t>(n));
    f.sub_.resize(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
    f.diag_[0] = 1.0;
    for (int i = 1; i < n; ++i) {
        f.sub_[static_cast<std::size_t>(i - 1)] = 0.5 / f.diag_[static_cast<std::size_t>(i - 1)];
        const double rad = 1.0 - f.sub_[static_cast<std::size_t>(i - 1)] *
                                     f.sub_[static_cast<std::size_t>(i - 1)];
        if (rad <= 0.0)
            throw std::runtime_error("factorize: loss of positive definiteness");
        f.diag_[static_cast<std::size_t>(i)] = std::sqrt(rad);
    }
    return f;
}

std::vector<cplx> TriangularFactor::color(std::span<const cplx> w) const {
    const int n = order();
    if (static_cast<int>(w.size()) != n)
        throw std::invalid_argument("TriangularFactor::color: size mismatch");
    std::vector<cplx> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        y[static_cast<std::size_t>(i)] = diag_[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
        if (i > 0)
            y[static_cast<std::size_t>(i)] +=
                sub_[static_cast<std::size_t>(i - 1)] * w[static_cast<std::size_t>(i - 1)];
    }
    return y;
}

std::vector<cplx> TriangularFactor::solve_transposed(std::span<const cplx> r) const {
    const int n = order();
    if (static_cast<int>(r.size()) != n)
        throw std::invalid_argument("TriangularFactor::solve_transposed: size mismatch");
    std::vector<cplx> y(static_cast<std::size_t>(n));
    y[0] = r[0] / diag_[0];
    for (int i = 1; i < n; ++i)
        y[static_cast<std::size_t>(i)] =
            (r[static_cast<std::size_t>(i)] -
             sub_[static_cast<std::size_t>(i - 1)] * y[static_cast<std::size_t>(i - 1)]) /
            diag_[static_cast<std::size_t>(i)];
    return y;
}

double TriangularFactor::reconstruction_residual() const {
    const int n = order();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = std::max(0, i - 1); j <= std::min(n - 1, i + 1); ++j) {
            // (A0 A0^T)_{ij} = sum_k A0_{ik} A0_{jk}
            double v = 0.0;
            if (i == j) {
                v = diag_[static_cast<std::size_t>(i)] * diag_[static_cast<std::size_t>(i)];
                if (i > 0)
                    v += sub_[static_cast<std::size_t>(i - 1)] * sub_[static_cast<std::size_t>(i - 1)];
            } else {
                const int k = std::min(i, j);
                v = diag_[static_cast<std::size_t>(k)] * sub_[static_cast<std::size_t>(k)];
            }
            const double want = (i == j) ? 1.0 : 0.5;
            worst = std::max(worst, std::abs(v - want));
        }
    }
    return worst;
}

NoiseBlock gen_noise(int N, double sigma_w, NoiseMethod method, Rng& rng) {
    if (N < 1)
        throw std::invalid_argument("gen_noise: N must be >= 1");
    if (sigma_w <= 0.0)
        throw std::invalid_argument("gen_noise: sigma_w must be > 0");
    NoiseBlock out;
    out.sigma_w = sigma_w;
    const double var = sigma_w * sigma_w;
    if (method == NoiseMethod::triangular) {
        std::vector<cplx> u(static_cast<std::size_t>(N));
        for (auto& z : u)
            z = rng.cgauss(var);
        const TriangularFactor f = factorize(IsiMatrix(N));
        out.samples = f.color(u);
    } else {
        cplx prev = rng.cgauss(var);
        out.samples.resize(static_cast<std::size_t>(N));
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (int i = 0; i < N; ++i) {
            const cplx cur = rng.cgauss(var);
            out.samples[static_cast<std::size_t>(i)] = (cur + prev) * inv_sqrt2;
            prev = cur;
        }
    }
    return out;
}

std::vector<cplx> transmit(std::span<const cplx> s, std::span<const cplx> h,
                           double sigma_w, Rng& rng) {
    if (s.size() != h.size())
        throw std::invalid_argument("transmit: s and h must have equal length");
    const int N = static_cast<int>(s.size());
    const IsiMatrix A(N);
    std::vector<cplx> r = A.apply(s);
    for (int i = 0; i < N; ++i)
        r[static_cast<std::size_t>(i)] *= h[static_cast<std::size_t>(i)];
    if (sigma_w > 0.0) {
        const NoiseBlock nb = gen_noise(N, sigma_w, NoiseMethod::triangular, rng);
        for (int i = 0; i < N; ++i)
            r[static_cast<std::size_t>(i)] += nb.samples[static_cast<std::size_t>(i)];
    }
    return r;
}

std::vector<cplx> transmit_nyquist(std::span<const cplx> s, std::span<const cplx> h,
                                   double sigma_w, Rng& rng) {
    if (s.size() != h.size())
        throw std::invalid_argument("transmit_nyquist: s and h must have equal length");
    std::vector<cplx> r(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        r[i] = s[i] * h[i];
        if (sigma_w > 0.0)
            r[i] += rng.cgauss(sigma_w * sigma_w);
    }
    return r;
}

double noise_sum_variance(int N) {
    if (N < 1)
        throw std::invalid_argument("noise_sum_variance: N must be >= 1");
    return 2.0 * N - 1.0;
}

TwoStreams two_stream_view(std::span<const cplx> r) {
    TwoStreams out;
    for (std::size_t i = 0; i < r.size(); ++i)
        (i % 2 == 0 ? out.odd : out.even).push_back(r[i]);
    return out;
}

} // namespace psbm
