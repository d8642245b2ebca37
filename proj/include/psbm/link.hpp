#pragma once

#include "psbm/rng.hpp"

#include <span>
#include <vector>

namespace psbm {

// Symmetric tridiagonal ISI matrix of the half-packed 100%-roll-off channel:
// unit diagonal, 1/2 off-diagonals. Stored implicitly by order.
class IsiMatrix {
  public:
    explicit IsiMatrix(int order);

    int order() const { return n_; }
    double entry(int i, int j) const;

    // y = s A (= A s by symmetry); first and last entries see one-sided ISI
    std::vector<cplx> apply(std::span<const cplx> s) const;

    // smallest eigenvalue 1 + cos(N pi / (N+1)), positive for every finite N
    double min_eigenvalue() const;

  private:
    int n_;
};

// Lower-bidiagonal factor A0 with A = A0 A0^T: diagonal l_i, subdiagonal m_i.
// l_i^2 = (i+2)/(2(i+1)) for 0-based i, so the recursion never loses
// positive definiteness.
class TriangularFactor {
  public:
    int order() const { return static_cast<int>(diag_.size()); }
    double diag(int i) const { return diag_[static_cast<std::size_t>(i)]; }
    double sub(int i) const { return sub_[static_cast<std::size_t>(i)]; } // entry (i+1, i)

    // y = w A0^T : y_i = l_i w_i + m_{i-1} w_{i-1}
    std::vector<cplx> color(std::span<const cplx> w) const;

    // solve y A0^T = r (forward substitution); inverse of color()
    std::vector<cplx> solve_transposed(std::span<const cplx> r) const;

    // max-abs residual of A0 A0^T against the tridiagonal ISI matrix
    double reconstruction_residual() const;

    friend TriangularFactor factorize(const IsiMatrix& A);

  private:
    std::vector<double> diag_;
    std::vector<double> sub_;
};

TriangularFactor factorize(const IsiMatrix& A);

enum class NoiseMethod { triangular, fir };

struct NoiseBlock {
    std::vector<cplx> samples;
    double sigma_w;
};

// Colored noise with R_w(0) = sigma^2, R_w(1) = sigma^2/2, R_w(|k|>1) = 0.
// triangular: w = u A0^T, exact covariance sigma^2 A for the finite block.
// fir: w_n = (u_n + u_{n-1})/sqrt(2), stationary, asymptotically equivalent.
NoiseBlock gen_noise(int N, double sigma_w, NoiseMethod method, Rng& rng);

// r = s A diag(h) + w A0^T with w iid CN(0, sigma_w^2) before coloring.
// h holds one gain per received sample.
std::vector<cplx> transmit(std::span<const cplx> s, std::span<const cplx> h,
                           double sigma_w, Rng& rng);

// Zero-ISI reference channel: r_n = h_n s_n + w_n with w iid CN(0, sigma_w^2).
std::vector<cplx> transmit_nyquist(std::span<const cplx> s, std::span<const cplx> h,
                                   double sigma_w, Rng& rng);

// Var(sum of N correlated noise samples) in units of sigma_w^2
double noise_sum_variance(int N);

struct TwoStreams {
    std::vector<cplx> odd;  // samples r_1, r_3, ... (1-based), i.e. even 0-based indices
    std::vector<cplx> even; // samples r_2, r_4, ...
};

TwoStreams two_stream_view(std::span<const cplx> r);

} // namespace psbm
