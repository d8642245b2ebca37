#pragma once

#include "psbm/rng.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace psbm {

enum class Role { pilot, data, zero };

struct FramePosition {
    Role role;
    cplx value;
};

// Symbol sequence with per-position roles: pilot groups, data groups, zero
// separators. Zero-role positions carry exactly 0.
struct Frame {
    std::vector<FramePosition> positions;
    int Ld = 0;
    int Lp = 0;

    std::size_t size() const { return positions.size(); }
    std::vector<cplx> symbols() const;
    std::vector<std::size_t> indices_of(Role r) const;

    // one line per position: "role,re,im"
    std::string serialize() const;
    static Frame parse(std::istream& in);
    void validate() const;
};

// Alternating groups [Lp pilots] 0 [Ld data] 0 ... 0 [Lp pilots]; starts and
// ends with a pilot group. data length must be a multiple of Ld.
Frame build_frame(int Ld, int Lp, std::span<const cplx> data, cplx pilot);

// (-p, d1, p, d2, -p, d3, ...), closing pilot +p for odd N, -p for even N.
// At every data position the two adjacent pilots cancel in the (1/2, 1, 1/2)
// channel, so the noiseless sample there is exactly h d_k.
Frame alternating_pilot_sequence(std::span<const cplx> data, cplx pilot);

// Noiseless (1/2, 1, 1/2) ISI residual per position: (s_{k-1} + s_{k+1})/2.
std::vector<cplx> verify_isi_free_subsequence(std::span<const cplx> seq);

// Sum of the two middle-pilot samples of (d1, p, p, -d1); noiseless value
// 3 h p, combined noise variance 3 sigma_w^2 (adjacent samples correlated).
cplx double_pilot_combine(cplx r_n, cplx r_n1);

struct RepetitionPair {
    std::vector<cplx> nyquist; // (d, 0, d, 0, ..., 0, d), N copies
    std::vector<cplx> psbm;    // (d, d, ..., d)/sqrt(2), 2N-1 copies
};

RepetitionPair repetition_sequences(int N, cplx d = 1.0);

// combiner SNR exponents gamma ~ N (nyquist) and ~ 2N - 3/2 (psbm)
inline double repetition_snr_ratio(int N) { return (2.0 * N - 1.5) / N; }

enum class SpreadKind { walsh, random_pm1 };

struct SpreadingPair {
    std::vector<cplx> c1, c2;
    cplx aligned_cross; // sum c1_n conj(c2_n)... see make-function doc
    cplx shifted_cross; // sum c2_{n+1} conj(c1_n), boundary term zero

    static SpreadingPair from_sequences(std::vector<cplx> c1, std::vector<cplx> c2);
};

// walsh: rows 0 and N/2 of the order-N Hadamard construction (N a power of
// two), exactly orthogonal. random_pm1: iid +-1 entries; if
// max_aligned_cross >= 0, rejection-samples until |aligned_cross| is within
// the bound (throws after too many attempts).
SpreadingPair make_spreading_pair(SpreadKind kind, int N, Rng& rng,
                                  double max_aligned_cross = -1.0);

// P(sum of N iid +-1 products equals 0) = C(N, N/2) 2^-N; zero for odd N
double orthogonality_probability(int N);

// P(|S| <= round(kappa N / 2)) from the binomial law S = 2K - N; the sum runs
// over achievable values of S (same parity as N), round-half-away-from-zero.
double near_orthogonality_probability(int N, double kappa);

struct SpreadStreams {
    std::vector<cplx> a, b;       // a_n = d1 c1_n, b_n = d2 c2_n
    std::vector<cplx> interleaved; // (a_1, b_1, a_2, b_2, ...)
};

SpreadStreams spread_streams(cplx d1, cplx d2, const SpreadingPair& pair);

// Differential PSK stream: s_k = c_k s_{k-1} with reference s_{-1} = 1;
// data symbols must be unit-modulus.
std::vector<cplx> diff_encode(std::span<const cplx> c);

// Raw decode statistic 2 r_n conj(past) - conj(c_prev) - 2, where past is the
// running product of decided data symbols through index n-1.
cplx diff_decode_step_raw(cplx r_n, cplx past, cplx c_prev);

} // namespace psbm
