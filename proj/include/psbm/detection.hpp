#pragma once

#include "psbm/link.hpp"
#include "psbm/sequences.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace psbm {

// M-PSK alphabet, point i = exp(j 2 pi i / M), |point| = 1
std::vector<cplx> psk_alphabet(int M);

// binary-reflected Gray mapping between bit labels and constellation indices
inline unsigned gray_encode(unsigned b) { return b ^ (b >> 1); }
unsigned gray_decode(unsigned g);

// nearest alphabet point (first index wins ties)
int slice_index(cplx z, std::span<const cplx> alphabet);

struct DetectorConfig {
    std::vector<cplx> alphabet;
    bool use_wmf = true;
    int max_exhaustive_len = 16; // M^N capped at 2^20 candidates
};

// r A0^{-T} by triangular solve; restores iid noise statistics
std::vector<cplx> whiten(std::span<const cplx> r, const TriangularFactor& A0);

// Exhaustive minimization of || r A0^{-T} - s A diag(h) A0^{-T} ||^2 over the
// alphabet product set (or the unwhitened Euclidean metric when use_wmf is
// false). Candidates are ranked in lexicographic order over (s_0, ..., s_{N-1})
// with s_0 most significant; the first minimizer wins.
std::vector<cplx> ml_detect(std::span<const cplx> r, const IsiMatrix& A,
                            const TriangularFactor& A0, cplx h_hat,
                            const DetectorConfig& cfg);

// Same metric with a subset of positions pinned to known values (pilots,
// zeros); the exhaustive search runs over the unknown positions only and
// h may vary per sample. known_mask is nonzero at pinned positions.
// Returns the full detected block.
std::vector<cplx> ml_detect_masked(std::span<const cplx> r, const TriangularFactor& A0,
                                   std::span<const cplx> h,
                                   std::span<const cplx> known_values,
                                   std::span<const std::uint8_t> known_mask,
                                   const DetectorConfig& cfg);

// per-sample nearest-point decision on r_n / h_hat
std::vector<cplx> symbol_slicer(std::span<const cplx> r, cplx h_hat,
                                std::span<const cplx> alphabet);

struct SicResult {
    std::vector<cplx> a, b;
};

// Streams laid out per the interleaved two-stream model: detects b_n from the
// even samples treating the a-interference as noise, cancels (b_{n-1}+b_n)/2
// from the odd samples, then detects a_n. Input samples should already be
// scaled by 1/h.
SicResult sic_detect(std::span<const cplx> r, std::span<const cplx> alphabet);

struct ChannelEstimate {
    cplx h_hat;
    double error_variance;
};

// LMMSE for a scalar coefficient from pilot observations r = h p + n with
// n ~ CN(0, C) and prior h ~ CN(0, prior_var):
//   h_hat = (p^H C^-1 p + 1/prior_var)^-1 p^H C^-1 r
// noise_cov is dense Hermitian positive definite, row-major.
ChannelEstimate lmmse_estimate(std::span<const cplx> pilot_obs,
                               std::span<const cplx> pilot_vals,
                               std::span<const cplx> noise_cov, double prior_var);

// diagonal-covariance convenience overload
ChannelEstimate lmmse_estimate_diag(std::span<const cplx> pilot_obs,
                                    std::span<const cplx> pilot_vals,
                                    double noise_var, double prior_var);

enum class CombinerVariant {
    as_stated,         // sum_{n=1}^{N} (-1)^n r_{2n-1} over the first N pilots
    decision_directed, // data ISI rebuilt from decisions and subtracted first
    full               // all N+1 pilots; the data terms telescope to zero
};

struct CombinedPilot {
    cplx combined;          // aligned so the noiseless value is n_pilots * h * p
    int n_pilots;
    double residual_power;  // |left-over data interference|^2, when computable
};

// Pilot combining for the alternating-sign frame. r holds the received block;
// data_estimates (decoded or true data, frame order) enables the
// decision-directed variant and the residual report.
CombinedPilot pilot_combiner(std::span<const cplx> r, const Frame& frame,
                             CombinerVariant variant,
                             std::span<const cplx> data_estimates = {});

struct DespreadResult {
    cplx d1, d2;
    cplx d1_interference_coef; // multiplies d2 in the d1 statistic
    cplx d2_interference_coef; // multiplies d1 in the d2 statistic
};

// sum r_{2n-1} conj(c1_n)/N and sum r_{2n} conj(c2_n)/N with the actual
// cross-interference coefficients of the interleaved layout reported.
DespreadResult despread(std::span<const cplx> odd, std::span<const cplx> even,
                        const SpreadingPair& pair);

enum class RepetitionScheme { nyquist, psbm };

// Sum of the data-bearing samples (nyquist: every other slot; psbm: all).
cplx repetition_combine(std::span<const cplx> r, RepetitionScheme scheme);

// Sequential decision-feedback differential decoding of the matched-filter
// samples: joint (c_0, c_1) from the one-sided first sample
// r_0 = c_0 (1 + c_1 / 2), then the closed-form step
// c_n = slice(2 r_{n-1} conj(prod c) - conj(c_{n-1}) - 2).
std::vector<cplx> diff_decode_sequence(std::span<const cplx> r,
                                       std::span<const cplx> alphabet);

// Whitened decision-feedback variant: on z = r A0^{-T} the samples are
// z_n = l_n s_n + m_n s_{n+1} + iid noise, so the running products s_n are
// recovered backward from the interference-free last sample, every step with
// coefficient l_n^2 >= 1/2; differential conversion follows. This is the
// receiver used for the differential BER experiments.
std::vector<cplx> diff_decode_sequence_wmf(std::span<const cplx> r,
                                           const TriangularFactor& A0,
                                           std::span<const cplx> alphabet);

// Zero-ISI baselines for differentially encoded PSK: the classic two-sample
// product detector and coherent slicing followed by differential conversion.
// The reference symbol s_{-1} = 1 is not transmitted.
std::vector<cplx> nyquist_diff_product(std::span<const cplx> r,
                                       std::span<const cplx> alphabet);
std::vector<cplx> nyquist_diff_coherent(std::span<const cplx> r,
                                        std::span<const cplx> alphabet);

} // namespace psbm
