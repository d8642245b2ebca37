#include "psbm/detection.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace psbm {

namespace {

// dense Hermitian positive-definite solve via Cholesky, row-major, in-place
// copies; sizes here are tiny (pilot counts)
std::vector<cplx> hermitian_solve(std::span<const cplx> Ain, std::span<const cplx> b) {
    const std::size_t n = b.size();
    if (Ain.size() != n * n)
        throw std::invalid_argument("hermitian_solve: dimension mismatch");
    std::vector<cplx> L(Ain.begin(), Ain.end());
    for (std::size_t j = 0; j < n; ++j) {
        double d = L[j * n + j].real();
        for (std::size_t k = 0; k < j; ++k)
            d -= std::norm(L[j * n + k]);
        if (d <= 0.0)
            throw std::invalid_argument("hermitian_solve: matrix not positive definite");
        const double dj = std::sqrt(d);
        L[j * n + j] = dj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s = L[i * n + j];
            for (std::size_t k = 0; k < j; ++k)
                s -= L[i * n + k] * std::conj(L[j * n + k]);
            L[i * n + j] = s / dj;
        }
    }
    std::vector<cplx> y(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k)
            y[i] -= L[i * n + k] * y[k];
        y[i] /= L[i * n + i].real();
    }
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n; ++k)
            y[ii] -= std::conj(L[k * n + ii]) * y[k];
        y[ii] /= L[ii * n + ii].real();
    }
    return y;
}

// s A with per-sample gains: out_n = h_n (s_n + (s_{n-1} + s_{n+1})/2)
std::vector<cplx> isi_apply_h(std::span<const cplx> s, std::span<const cplx> h) {
    const std::size_t n = s.size();
    std::vector<cplx> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx v = s[i];
        if (i > 0)
            v += 0.5 * s[i - 1];
        if (i + 1 < n)
            v += 0.5 * s[i + 1];
        y[i] = v * h[i];
    }
    return y;
}

} // namespace

std::vector<cplx> psk_alphabet(int M) {
    if (M < 2)
        throw std::invalid_argument("psk_alphabet: M must be >= 2");
    std::vector<cplx> a(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) {
        const double ph = 2.0 * std::numbers::pi * i / M;
        double re = std::cos(ph), im = std::sin(ph);
        // snap the cardinal points so products and comparisons stay exact
        if (std::abs(re) < 1e-15) re = 0.0;
        if (std::abs(im) < 1e-15) im = 0.0;
        if (std::abs(re - 1.0) < 1e-15) re = 1.0;
        if (std::abs(re + 1.0) < 1e-15) re = -1.0;
        if (std::abs(im - 1.0) < 1e-15) im = 1.0;
        if (std::abs(im + 1.0) < 1e-15) im = -1.0;
        a[static_cast<std::size_t>(i)] = {re, im};
    }
    return a;
}

unsigned gray_decode(unsigned g) {
    unsigned b = 0;
    for (; g; g >>= 1)
        b ^= g;
    return b;
}

int slice_index(cplx z, std::span<const cplx> alphabet) {
    int best = 0;
    double best_d = std::norm(z - alphabet[0]);
    for (int i = 1; i < static_cast<int>(alphabet.size()); ++i) {
        const double d = std::norm(z - alphabet[static_cast<std::size_t>(i)]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<cplx> whiten(std::span<const cplx> r, const TriangularFactor& A0) {
    return A0.solve_transposed(r);
}

std::vector<cplx> ml_detect_masked(std::span<const cplx> r, const TriangularFactor& A0,
                                   std::span<const cplx> h,
                                   std::span<const cplx> known_values,
                                   std::span<const std::uint8_t> known_mask,
                                   const DetectorConfig& cfg) {
    const std::size_t N = r.size();
    if (h.size() != N || known_values.size() != N || known_mask.size() != N)
        throw std::invalid_argument("ml_detect_masked: dimension mismatch");
    const int M = static_cast<int>(cfg.alphabet.size());
    if (M < 2)
        throw std::invalid_argument("ml_detect_masked: alphabet too small");

    std::vector<std::size_t> unknown;
    for (std::size_t i = 0; i < N; ++i)
        if (!known_mask[i])
            unknown.push_back(i);
    const std::size_t U = unknown.size();
    double cand_count = std::pow(static_cast<double>(M), static_cast<double>(U));
    if (U > static_cast<std::size_t>(cfg.max_exhaustive_len) || cand_count > double(1 << 20))
        throw std::invalid_argument("ml_detect_masked: M^N exceeds the exhaustive limit");
    const std::size_t total = static_cast<std::size_t>(cand_count);

    // observation and hypothesis in the chosen metric domain
    auto to_domain = [&](std::span<const cplx> v) {
        return cfg.use_wmf ? A0.solve_transposed(v) : std::vector<cplx>(v.begin(), v.end());
    };
    const std::vector<cplx> z = to_domain(r);

    // fixed part from the known symbols, and one basis vector per unknown
    std::vector<cplx> s_known(N, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < N; ++i)
        if (known_mask[i])
            s_known[i] = known_values[i];
    const std::vector<cplx> base = to_domain(isi_apply_h(s_known, h));

    std::vector<cplx> zr(N); // z - base
    for (std::size_t i = 0; i < N; ++i)
        zr[i] = z[i] - base[i];

    std::vector<std::vector<cplx>> basis(U);
    {
        std::vector<cplx> e(N, cplx{0.0, 0.0});
        for (std::size_t u = 0; u < U; ++u) {
            e[unknown[u]] = 1.0;
            basis[u] = to_domain(isi_apply_h(e, h));
            e[unknown[u]] = 0.0;
        }
    }

    // metric(c) = ||zr||^2 - 2 Re sum_u conj(a_u) p_u + sum_{uv} a_u conj(a_v) G_uv
    std::vector<cplx> p(U, cplx{0.0, 0.0});
    std::vector<cplx> G(U * U, cplx{0.0, 0.0});
    for (std::size_t u = 0; u < U; ++u) {
        for (std::size_t i = 0; i < N; ++i)
            p[u] += zr[i] * std::conj(basis[u][i]);
        for (std::size_t v = 0; v <= u; ++v) {
            cplx g{0.0, 0.0};
            for (std::size_t i = 0; i < N; ++i)
                g += basis[u][i] * std::conj(basis[v][i]);
            G[u * U + v] = g;
            G[v * U + u] = std::conj(g);
        }
    }

    // lexicographic enumeration, digit 0 most significant
    std::vector<int> digits(U, 0);
    std::vector<cplx> a(U, cfg.alphabet[0]);
    double best_metric = 0.0;
    std::size_t best_index = 0;
    for (std::size_t ci = 0; ci < total; ++ci) {
        double metric = 0.0;
        for (std::size_t u = 0; u < U; ++u) {
            metric -= 2.0 * (a[u].real() * p[u].real() + a[u].imag() * p[u].imag());
            cplx acc{0.0, 0.0};
            for (std::size_t v = 0; v < U; ++v)
                acc += G[u * U + v] * std::conj(a[v]);
            metric += (a[u] * acc).real();
        }
        if (ci == 0 || metric < best_metric) {
            best_metric = metric;
            best_index = ci;
        }
        // odometer increment, last digit fastest
        for (std::size_t u = U; u-- > 0;) {
            if (++digits[u] < M) {
                a[u] = cfg.alphabet[static_cast<std::size_t>(digits[u])];
                break;
            }
            digits[u] = 0;
            a[u] = cfg.alphabet[0];
        }
    }

    std::vector<cplx> out(s_known.begin(), s_known.end());
    std::size_t rem = best_index;
    for (std::size_t u = U; u-- > 0;) {
        out[unknown[u]] = cfg.alphabet[rem % static_cast<std::size_t>(M)];
        rem /= static_cast<std::size_t>(M);
    }
    return out;
}

std::vector<cplx> ml_detect(std::span<const cplx> r, const IsiMatrix& A,
                            const TriangularFactor& A0, cplx h_hat,
                            const DetectorConfig& cfg) {
    if (A.order() != static_cast<int>(r.size()) || A0.order() != A.order())
        throw std::invalid_argument("ml_detect: dimension mismatch");
    const std::vector<cplx> h(r.size(), h_hat);
    const std::vector<cplx> known(r.size(), cplx{0.0, 0.0});
    const std::vector<std::uint8_t> mask(r.size(), 0);
    return ml_detect_masked(r, A0, h, known, mask, cfg);
}

std::vector<cplx> symbol_slicer(std::span<const cplx> r, cplx h_hat,
                                std::span<const cplx> alphabet) {
    if (h_hat == cplx{0.0, 0.0})
        throw std::invalid_argument("symbol_slicer: h_hat must be nonzero");
    std::vector<cplx> out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        out[i] = alphabet[static_cast<std::size_t>(slice_index(r[i] / h_hat, alphabet))];
    return out;
}

SicResult sic_detect(std::span<const cplx> r, std::span<const cplx> alphabet) {
    const std::size_t n_pairs = r.size() / 2;
    SicResult out;
    out.b.resize(n_pairs);
    out.a.resize(n_pairs + (r.size() % 2)); // odd stream may be one longer
    const std::size_t n_a = out.a.size();
    // b_n from even samples (0-based odd indices), a-ISI treated as noise
    for (std::size_t n = 0; n < n_pairs; ++n) {
        const cplx rb = r[2 * n + 1];
        out.b[n] = alphabet[static_cast<std::size_t>(slice_index(rb, alphabet))];
    }
    // cancel (b_{n-1} + b_n)/2 from the odd samples, then detect a_n
    for (std::size_t n = 0; n < n_a; ++n) {
        cplx ra = r[2 * n];
        if (n > 0)
            ra -= 0.5 * out.b[n - 1];
        if (n < n_pairs)
            ra -= 0.5 * out.b[n];
        out.a[n] = alphabet[static_cast<std::size_t>(slice_index(ra, alphabet))];
    }
    return out;
}

ChannelEstimate lmmse_estimate(std::span<const cplx> pilot_obs,
                               std::span<const cplx> pilot_vals,
                               std::span<const cplx> noise_cov, double prior_var) {
    const std::size_t n = pilot_obs.size();
    if (n == 0 || pilot_vals.size() != n)
        throw std::invalid_argument("lmmse_estimate: empty or mismatched pilots");
    if (prior_var <= 0.0)
        throw std::invalid_argument("lmmse_estimate: prior_var must be > 0");
    for (const cplx& p : pilot_vals)
        if (p == cplx{0.0, 0.0})
            throw std::invalid_argument("lmmse_estimate: pilots must be nonzero");
    const std::vector<cplx> ci_p = hermitian_solve(noise_cov, pilot_vals);
    cplx num{0.0, 0.0};
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += std::conj(ci_p[i]) * pilot_obs[i]; // p^H C^-1 r (C^-1 Hermitian)
        quad += (std::conj(pilot_vals[i]) * ci_p[i]).real();
    }
    const double denom = quad + 1.0 / prior_var;
    return {num / denom, 1.0 / denom};
}

ChannelEstimate lmmse_estimate_diag(std::span<const cplx> pilot_obs,
                                    std::span<const cplx> pilot_vals,
                                    double noise_var, double prior_var) {
    const std::size_t n = pilot_obs.size();
    if (n == 0 || pilot_vals.size() != n)
        throw std::invalid_argument("lmmse_estimate_diag: empty or mismatched pilots");
    if (noise_var <= 0.0 || prior_var <= 0.0)
        throw std::invalid_argument("lmmse_estimate_diag: variances must be > 0");
    cplx num{0.0, 0.0};
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (pilot_vals[i] == cplx{0.0, 0.0})
            throw std::invalid_argument("lmmse_estimate_diag: pilots must be nonzero");
        num += std::conj(pilot_vals[i]) * pilot_obs[i] / noise_var;
        quad += std::norm(pilot_vals[i]) / noise_var;
    }
    const double denom = quad + 1.0 / prior_var;
    return {num / denom, 1.0 / denom};
}

CombinedPilot pilot_combiner(std::span<const cplx> r, const Frame& frame,
                             CombinerVariant variant,
                             std::span<const cplx> data_estimates) {
    if (r.size() != frame.size())
        throw std::invalid_argument("pilot_combiner: sample/frame size mismatch");
    const auto pilots = frame.indices_of(Role::pilot);
    const auto data_idx = frame.indices_of(Role::data);
    if (pilots.empty())
        throw std::invalid_argument("pilot_combiner: frame has no pilots");
    if (variant == CombinerVariant::decision_directed && data_estimates.size() != data_idx.size())
        throw std::invalid_argument("pilot_combiner: decision_directed needs data estimates");

    // data symbol (or its estimate) at an absolute frame position
    auto data_at = [&](std::size_t pos) -> cplx {
        if (data_estimates.empty())
            return frame.positions[pos].value;
        for (std::size_t k = 0; k < data_idx.size(); ++k)
            if (data_idx[k] == pos)
                return data_estimates[k];
        return frame.positions[pos].value;
    };
    // data ISI entering the sample at pilot position pos
    auto data_isi = [&](std::size_t pos) {
        cplx v{0.0, 0.0};
        if (pos > 0 && frame.positions[pos - 1].role == Role::data)
            v += 0.5 * data_at(pos - 1);
        if (pos + 1 < frame.size() && frame.positions[pos + 1].role == Role::data)
            v += 0.5 * data_at(pos + 1);
        return v;
    };

    // the displayed combiner sums N of the N+1 pilots; only the full variant
    // keeps the closing pilot (whose sign makes the data terms telescope away)
    const std::size_t count = (variant != CombinerVariant::full && pilots.size() > 1)
                                  ? pilots.size() - 1
                                  : pilots.size();
    CombinedPilot out{cplx{0.0, 0.0}, static_cast<int>(count), 0.0};
    cplx residual{0.0, 0.0};
    for (std::size_t j = 0; j < count; ++j) {
        const std::size_t pos = pilots[j];
        const cplx pv = frame.positions[pos].value;
        // align with the pilot sign so the noiseless pilot part adds as +|p| h
        const double sign = (pv.real() < 0.0) ? -1.0 : 1.0;
        cplx sample = r[pos];
        if (variant == CombinerVariant::decision_directed)
            sample -= data_isi(pos);
        out.combined += sign * sample;
        residual += sign * data_isi(pos);
    }
    if (variant == CombinerVariant::decision_directed)
        residual = cplx{0.0, 0.0};
    out.residual_power = std::norm(residual);
    return out;
}

DespreadResult despread(std::span<const cplx> odd, std::span<const cplx> even,
                        const SpreadingPair& pair) {
    const std::size_t N = pair.c1.size();
    if (odd.size() != N || even.size() != N)
        throw std::invalid_argument("despread: sequence lengths must equal N");
    DespreadResult out{{0, 0}, {0, 0}, {0, 0}, {0, 0}};
    for (std::size_t n = 0; n < N; ++n) {
        out.d1 += odd[n] * std::conj(pair.c1[n]);
        out.d2 += even[n] * std::conj(pair.c2[n]);
        // interleave (a_1, b_1, ...): odd sample n sees (b_{n-1} + b_n)/2,
        // even sample n sees (a_n + a_{n+1})/2
        cplx b_isi = 0.5 * pair.c2[n];
        if (n > 0)
            b_isi += 0.5 * pair.c2[n - 1];
        out.d1_interference_coef += b_isi * std::conj(pair.c1[n]);
        cplx a_isi = 0.5 * pair.c1[n];
        if (n + 1 < N)
            a_isi += 0.5 * pair.c1[n + 1];
        out.d2_interference_coef += a_isi * std::conj(pair.c2[n]);
    }
    const double scale = 1.0 / static_cast<double>(N);
    out.d1 *= scale;
    out.d2 *= scale;
    out.d1_interference_coef *= scale;
    out.d2_interference_coef *= scale;
    return out;
}

cplx repetition_combine(std::span<const cplx> r, RepetitionScheme scheme) {
    cplx sum{0.0, 0.0};
    if (scheme == RepetitionScheme::nyquist) {
        for (std::size_t i = 0; i < r.size(); i += 2)
            sum += r[i];
    } else {
        for (const cplx& v : r)
            sum += v;
    }
    return sum;
}

std::vector<cplx> diff_decode_sequence(std::span<const cplx> r,
                                       std::span<const cplx> alphabet) {
    const std::size_t N = r.size();
    std::vector<cplx> c(N);
    if (N == 0)
        return c;
    if (N == 1) {
        // r_0 = c_0 alone (one-sided, no successor)
        c[0] = alphabet[static_cast<std::size_t>(slice_index(r[0], alphabet))];
        return c;
    }
    // joint (c_0, c_1) against r_0 = c_0 (1 + c_1/2)
    double best = 0.0;
    for (std::size_t ai = 0; ai < alphabet.size(); ++ai) {
        for (std::size_t bi = 0; bi < alphabet.size(); ++bi) {
            const double metric = std::norm(r[0] - alphabet[ai] * (1.0 + 0.5 * alphabet[bi]));
            if ((ai == 0 && bi == 0) || metric < best) {
                best = metric;
                c[0] = alphabet[ai];
                c[1] = alphabet[bi];
            }
        }
    }
    cplx past = c[0] * c[1];
    for (std::size_t n = 2; n < N; ++n) {
        const cplx raw = diff_decode_step_raw(r[n - 1], past, c[n - 1]);
        c[n] = alphabet[static_cast<std::size_t>(slice_index(raw, alphabet))];
        past *= c[n];
    }
    return c;
}

std::vector<cplx> diff_decode_sequence_wmf(std::span<const cplx> r,
                                           const TriangularFactor& A0,
                                           std::span<const cplx> alphabet) {
    const std::size_t N = r.size();
    if (A0.order() != static_cast<int>(N))
        throw std::invalid_argument("diff_decode_sequence_wmf: factor order mismatch");
    std::vector<cplx> c(N);
    if (N == 0)
        return c;
    const std::vector<cplx> z = A0.solve_transposed(r);
    // z_n = l_n s_n + m_n s_{n+1} + iid noise; recover the running products
    // backward starting from the interference-free last sample
    std::vector<cplx> s_hat(N);
    s_hat[N - 1] = alphabet[static_cast<std::size_t>(
        slice_index(z[N - 1] / A0.diag(static_cast<int>(N - 1)), alphabet))];
    for (std::size_t n = N - 1; n-- > 0;) {
        const cplx stat =
            (z[n] - A0.sub(static_cast<int>(n)) * s_hat[n + 1]) / A0.diag(static_cast<int>(n));
        s_hat[n] = alphabet[static_cast<std::size_t>(slice_index(stat, alphabet))];
    }
    cplx prev{1.0, 0.0};
    for (std::size_t n = 0; n < N; ++n) {
        c[n] = alphabet[static_cast<std::size_t>(slice_index(s_hat[n] * std::conj(prev), alphabet))];
        prev = s_hat[n];
    }
    return c;
}

std::vector<cplx> nyquist_diff_product(std::span<const cplx> r,
                                       std::span<const cplx> alphabet) {
    std::vector<cplx> c(r.size());
    cplx prev{1.0, 0.0};
    for (std::size_t n = 0; n < r.size(); ++n) {
        c[n] = alphabet[static_cast<std::size_t>(slice_index(r[n] * std::conj(prev), alphabet))];
        prev = r[n];
    }
    return c;
}

std::vector<cplx> nyquist_diff_coherent(std::span<const cplx> r,
                                        std::span<const cplx> alphabet) {
    std::vector<cplx> c(r.size());
    cplx prev{1.0, 0.0};
    for (std::size_t n = 0; n < r.size(); ++n) {
        const cplx s = alphabet[static_cast<std::size_t>(slice_index(r[n], alphabet))];
        c[n] = alphabet[static_cast<std::size_t>(slice_index(s * std::conj(prev), alphabet))];
        prev = s;
    }
    return c;
}

} // namespace psbm
