#include "psbm/sequences.hpp"

#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace psbm {

namespace {

const char* role_name(Role r) {
    switch (r) {
        case Role::pilot: return "pilot";
        case Role::data: return "data";
        case Role::zero: return "zero";
    }
    return "?";
}

Role role_from(const std::string& s) {
    if (s == "pilot") return Role::pilot;
    if (s == "data") return Role::data;
    if (s == "zero") return Role::zero;
    throw std::invalid_argument("Frame::parse: unknown role '" + s + "'");
}

void format_double(std::ostringstream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

} // namespace

std::vector<cplx> Frame::symbols() const {
    std::vector<cplx> s;
    s.reserve(positions.size());
    for (const auto& p : positions)
        s.push_back(p.value);
    return s;
}

std::vector<std::size_t> Frame::indices_of(Role r) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < positions.size(); ++i)
        if (positions[i].role == r)
            idx.push_back(i);
    return idx;
}

std::string Frame::serialize() const {
    std::ostringstream os;
    for (const auto& p : positions) {
        os << role_name(p.role) << ',';
        format_double(os, p.value.real());
        os << ',';
        format_double(os, p.value.imag());
        os << '\n';
    }
    return os.str();
}

Frame Frame::parse(std::istream& in) {
    Frame f;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string role, re, im;
        if (!std::getline(ls, role, ',') || !std::getline(ls, re, ',') || !std::getline(ls, im))
            throw std::invalid_argument("Frame::parse: malformed line '" + line + "'");
        f.positions.push_back({role_from(role), cplx{std::stod(re), std::stod(im)}});
    }
    f.validate();
    return f;
}

void Frame::validate() const {
    for (const auto& p : positions)
        if (p.role == Role::zero && (p.value.real() != 0.0 || p.value.imag() != 0.0))
            throw std::invalid_argument("Frame: zero-role position carries a nonzero value");
}

Frame build_frame(int Ld, int Lp, std::span<const cplx> data, cplx pilot) {
    if (Ld <= 0 || Lp <= 0)
        throw std::invalid_argument("build_frame: Ld and Lp must be positive");
    if (data.empty() || data.size() % static_cast<std::size_t>(Ld) != 0)
        throw std::invalid_argument("build_frame: data length must be a positive multiple of Ld");
    Frame f;
    f.Ld = Ld;
    f.Lp = Lp;
    const std::size_t groups = data.size() / static_cast<std::size_t>(Ld);
    auto push_pilots = [&] {
        for (int i = 0; i < Lp; ++i)
            f.positions.push_back({Role::pilot, pilot});
    };
    push_pilots();
    for (std::size_t g = 0; g < groups; ++g) {
        f.positions.push_back({Role::zero, cplx{0.0, 0.0}});
        for (int i = 0; i < Ld; ++i)
            f.positions.push_back({Role::data, data[g * static_cast<std::size_t>(Ld) +
                                                     static_cast<std::size_t>(i)]});
        f.positions.push_back({Role::zero, cplx{0.0, 0.0}});
        push_pilots();
    }
    return f;
}

Frame alternating_pilot_sequence(std::span<const cplx> data, cplx pilot) {
    if (data.empty())
        throw std::invalid_argument("alternating_pilot_sequence: data must be nonempty");
    Frame f;
    f.Ld = static_cast<int>(data.size());
    f.Lp = 1;
    const std::size_t N = data.size();
    for (std::size_t j = 0; j <= N; ++j) {
        // pilot j carries sign (-1)^(j+1): -p, +p, -p, ...
        const double sign = (j % 2 == 0) ? -1.0 : 1.0;
        f.positions.push_back({Role::pilot, sign * pilot});
        if (j < N)
            f.positions.push_back({Role::data, data[j]});
    }
    return f;
}

std::vector<cplx> verify_isi_free_subsequence(std::span<const cplx> seq) {
    std::vector<cplx> residual(seq.size(), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < seq.size(); ++i) {
        cplx r{0.0, 0.0};
        if (i > 0)
            r += 0.5 * seq[i - 1];
        if (i + 1 < seq.size())
            r += 0.5 * seq[i + 1];
        residual[i] = r;
    }
    return residual;
}

cplx double_pilot_combine(cplx r_n, cplx r_n1) { return r_n + r_n1; }

RepetitionPair repetition_sequences(int N, cplx d) {
    if (N < 2)
        throw std::invalid_argument("repetition_sequences: N must be >= 2");
    RepetitionPair p;
    const int n1 = 2 * N - 1;
    p.nyquist.assign(static_cast<std::size_t>(n1), cplx{0.0, 0.0});
    for (int i = 0; i < n1; i += 2)
        p.nyquist[static_cast<std::size_t>(i)] = d;
    const cplx scaled = d / std::sqrt(2.0);
    p.psbm.assign(static_cast<std::size_t>(n1), scaled);
    return p;
}

SpreadingPair SpreadingPair::from_sequences(std::vector<cplx> c1, std::vector<cplx> c2) {
    if (c1.size() != c2.size() || c1.empty())
        throw std::invalid_argument("SpreadingPair: sequences must be nonempty and equal length");
    SpreadingPair p;
    p.c1 = std::move(c1);
    p.c2 = std::move(c2);
    p.aligned_cross = {0.0, 0.0};
    p.shifted_cross = {0.0, 0.0};
    const std::size_t N = p.c1.size();
    for (std::size_t n = 0; n < N; ++n) {
        p.aligned_cross += p.c1[n] * std::conj(p.c2[n]);
        if (n + 1 < N)
            p.shifted_cross += p.c2[n + 1] * std::conj(p.c1[n]);
    }
    return p;
}

SpreadingPair make_spreading_pair(SpreadKind kind, int N, Rng& rng, double max_aligned_cross) {
    if (N < 2)
        throw std::invalid_argument("make_spreading_pair: N must be >= 2");
    if (kind == SpreadKind::walsh) {
        if ((N & (N - 1)) != 0)
            throw std::invalid_argument("make_spreading_pair: walsh requires N a power of two");
        // Sylvester Hadamard entry H[i][j] = (-1)^popcount(i & j); rows 0 and N/2
        std::vector<cplx> c1, c2;
        const unsigned r2 = static_cast<unsigned>(N) / 2u;
        for (unsigned j = 0; j < static_cast<unsigned>(N); ++j) {
            c1.emplace_back(1.0, 0.0);
            c2.emplace_back(__builtin_popcount(r2 & j) % 2 ? -1.0 : 1.0, 0.0);
        }
        return SpreadingPair::from_sequences(std::move(c1), std::move(c2));
    }
    for (long attempt = 0; attempt < 1000000; ++attempt) {
        std::vector<cplx> c1, c2;
        for (int i = 0; i < N; ++i) {
            c1.emplace_back(rng.uniform_u64() & 1 ? 1.0 : -1.0, 0.0);
            c2.emplace_back(rng.uniform_u64() & 1 ? 1.0 : -1.0, 0.0);
        }
        SpreadingPair p = SpreadingPair::from_sequences(std::move(c1), std::move(c2));
        if (max_aligned_cross < 0.0 || std::abs(p.aligned_cross) <= max_aligned_cross)
            return p;
    }
    throw std::runtime_error("make_spreading_pair: rejection sampling did not terminate");
}

double orthogonality_probability(int N) {
    if (N < 2)
        throw std::invalid_argument("orthogonality_probability: N must be >= 2");
    if (N % 2)
        return 0.0; // parity of a +-1 sum
    const double lc = std::lgamma(N + 1.0) - 2.0 * std::lgamma(N / 2 + 1.0);
    return std::exp(lc - N * std::log(2.0));
}

double near_orthogonality_probability(int N, double kappa) {
    if (N < 1)
        throw std::invalid_argument("near_orthogonality_probability: N must be >= 1");
    if (kappa < 0.0)
        throw std::invalid_argument("near_orthogonality_probability: kappa must be >= 0");
    // theta = round-half-away-from-zero(kappa N / 2)
    const double theta = std::floor(kappa * N / 2.0 + 0.5);
    double p = 0.0;
    for (int k = 0; k <= N; ++k) {
        const int s = 2 * k - N;
        if (std::abs(static_cast<double>(s)) <= theta) {
            const double lpk = std::lgamma(N + 1.0) - std::lgamma(k + 1.0) -
                               std::lgamma(N - k + 1.0) - N * std::log(2.0);
            p += std::exp(lpk);
        }
    }
    return std::min(p, 1.0);
}

SpreadStreams spread_streams(cplx d1, cplx d2, const SpreadingPair& pair) {
    SpreadStreams s;
    const std::size_t N = pair.c1.size();
    s.a.reserve(N);
    s.b.reserve(N);
    s.interleaved.reserve(2 * N);
    for (std::size_t n = 0; n < N; ++n) {
        s.a.push_back(d1 * pair.c1[n]);
        s.b.push_back(d2 * pair.c2[n]);
        s.interleaved.push_back(s.a.back());
        s.interleaved.push_back(s.b.back());
    }
    return s;
}

std::vector<cplx> diff_encode(std::span<const cplx> c) {
    std::vector<cplx> s;
    s.reserve(c.size());
    cplx prev{1.0, 0.0};
    for (const cplx& ck : c) {
        if (std::abs(std::abs(ck) - 1.0) > 1e-9)
            throw std::invalid_argument("diff_encode: data symbols must be unit-modulus");
        prev *= ck;
        s.push_back(prev);
    }
    return s;
}

cplx diff_decode_step_raw(cplx r_n, cplx past, cplx c_prev) {
    return 2.0 * r_n * std::conj(past) - std::conj(c_prev) - 2.0;
}

} // namespace psbm
