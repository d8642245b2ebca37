#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace psbm {

using cplx = std::complex<double>;

// splitmix64 mixing step; used to derive independent per-block seeds from a
// master seed so that results do not depend on worker count or execution order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based stream derivation: (master, stream, counter) -> seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t counter) {
    return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ counter);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double gauss() { return norm_(eng_); }

    // circularly symmetric complex Gaussian, E|z|^2 = var
    // (two independent real components, each with variance var/2)
    cplx cgauss(double var = 1.0) {
        const double s = std::sqrt(var / 2.0);
        return {s * norm_(eng_), s * norm_(eng_)};
    }

    std::uint64_t uniform_u64() { return eng_(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_below(std::uint64_t n) {
        std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
        return d(eng_);
    }

    std::mt19937_64& engine() { return eng_; }

  private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> norm_{0.0, 1.0};
};

} // namespace psbm
