#pragma once

#include <cmath>
#include <cstdint>

namespace revolt {

// Deterministic splitmix64 generator. Used everywhere instead of <random>
// so that traces and reports are byte-identical across platforms and
// standard library implementations.
class Rng {
  public:
    explicit Rng(uint64_t seed = 0) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    int uniform_int(int n) { return n <= 1 ? 0 : int(next_u64() % uint64_t(n)); }

    // standard normal via Box-Muller
    double gauss() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // derive an independent stream from this seed and a stream tag
    static uint64_t mix(uint64_t a, uint64_t b) {
        Rng r(a ^ (b * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL));
        return r.next_u64();
    }

  private:
    uint64_t state_;
};

} // namespace revolt
