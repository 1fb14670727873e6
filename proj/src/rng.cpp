#include "hss/rng.hpp"

#include <cmath>
#include <random>

namespace hss {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double uniform_open(std::mt19937_64& eng) {
    // (0, 1]: the +1 keeps log() finite below.
    return double((eng() >> 11) + 1) * 0x1p-53;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

Matrix generate_random(int n, int d, std::uint64_t seed, int col_offset) {
    Matrix r(n, d);
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (int j = 0; j < d; ++j) {
        std::mt19937_64 eng(mix_seed(seed, std::uint64_t(col_offset + j) + 1));
        // Box-Muller, explicit so the stream does not depend on the standard
        // library's normal_distribution internals.
        for (int i = 0; i < n; i += 2) {
            double u1 = uniform_open(eng);
            double u2 = uniform_open(eng);
            double m = std::sqrt(-2.0 * std::log(u1));
            r(i, j) = m * std::cos(two_pi * u2);
            if (i + 1 < n) r(i + 1, j) = m * std::sin(two_pi * u2);
        }
    }
    return r;
}

}  // namespace hss
