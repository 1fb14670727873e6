#pragma once

#include <cstdint>

#include "hss/matrix.hpp"

namespace hss {

// n x d standard-normal matrix whose column j is a pure function of
// (seed, col_offset + j). Drawing d columns and then d' more with
// col_offset = d reproduces exactly the trailing columns of a single
// (d + d') draw, which is what incremental sampling relies on.
Matrix generate_random(int n, int d, std::uint64_t seed, int col_offset = 0);

// splitmix64-style mixer for deriving independent substream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace hss
