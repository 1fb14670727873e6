#pragma once

namespace hss {

// Analytic operation counter (multiply-add = 2 flops). Kernels add their
// counts once per call on the calling thread.
long long flop_count();
void reset_flops();
void add_flops(long long f);

}  // namespace hss
