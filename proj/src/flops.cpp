#include "hss/flops.hpp"

namespace hss {

namespace {
long long g_flops = 0;
}

long long flop_count() { return g_flops; }
void reset_flops() { g_flops = 0; }
void add_flops(long long f) { g_flops += f; }

}  // namespace hss
