#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hss/cluster_tree.hpp"
#include "hss/hss_form.hpp"
#include "hss/matrix_source.hpp"

namespace hss {

struct SamplingConfig {
    int d0 = 128;          // initial sample count
    int delta_d = 64;      // increment per restart
    int oversampling = 10; // p
    int gap = -1;          // required d - rank slack; < 0 means "use oversampling"
    int max_d = 4096;
    std::uint64_t seed = 1;

    int effective_gap() const { return gap < 0 ? oversampling : gap; }
    void validate() const;
};

struct CompressionReport {
    std::vector<int> restarts;   // d value in effect after each restart
    std::vector<int> node_ranks; // by node id: max(row rank, col rank)
    int max_rank = 0;
    long long flops = 0;
    double seconds = 0.0;
    std::uint64_t bytes = 0;
    int d_final = 0;
};

struct CompressionResult {
    HssForm form;
    CompressionReport report;
};

class RankBudgetError : public std::runtime_error {
public:
    RankBudgetError(const std::string& what, CompressionReport partial)
        : std::runtime_error(what), report_(std::move(partial)) {}
    const CompressionReport& partial_report() const { return report_; }

private:
    CompressionReport report_;
};

// Randomized compression over the cluster tree with adaptive sample growth:
// a node whose revealed rank leaves less than `gap` slack (and is not exactly
// full rank for its block) marks itself partially compressed, the random
// matrices grow by delta_d fresh columns, and the postorder sweep restarts.
// Already-compressed nodes only merge the new columns into their reduced
// samples. Deterministic for fixed (source, tree, eps, cfg).
CompressionResult compress(const MatrixSource& source, const ClusterTree& tree, double eps,
                           const SamplingConfig& cfg);

}  // namespace hss
