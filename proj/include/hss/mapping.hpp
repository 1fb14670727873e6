#pragma once

#include <string>
#include <vector>

#include "hss/cluster_tree.hpp"

namespace hss {

struct GridShape {
    int pr = 1;
    int pc = 1;
    int idle = 0;
};

// As-square-as-possible 2D shape: pr = floor(sqrt(P)), pc = floor(P/pr),
// idle = P - pr*pc (always at most pr - 1).
GridShape grid_shape(int P);

struct NodeAssignment {
    int first = 0;  // process range [first, last)
    int last = 0;
    int pr = 1;
    int pc = 1;
    int idle = 0;
};

struct MappingPlan {
    int p = 1;
    std::vector<NodeAssignment> nodes;  // by node id
};

// Top-down proportional split of the process range. weights[id] is the
// weight of the whole subtree rooted at id; the left child receives
// round(P * W1/(W1+W2)) processes (half away from zero), clamped so both
// sides keep at least one when P >= 2. A subtree handed a single process
// maps every node in it to that process.
MappingPlan proportional_map(const ClusterTree& tree, int p, const std::vector<double>& weights);

// Subtree-weight builders for proportional_map.
std::vector<double> uniform_weights(const ClusterTree& tree);
// Self-similar fraction: every right child's subtree weighs f, every left
// child's 1 - f.
std::vector<double> fraction_weights(const ClusterTree& tree, double f);
// Factorization-work proxy: sum over the subtree of rank^2 * interval length.
std::vector<double> rank_weights(const ClusterTree& tree, const std::vector<int>& node_ranks);

MappingPlan remap_with_ranks(const ClusterTree& tree, const MappingPlan& plan,
                             const std::vector<int>& node_ranks);

struct CommCost {
    double messages = 0.0;
    double words = 0.0;
};

enum class CommKind { DenseLu, HssNonrandomized, HssRandomized };

struct CommTerm {
    std::string label;
    CommCost cost;
};

struct CommModelResult {
    CommCost total;
    std::vector<CommTerm> terms;
};

// Leading-order cost expressions with unit constants, log base 2; outputs
// are comparative analytics, not measurements.
CommModelResult comm_model(CommKind kind, double n, double p, double r);

// Exact per-level sums for scattering a matrix down the tree halving both
// the interval and the process count each level; p must be a power of two.
CommCost distribution_cost_exact(double n, int p);

std::string plan_to_json(const MappingPlan& plan, const ClusterTree& tree);
std::string comm_to_json(const CommModelResult& r);

}  // namespace hss
