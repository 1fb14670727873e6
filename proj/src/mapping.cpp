#include "hss/mapping.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace hss {

GridShape grid_shape(int P) {
    if (P < 1) throw std::invalid_argument("grid_shape: P must be >= 1");
    int pr = int(std::sqrt(double(P)));
    while ((pr + 1) * (pr + 1) <= P) ++pr;
    while (pr * pr > P) --pr;
    GridShape g;
    g.pr = pr;
    g.pc = P / pr;
    g.idle = P - g.pr * g.pc;
    return g;
}

namespace {

void assign_subtree(const ClusterTree& tree, MappingPlan& plan, int id, int first, int count,
                    const std::vector<double>& weights) {
    NodeAssignment& a = plan.nodes[id];
    a.first = first;
    a.last = first + count;
    GridShape g = grid_shape(count);
    a.pr = g.pr;
    a.pc = g.pc;
    a.idle = g.idle;

    const TreeNode& nd = tree.node(id);
    if (nd.is_leaf()) return;
    const int c1 = nd.child[0], c2 = nd.child[1];
    if (count == 1) {
        assign_subtree(tree, plan, c1, first, 1, weights);
        assign_subtree(tree, plan, c2, first, 1, weights);
        return;
    }
    const double w1 = weights[c1], w2 = weights[c2];
    if (w1 < 0.0 || w2 < 0.0 || w1 + w2 <= 0.0)
        throw std::invalid_argument("proportional_map: weights must be nonnegative with a positive sum");
    int left = int(std::llround(double(count) * w1 / (w1 + w2)));
    if (left < 1) left = 1;
    if (left > count - 1) left = count - 1;
    assign_subtree(tree, plan, c1, first, left, weights);
    assign_subtree(tree, plan, c2, first + left, count - left, weights);
}

}  // namespace

MappingPlan proportional_map(const ClusterTree& tree, int p, const std::vector<double>& weights) {
    if (p < 1) throw std::invalid_argument("proportional_map: p must be >= 1");
    if (int(weights.size()) != tree.num_nodes())
        throw std::invalid_argument("proportional_map: one weight per node required");
    MappingPlan plan;
    plan.p = p;
    plan.nodes.assign(tree.num_nodes(), NodeAssignment());
    assign_subtree(tree, plan, tree.root_id, 0, p, weights);
    return plan;
}

std::vector<double> uniform_weights(const ClusterTree& tree) {
    std::vector<double> w(tree.num_nodes());
    for (int id = 0; id < tree.num_nodes(); ++id) w[id] = double(tree.node(id).length());
    return w;
}

std::vector<double> fraction_weights(const ClusterTree& tree, double f) {
    if (!(f > 0.0 && f < 1.0))
        throw std::invalid_argument("fraction_weights: f must lie strictly between 0 and 1");
    std::vector<double> w(tree.num_nodes(), 1.0);
    for (int id = 0; id < tree.num_nodes(); ++id) {
        const TreeNode& nd = tree.node(id);
        if (nd.parent < 0) continue;
        w[id] = (tree.node(nd.parent).child[1] == id) ? f : 1.0 - f;
    }
    return w;
}

std::vector<double> rank_weights(const ClusterTree& tree, const std::vector<int>& node_ranks) {
    if (int(node_ranks.size()) != tree.num_nodes())
        throw std::invalid_argument("rank_weights: one rank per node required");
    std::vector<double> w(tree.num_nodes(), 0.0);
    for (int id : postorder(tree)) {
        const TreeNode& nd = tree.node(id);
        double s = double(node_ranks[id]) * double(node_ranks[id]) * double(nd.length());
        if (!nd.is_leaf()) s += w[nd.child[0]] + w[nd.child[1]];
        w[id] = s;
    }
    return w;
}

MappingPlan remap_with_ranks(const ClusterTree& tree, const MappingPlan& plan,
                             const std::vector<int>& node_ranks) {
    return proportional_map(tree, plan.p, rank_weights(tree, node_ranks));
}

CommModelResult comm_model(CommKind kind, double n, double p, double r) {
    if (n < 1.0 || p < 1.0 || r < 0.0) throw std::invalid_argument("comm_model: bad arguments");
    const double lg = std::log2(p);
    CommModelResult res;
    auto term = [&](const std::string& label, double msgs, double words) {
        res.terms.push_back({label, {msgs, words}});
        res.total.messages += msgs;
        res.total.words += words;
    };
    switch (kind) {
        case CommKind::DenseLu:
            term("lu", n * lg, n * n * lg / std::sqrt(p));
            break;
        case CommKind::HssNonrandomized:
            term("distribution", p, n * n / p);
            term("product", 0.0, r * n);
            term("tree", r * lg * lg, r * r * lg);
            break;
        case CommKind::HssRandomized:
            term("distribution", p * lg, n * n / p);
            term("product", r * lg, r * n / std::sqrt(p));
            term("tree", r * lg * lg, r * r);
            break;
    }
    return res;
}

CommCost distribution_cost_exact(double n, int p) {
    if (p < 1 || (p & (p - 1)) != 0)
        throw std::invalid_argument("distribution_cost_exact: p must be a power of two");
    CommCost c;
    int levels = 0;
    for (int t = p; t > 1; t >>= 1) ++levels;
    for (int i = 1; i <= levels; ++i) {
        const double pow2 = double(1 << i);
        const double ni = n / pow2;
        c.messages += p + (pow2 - 1.0) * double(p) / pow2;
        c.words += ni * ni / (double(p) / pow2) + (pow2 - 1.0) * ni * ni / double(p);
    }
    return c;
}

std::string plan_to_json(const MappingPlan& plan, const ClusterTree& tree) {
    nlohmann::ordered_json j;
    j["p"] = plan.p;
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (int id = 0; id < int(plan.nodes.size()); ++id) {
        const NodeAssignment& a = plan.nodes[id];
        const TreeNode& nd = tree.node(id);
        nlohmann::ordered_json e;
        e["id"] = id;
        e["lo"] = nd.lo;
        e["hi"] = nd.hi;
        e["first"] = a.first;
        e["last"] = a.last;
        e["grid"] = {a.pr, a.pc};
        e["idle"] = a.idle;
        nodes.push_back(e);
    }
    j["nodes"] = nodes;
    return j.dump();
}

std::string comm_to_json(const CommModelResult& r) {
    nlohmann::ordered_json j;
    j["messages"] = r.total.messages;
    j["words"] = r.total.words;
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (const CommTerm& t : r.terms) {
        nlohmann::ordered_json e;
        e["label"] = t.label;
        e["messages"] = t.cost.messages;
        e["words"] = t.cost.words;
        terms.push_back(e);
    }
    j["terms"] = terms;
    return j.dump();
}

}  // namespace hss
