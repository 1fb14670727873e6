#include "hss/cluster_tree.hpp"

#include "hss/errors.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace hss {

int ClusterTree::num_leaves() const {
    int c = 0;
    for (const auto& nd : nodes)
        if (nd.is_leaf()) ++c;
    return c;
}

ClusterTree build_balanced_tree(int n, int leaf_size) {
    if (n < 1 || leaf_size < 1) throw std::invalid_argument("build_balanced_tree: n and leaf_size must be positive");
    ClusterTree t;
    t.n = n;
    t.root_id = 0;
    t.nodes.push_back({0, 0, n, {-1, -1}, -1});
    std::deque<int> queue{0};
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        int lo = t.nodes[id].lo, hi = t.nodes[id].hi;
        if (hi - lo <= leaf_size) continue;
        int mid = (lo + hi) / 2;
        int c0 = int(t.nodes.size());
        t.nodes.push_back({c0, lo, mid, {-1, -1}, id});
        t.nodes.push_back({c0 + 1, mid, hi, {-1, -1}, id});
        t.nodes[id].child[0] = c0;
        t.nodes[id].child[1] = c0 + 1;
        queue.push_back(c0);
        queue.push_back(c0 + 1);
    }
    return t;
}

ClusterTree build_comb_tree(int n, const std::vector<int>& leaf_sizes, bool mirror) {
    if (leaf_sizes.empty()) throw std::invalid_argument("build_comb_tree: leaf_sizes empty");
    for (int s : leaf_sizes)
        if (s <= 0) throw std::invalid_argument("build_comb_tree: leaf sizes must be positive");
    if (std::accumulate(leaf_sizes.begin(), leaf_sizes.end(), 0LL) != n)
        throw std::invalid_argument("build_comb_tree: leaf sizes must sum to n");

    ClusterTree t;
    t.n = n;
    t.root_id = 0;
    t.nodes.push_back({0, 0, n, {-1, -1}, -1});
    int k = int(leaf_sizes.size());
    if (k == 1) return t;

    if (!mirror) {
        // Recursing sibling on the left; leaf widths s0..s_{k-1} left to right.
        std::vector<long long> prefix(k + 1, 0);
        for (int i = 0; i < k; ++i) prefix[i + 1] = prefix[i] + leaf_sizes[i];
        int cur = 0;
        for (int level = k - 1; level >= 1; --level) {
            int c0 = int(t.nodes.size());
            t.nodes.push_back({c0, t.nodes[cur].lo, int(prefix[level]), {-1, -1}, cur});
            t.nodes.push_back({c0 + 1, int(prefix[level]), t.nodes[cur].hi, {-1, -1}, cur});
            t.nodes[cur].child[0] = c0;
            t.nodes[cur].child[1] = c0 + 1;
            cur = c0;
        }
    } else {
        // Mirror image: recursing sibling on the right, leaf widths reversed.
        std::vector<int> rs(leaf_sizes.rbegin(), leaf_sizes.rend());
        int cur = 0;
        int consumed = 0;
        for (int level = 0; level + 1 < k; ++level) {
            int split = consumed + rs[level];
            int c0 = int(t.nodes.size());
            t.nodes.push_back({c0, t.nodes[cur].lo, split, {-1, -1}, cur});
            t.nodes.push_back({c0 + 1, split, t.nodes[cur].hi, {-1, -1}, cur});
            t.nodes[cur].child[0] = c0;
            t.nodes[cur].child[1] = c0 + 1;
            consumed = split;
            cur = c0 + 1;
        }
    }
    return t;
}

std::vector<int> postorder(const ClusterTree& tree) {
    std::vector<int> order;
    order.reserve(tree.nodes.size());
    std::function<void(int)> visit = [&](int id) {
        const TreeNode& nd = tree.node(id);
        if (!nd.is_leaf()) {
            visit(nd.child[0]);
            visit(nd.child[1]);
        }
        order.push_back(id);
    };
    visit(tree.root_id);
    return order;
}

std::optional<std::string> validate_tree(const ClusterTree& tree) {
    if (tree.nodes.empty()) return "empty tree";
    if (tree.root_id < 0 || tree.root_id >= tree.num_nodes()) return "root id out of range";
    const TreeNode& root = tree.node(tree.root_id);
    if (root.lo != 0 || root.hi != tree.n) return "root interval is not [0, n)";

    std::vector<char> seen(tree.nodes.size(), 0);
    std::vector<int> stack{tree.root_id};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (id < 0 || id >= tree.num_nodes()) return "child id out of range";
        if (seen[id]) return "node visited twice (cycle or shared child)";
        seen[id] = 1;
        const TreeNode& nd = tree.node(id);
        if (nd.id != id) return "node id does not match its index";
        if ((nd.child[0] < 0) != (nd.child[1] < 0)) return "non-binary node (exactly one child)";
        if (nd.is_leaf()) {
            if (nd.lo >= nd.hi) return "empty leaf interval";
            continue;
        }
        const TreeNode& c0 = tree.node(nd.child[0]);
        const TreeNode& c1 = tree.node(nd.child[1]);
        if (c0.parent != id || c1.parent != id) return "child parent link broken";
        if (c0.lo != nd.lo || c1.hi != nd.hi || c0.hi != c1.lo)
            return c0.hi > c1.lo ? "children overlap" : "children do not cover parent interval";
        if (c0.lo >= c0.hi || c1.lo >= c1.hi) return "empty child interval";
        stack.push_back(nd.child[0]);
        stack.push_back(nd.child[1]);
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) return "unreachable node";
    return std::nullopt;
}

std::string tree_to_json(const ClusterTree& tree) {
    nlohmann::json j;
    j["n"] = tree.n;
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& nd : tree.nodes) {
        nlohmann::json nj;
        nj["lo"] = nd.lo;
        nj["hi"] = nd.hi;
        if (nd.is_leaf())
            nj["children"] = nullptr;
        else
            nj["children"] = {nd.child[0], nd.child[1]};
        nodes.push_back(nj);
    }
    j["nodes"] = nodes;
    return j.dump();
}

ClusterTree tree_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ClusterTree t;
    t.n = j.at("n").get<int>();
    const auto& nodes = j.at("nodes");
    t.nodes.resize(nodes.size());
    for (int i = 0; i < int(nodes.size()); ++i) {
        TreeNode& nd = t.nodes[i];
        nd.id = i;
        nd.lo = nodes[i].at("lo").get<int>();
        nd.hi = nodes[i].at("hi").get<int>();
        if (!nodes[i].at("children").is_null()) {
            nd.child[0] = nodes[i]["children"][0].get<int>();
            nd.child[1] = nodes[i]["children"][1].get<int>();
        }
    }
    std::vector<char> is_child(t.nodes.size(), 0);
    for (auto& nd : t.nodes)
        if (!nd.is_leaf()) {
            for (int c : nd.child) {
                if (c < 0 || c >= t.num_nodes()) throw FormatError("tree_from_json: child id out of range");
                t.nodes[c].parent = nd.id;
                is_child[c] = 1;
            }
        }
    t.root_id = 0;
    for (int i = 0; i < t.num_nodes(); ++i)
        if (!is_child[i]) {
            t.root_id = i;
            break;
        }
    return t;
}

}  // namespace hss
