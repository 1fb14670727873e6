#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hss {

struct TreeNode {
    int id = -1;
    int lo = 0;
    int hi = 0;  // interval [lo, hi)
    int child[2] = {-1, -1};
    int parent = -1;

    bool is_leaf() const { return child[0] < 0; }
    int length() const { return hi - lo; }
};

// Binary tree of contiguous index intervals partitioning [0, n).
// Node ids are assigned in breadth-first construction order, so for a
// complete tree the children of node i are 2i+1 and 2i+2.
struct ClusterTree {
    std::vector<TreeNode> nodes;
    int root_id = 0;
    int n = 0;

    const TreeNode& node(int id) const { return nodes[id]; }
    int num_nodes() const { return int(nodes.size()); }
    bool is_root(int id) const { return id == root_id; }
    int num_leaves() const;
};

// Splits every interval longer than leaf_size at the midpoint (lo+hi)/2.
ClusterTree build_balanced_tree(int n, int leaf_size);

// Comb-shaped tree: leaf_sizes are consumed left to right, the first two as
// the deepest sibling pair, each later one as a new right leaf paired with
// the subtree built so far. Only the left sibling of each pair recurses;
// mirror=true builds the left-right mirror image (right sibling recurses,
// leaf widths reversed).
ClusterTree build_comb_tree(int n, const std::vector<int>& leaf_sizes, bool mirror = false);

// Children before parents, left subtree before right.
std::vector<int> postorder(const ClusterTree& tree);

// nullopt when the tree is well-formed, otherwise a description of the
// first violation found.
std::optional<std::string> validate_tree(const ClusterTree& tree);

// {n, nodes:[{lo,hi,children}]} round-trip.
std::string tree_to_json(const ClusterTree& tree);
ClusterTree tree_from_json(const std::string& text);

}  // namespace hss
