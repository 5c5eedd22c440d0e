#pragma once

#include <cstdint>
#include <vector>

namespace creconf {

// PQ-tree over a fixed leaf universe, supporting consecutive-ones reductions.
// P-node children may be permuted freely, Q-node children only reversed. The
// implementation relabels and restructures the whole pertinent subtree per
// reduction (no amortized bubbling), which is plenty at desk scale.
class PQTree {
public:
    explicit PQTree(uint32_t num_leaves);

    // Constrains the given leaves to be consecutive in every represented
    // ordering. Returns false (leaving the tree unusable) if impossible.
    bool reduce(const std::vector<uint32_t>& leaves);

    // One ordering consistent with all successful reductions so far.
    std::vector<uint32_t> frontier() const;

private:
    struct Node {
        enum class Type { Leaf, P, Q } type;
        uint32_t leaf = 0;
        std::vector<int> children;
    };

    enum class Label { Empty, Full, Partial };
    struct Transformed {
        Label label;
        int node;  // possibly replaced
    };

    int new_node(Node::Type type);
    // Wraps ids in a P-node when there are several, or passes through one.
    int group(const std::vector<int>& ids);
    void count_pertinent(int v, const std::vector<bool>& in_set, std::vector<uint32_t>& pert,
                         std::vector<uint32_t>& total) const;
    Transformed transform(int v, bool is_root, const std::vector<uint32_t>& pert,
                          const std::vector<uint32_t>& total);
    int normalize(int v);
    void collect(int v, std::vector<uint32_t>& out) const;

    std::vector<Node> nodes_;
    int root_ = -1;
    uint32_t num_leaves_;
    bool dead_ = false;
};

}  // namespace creconf
