#include "creconf/pqtree.hpp"

#include <algorithm>
#include <stdexcept>

namespace creconf {

namespace {
struct ReduceFail {};
}  // namespace

PQTree::PQTree(uint32_t num_leaves) : num_leaves_(num_leaves) {
    if (num_leaves == 0) throw std::invalid_argument("PQTree needs at least one leaf");
    root_ = new_node(Node::Type::P);
    for (uint32_t i = 0; i < num_leaves; ++i) {
        int leaf = new_node(Node::Type::Leaf);
        nodes_[leaf].leaf = i;
        nodes_[root_].children.push_back(leaf);
    }
    if (num_leaves == 1) root_ = nodes_[root_].children[0];
}

int PQTree::new_node(Node::Type type) {
    nodes_.push_back(Node{type, 0, {}});
    return static_cast<int>(nodes_.size()) - 1;
}

int PQTree::group(const std::vector<int>& ids) {
    if (ids.empty()) return -1;
    if (ids.size() == 1) return ids[0];
    int p = new_node(Node::Type::P);
    nodes_[p].children = ids;
    return p;
}

void PQTree::count_pertinent(int v, const std::vector<bool>& in_set, std::vector<uint32_t>& pert,
                             std::vector<uint32_t>& total) const {
    const Node& nd = nodes_[v];
    if (nd.type == Node::Type::Leaf) {
        pert[v] = in_set[nd.leaf] ? 1 : 0;
        total[v] = 1;
        return;
    }
    pert[v] = 0;
    total[v] = 0;
    for (int c : nd.children) {
        count_pertinent(c, in_set, pert, total);
        pert[v] += pert[c];
        total[v] += total[c];
    }
}

// Restructures the subtree of v so the pertinent leaves can appear
// consecutively. Away from the pertinent root they must additionally be
// gatherable at one end: partial results are Q-nodes whose children run
// empty block first, full block last.
PQTree::Transformed PQTree::transform(int v, bool is_root, const std::vector<uint32_t>& pert,
                                      const std::vector<uint32_t>& total) {
    if (pert[v] == 0) return {Label::Empty, v};
    if (pert[v] == total[v]) return {Label::Full, v};
    // nodes_ may reallocate during recursion; never hold references across it
    const Node::Type type = nodes_[v].type;
    const std::vector<int> children = nodes_[v].children;
    if (type == Node::Type::Leaf) throw ReduceFail{};  // cannot happen

    if (type == Node::Type::P) {
        std::vector<int> empties, fulls, partials;
        for (int c : children) {
            Transformed t = transform(c, false, pert, total);
            switch (t.label) {
                case Label::Empty: empties.push_back(t.node); break;
                case Label::Full: fulls.push_back(t.node); break;
                case Label::Partial: partials.push_back(t.node); break;
            }
        }
        if (!is_root) {
            if (partials.size() > 1) throw ReduceFail{};
            int q = new_node(Node::Type::Q);
            std::vector<int> seq;
            if (int g = group(empties); g != -1) seq.push_back(g);
            if (!partials.empty())
                for (int c : nodes_[partials[0]].children) seq.push_back(c);
            if (int g = group(fulls); g != -1) seq.push_back(g);
            nodes_[q].children = std::move(seq);
            return {Label::Partial, q};
        }
        // pertinent root
        if (partials.size() > 2) throw ReduceFail{};
        if (partials.empty()) {
            std::vector<int> kids = empties;
            kids.push_back(group(fulls));
            nodes_[v].children = std::move(kids);
            return {Label::Partial, v};
        }
        int q = new_node(Node::Type::Q);
        std::vector<int> seq;
        for (int c : nodes_[partials[0]].children) seq.push_back(c);
        if (int g = group(fulls); g != -1) seq.push_back(g);
        if (partials.size() == 2) {
            const auto& other = nodes_[partials[1]].children;
            for (auto it = other.rbegin(); it != other.rend(); ++it) seq.push_back(*it);
        }
        nodes_[q].children = std::move(seq);
        if (empties.empty()) return {Label::Partial, q};
        std::vector<int> kids = empties;
        kids.push_back(q);
        nodes_[v].children = std::move(kids);
        return {Label::Partial, v};
    }

    // Q node
    std::vector<Transformed> kids;
    kids.reserve(children.size());
    for (int c : children) kids.push_back(transform(c, false, pert, total));

    auto splice = [&](std::vector<int>& out, int partial, bool reversed) {
        const auto& ch = nodes_[partial].children;
        if (!reversed)
            out.insert(out.end(), ch.begin(), ch.end());
        else
            out.insert(out.end(), ch.rbegin(), ch.rend());
    };

    if (!is_root) {
        // after possibly reversing, the children must read: empties, at most
        // one partial, fulls
        for (int attempt = 0; attempt < 2; ++attempt) {
            std::vector<int> out;
            int state = 0;
            bool ok = true;
            for (const auto& t : kids) {
                if (state == 0) {
                    if (t.label == Label::Empty) {
                        out.push_back(t.node);
                    } else if (t.label == Label::Partial) {
                        splice(out, t.node, false);
                        state = 1;
                    } else {
                        out.push_back(t.node);
                        state = 1;
                    }
                } else {
                    if (t.label != Label::Full) {
                        ok = false;
                        break;
                    }
                    out.push_back(t.node);
                }
            }
            if (ok) {
                nodes_[v].children = std::move(out);
                return {Label::Partial, v};
            }
            std::reverse(kids.begin(), kids.end());
        }
        throw ReduceFail{};
    }

    // pertinent root Q: empties, optional partial, fulls, optional reversed
    // partial, empties
    std::vector<int> out;
    int state = 0;
    for (const auto& t : kids) {
        if (state == 0) {
            if (t.label == Label::Empty) {
                out.push_back(t.node);
            } else if (t.label == Label::Partial) {
                splice(out, t.node, false);
                state = 1;
            } else {
                out.push_back(t.node);
                state = 1;
            }
        } else if (state == 1) {
            if (t.label == Label::Full) {
                out.push_back(t.node);
            } else if (t.label == Label::Partial) {
                splice(out, t.node, true);
                state = 2;
            } else {
                out.push_back(t.node);
                state = 2;
            }
        } else {
            if (t.label != Label::Empty) throw ReduceFail{};
            out.push_back(t.node);
        }
    }
    nodes_[v].children = std::move(out);
    return {Label::Partial, v};
}

int PQTree::normalize(int v) {
    Node& nd = nodes_[v];
    if (nd.type == Node::Type::Leaf) return v;
    for (int& c : nd.children) c = normalize(c);
    if (nd.children.size() == 1) return nd.children[0];
    return v;
}

bool PQTree::reduce(const std::vector<uint32_t>& leaves) {
    if (dead_) throw std::logic_error("PQTree: reduce after failure");
    for (uint32_t l : leaves)
        if (l >= num_leaves_) throw std::invalid_argument("PQTree: leaf out of range");
    if (leaves.size() <= 1) return true;

    std::vector<bool> in_set(num_leaves_, false);
    for (uint32_t l : leaves) in_set[l] = true;

    std::vector<uint32_t> pert(nodes_.size()), total(nodes_.size());
    count_pertinent(root_, in_set, pert, total);
    const uint32_t want = pert[root_];

    int parent = -1, v = root_;
    while (true) {
        int next = -1;
        for (int c : nodes_[v].children)
            if (pert[c] == want) {
                next = c;
                break;
            }
        if (next == -1) break;
        parent = v;
        v = next;
    }

    try {
        Transformed t = transform(v, true, pert, total);
        if (t.node != v) {
            if (parent == -1) {
                root_ = t.node;
            } else {
                for (int& c : nodes_[parent].children)
                    if (c == v) c = t.node;
            }
        }
    } catch (const ReduceFail&) {
        dead_ = true;
        return false;
    }
    root_ = normalize(root_);
    return true;
}

void PQTree::collect(int v, std::vector<uint32_t>& out) const {
    const Node& nd = nodes_[v];
    if (nd.type == Node::Type::Leaf) {
        out.push_back(nd.leaf);
        return;
    }
    for (int c : nd.children) collect(c, out);
}

std::vector<uint32_t> PQTree::frontier() const {
    std::vector<uint32_t> out;
    out.reserve(num_leaves_);
    collect(root_, out);
    return out;
}

}  // namespace creconf
