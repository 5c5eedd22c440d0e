#pragma once

#include <cstdint>
#include <vector>

namespace creconf {

// Dinic's algorithm on a small integral network; used for the affordability
// feasibility check.
class MaxFlow {
public:
    explicit MaxFlow(int nodes) : head_(nodes, -1) {}

    // Returns the edge id; the reverse edge is id^1.
    int add_edge(int from, int to, int64_t cap) {
        edges_.push_back({to, head_[from], cap});
        head_[from] = static_cast<int>(edges_.size()) - 1;
        edges_.push_back({from, head_[to], 0});
        head_[to] = static_cast<int>(edges_.size()) - 1;
        return static_cast<int>(edges_.size()) - 2;
    }

    int64_t run(int source, int sink);
    int64_t flow_on(int edge_id) const { return edges_[edge_id ^ 1].cap; }

private:
    struct Edge {
        int to;
        int next;
        int64_t cap;
    };

    bool bfs(int source, int sink);
    int64_t dfs(int v, int sink, int64_t limit);

    std::vector<int> head_;
    std::vector<Edge> edges_;
    std::vector<int> level_;
    std::vector<int> iter_;
};

}  // namespace creconf
