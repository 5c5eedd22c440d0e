#include "creconf/maxflow.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace creconf {

bool MaxFlow::bfs(int source, int sink) {
    level_.assign(head_.size(), -1);
    std::deque<int> q;
    level_[source] = 0;
    q.push_back(source);
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int e = head_[v]; e != -1; e = edges_[e].next) {
            if (edges_[e].cap > 0 && level_[edges_[e].to] == -1) {
                level_[edges_[e].to] = level_[v] + 1;
                q.push_back(edges_[e].to);
            }
        }
    }
    return level_[sink] != -1;
}

int64_t MaxFlow::dfs(int v, int sink, int64_t limit) {
    if (v == sink) return limit;
    for (int& e = iter_[v]; e != -1; e = edges_[e].next) {
        Edge& ed = edges_[e];
        if (ed.cap <= 0 || level_[ed.to] != level_[v] + 1) continue;
        int64_t pushed = dfs(ed.to, sink, std::min(limit, ed.cap));
        if (pushed > 0) {
            ed.cap -= pushed;
            edges_[e ^ 1].cap += pushed;
            return pushed;
        }
    }
    level_[v] = -1;
    return 0;
}

int64_t MaxFlow::run(int source, int sink) {
    int64_t total = 0;
    while (bfs(source, sink)) {
        iter_ = head_;
        while (int64_t pushed = dfs(source, sink, std::numeric_limits<int64_t>::max()))
            total += pushed;
    }
    return total;
}

}  // namespace creconf
