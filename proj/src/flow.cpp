#include "resil/flow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace resil {

FlowNetwork::FlowNetwork(int nodes, int source, int sink) : s_(source), t_(sink), adj_(nodes) {}

int FlowNetwork::add_node() {
    adj_.emplace_back();
    return static_cast<int>(adj_.size()) - 1;
}

int FlowNetwork::add_edge(int from, int to, long long cap, int tag) {
    info_.push_back({from, to, cap, tag});
    return static_cast<int>(info_.size()) - 1;
}

namespace {

struct Arc {
    int to;
    long long cap;
    int rev;
};

class Dinic {
public:
    explicit Dinic(int n) : g_(n), level_(n), it_(n) {}

    int add(int u, int v, long long c) {
        g_[u].push_back({v, c, static_cast<int>(g_[v].size())});
        g_[v].push_back({u, 0, static_cast<int>(g_[u].size()) - 1});
        return static_cast<int>(g_[u].size()) - 1;
    }

    long long run(int s, int t) {
        long long flow = 0;
        while (bfs(s, t)) {
            std::fill(it_.begin(), it_.end(), 0);
            while (long long f = dfs(s, t, std::numeric_limits<long long>::max())) flow += f;
        }
        return flow;
    }

    std::vector<char> reachable(int s) const {
        std::vector<char> seen(g_.size(), 0);
        std::vector<int> st{s};
        seen[s] = 1;
        while (!st.empty()) {
            int u = st.back();
            st.pop_back();
            for (const auto& a : g_[u])
                if (a.cap > 0 && !seen[a.to]) {
                    seen[a.to] = 1;
                    st.push_back(a.to);
                }
        }
        return seen;
    }

private:
    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (const auto& a : g_[u])
                if (a.cap > 0 && level_[a.to] < 0) {
                    level_[a.to] = level_[u] + 1;
                    q.push(a.to);
                }
        }
        return level_[t] >= 0;
    }

    long long dfs(int u, int t, long long f) {
        if (u == t) return f;
        for (int& i = it_[u]; i < static_cast<int>(g_[u].size()); ++i) {
            Arc& a = g_[u][i];
            if (a.cap <= 0 || level_[a.to] != level_[u] + 1) continue;
            long long d = dfs(a.to, t, std::min(f, a.cap));
            if (d > 0) {
                a.cap -= d;
                g_[a.to][a.rev].cap += d;
                return d;
            }
        }
        return 0;
    }

    std::vector<std::vector<Arc>> g_;
    std::vector<int> level_, it_;
};

}  // namespace

std::optional<FlowNetwork::Cut> FlowNetwork::min_cut() const {
    long long finite = 0;
    for (const auto& e : info_)
        if (e.cap != kUnbounded) finite += e.cap;
    const long long inf = finite + 1;
    Dinic d(node_count());
    for (const auto& e : info_) d.add(e.from, e.to, e.cap == kUnbounded ? inf : e.cap);
    long long value = s_ == t_ ? inf : d.run(s_, t_);
    if (value >= inf) return std::nullopt;
    Cut cut;
    cut.value = value;
    cut.source_side = d.reachable(s_);
    for (std::size_t i = 0; i < info_.size(); ++i) {
        const auto& e = info_[i];
        if (cut.source_side[e.from] && !cut.source_side[e.to]) cut.edges.push_back(static_cast<int>(i));
    }
    return cut;
}

}  // namespace resil
