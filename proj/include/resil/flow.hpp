#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace resil {

// Directed network with integer capacities. Edges may carry a tag (e.g. a
// fact index) that survives into the extracted cut.
class FlowNetwork {
public:
    static constexpr long long kUnbounded = -1;

    explicit FlowNetwork(int nodes = 2, int source = 0, int sink = 1);

    int add_node();
    int node_count() const { return static_cast<int>(adj_.size()); }
    int source() const { return s_; }
    int sink() const { return t_; }

    // cap == kUnbounded marks an infinite edge. Returns the edge id.
    int add_edge(int from, int to, long long cap, int tag = -1);

    struct EdgeInfo {
        int from, to;
        long long cap;  // kUnbounded for infinite
        int tag;
    };
    const std::vector<EdgeInfo>& edges() const { return info_; }

    struct Cut {
        long long value = 0;
        std::vector<int> edges;  // edge ids, ascending
        std::vector<char> source_side;
    };

    // Exact max-flow / min-cut (Dinic). nullopt if every cut is infinite.
    std::optional<Cut> min_cut() const;

private:
    int s_, t_;
    std::vector<std::vector<int>> adj_;
    std::vector<EdgeInfo> info_;
};

}  // namespace resil
