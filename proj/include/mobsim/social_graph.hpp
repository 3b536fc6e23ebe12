#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mobsim {

// Undirected contact network over agents 0..n-1.  Neighbor lists are kept
// sorted so sampling over them is deterministic.
class SocialGraph {
  public:
    SocialGraph() = default;
    explicit SocialGraph(std::size_t n_nodes) : adj_(n_nodes) {}

    void add_edge(int u, int v);

    std::size_t node_count() const { return adj_.size(); }
    std::size_t edge_count() const { return n_edges_; }
    const std::vector<int>& neighbors(int u) const;
    int degree(int u) const;
    bool has_edge(int u, int v) const;

    // Component label per node, labels 0..k-1 in discovery order.
    std::vector<int> component_labels() const;

  private:
    std::vector<std::vector<int>> adj_;
    std::size_t n_edges_ = 0;
};

// Edge list, one "u v" pair per line, 0-based ids.  Node count is the max id
// + 1 unless a larger n_nodes is forced.
SocialGraph read_social_graph(const std::string& path, std::size_t n_nodes = 0);
void write_social_graph(const std::string& path, const SocialGraph& graph);

}  // namespace mobsim
