#include "mobsim/social_graph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mobsim/errors.hpp"

namespace mobsim {

void SocialGraph::add_edge(int u, int v) {
    if (u == v) return;
    const std::size_t need = static_cast<std::size_t>(std::max(u, v)) + 1;
    if (need > adj_.size()) adj_.resize(need);
    auto& au = adj_[static_cast<std::size_t>(u)];
    auto it = std::lower_bound(au.begin(), au.end(), v);
    if (it != au.end() && *it == v) return;  // already present
    au.insert(it, v);
    auto& av = adj_[static_cast<std::size_t>(v)];
    av.insert(std::lower_bound(av.begin(), av.end(), u), u);
    ++n_edges_;
}

const std::vector<int>& SocialGraph::neighbors(int u) const {
    if (u < 0 || static_cast<std::size_t>(u) >= adj_.size()) {
        throw IdOutOfRangeError("graph node out of range: " + std::to_string(u));
    }
    return adj_[static_cast<std::size_t>(u)];
}

int SocialGraph::degree(int u) const {
    return static_cast<int>(neighbors(u).size());
}

bool SocialGraph::has_edge(int u, int v) const {
    const auto& nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<int> SocialGraph::component_labels() const {
    std::vector<int> label(adj_.size(), -1);
    int next = 0;
    std::vector<int> stack;
    for (std::size_t s = 0; s < adj_.size(); ++s) {
        if (label[s] != -1) continue;
        label[s] = next;
        stack.push_back(static_cast<int>(s));
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v : adj_[static_cast<std::size_t>(u)]) {
                if (label[static_cast<std::size_t>(v)] == -1) {
                    label[static_cast<std::size_t>(v)] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    return label;
}

SocialGraph read_social_graph(const std::string& path, std::size_t n_nodes) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open graph file: " + path);
    SocialGraph g(n_nodes);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ss(line);
        int u, v;
        if (ss >> u >> v) {
            if (u < 0 || v < 0) throw FileError("negative node id in " + path);
            g.add_edge(u, v);
        }
    }
    return g;
}

void write_social_graph(const std::string& path, const SocialGraph& graph) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw FileError("cannot open for writing: " + tmp);
        for (std::size_t u = 0; u < graph.node_count(); ++u) {
            for (int v : graph.neighbors(static_cast<int>(u))) {
                if (static_cast<int>(u) < v) out << u << ' ' << v << '\n';
            }
        }
        if (!out) throw FileError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw FileError("rename failed: " + path);
    }
}

}  // namespace mobsim
