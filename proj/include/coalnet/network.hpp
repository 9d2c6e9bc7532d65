#pragma once

#include "coalnet/ratmat.hpp"

#include <string>
#include <vector>

namespace coalnet {

struct Edge {
    int source = 0; // 1-based cell indices
    int target = 0;
    Rational weight;
};

/// Weighted uniform coupled-cell network. Immutable after construction;
/// W(i,j) is the weight of the edge j -> i, zero when absent.
class Network {
public:
    static Network from_edges(int n_cells, const std::vector<Edge>& edges,
                              std::vector<std::string> labels = {});

    int n_cells() const { return n_; }
    const RatMat& adjacency() const { return w_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<Edge>& edges() const { return edges_; }

    Rational valency(int cell) const; // 1-based
    RatMat valency_matrix() const;
    RatMat laplacian() const;
    bool is_regular() const;

    /// Same network with cells renumbered by `perm` (perm[new] = old, 0-based).
    Network permuted(const std::vector<int>& perm) const;

private:
    int n_ = 0;
    RatMat w_;
    std::vector<std::string> labels_;
    std::vector<Edge> edges_; // merged, zero-weight edges dropped
};

struct CoalescenceSpec {
    Network first;
    int merge_cell_1 = 0; // 1-based
    Network second;
    int merge_cell_2 = 0;

    /// Copy with the merging cells renumbered to "last of first / first of second".
    CoalescenceSpec canonical() const;
    bool is_canonical() const;
};

Network build_network(int n_cells, const std::vector<Edge>& edges,
                      std::vector<std::string> labels = {});
RatMat adjacency(const Network& net);
RatMat laplacian(const Network& net);
Rational valency(const Network& net, int cell);
bool is_regular(const Network& net);

Network coalesce(const CoalescenceSpec& spec);
bool is_ffcn(const CoalescenceSpec& spec);

/// Left fold of pairwise coalescences. merges[i] = (cell of the running
/// network, cell of nets[i+1]); each step must be feedforward.
struct RFoldSpec {
    std::vector<Network> nets;
    std::vector<std::pair<int, int>> merges;
};
Network sequential_coalesce(const RFoldSpec& spec);

// --- file formats (structured text; see README) ---
Network load_network(const std::string& path);
Network parse_network_json(const std::string& text);
CoalescenceSpec load_coalescence_spec(const std::string& path);
std::string network_to_json(const Network& net);
void save_network(const Network& net, const std::string& path);

} // namespace coalnet
