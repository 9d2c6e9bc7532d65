#include "coalnet/network.hpp"
#include "coalnet/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace coalnet {

using nlohmann::json;

Network Network::from_edges(int n_cells, const std::vector<Edge>& edges,
                            std::vector<std::string> labels) {
    if (n_cells < 1) throw IndexError("network needs at least one cell");
    Network net;
    net.n_ = n_cells;
    net.w_ = RatMat(n_cells, n_cells);
    std::map<std::pair<int, int>, Rational> merged;
    for (const auto& e : edges) {
        if (e.source < 1 || e.source > n_cells || e.target < 1 || e.target > n_cells)
            throw IndexError("edge (" + std::to_string(e.source) + "," + std::to_string(e.target) +
                             ") out of range for " + std::to_string(n_cells) + " cells");
        merged[{e.source, e.target}] += e.weight;
    }
    for (const auto& [key, w] : merged) {
        if (w == 0) continue; // a weight-0 edge is treated as absent
        net.w_(key.second - 1, key.first - 1) = w;
        net.edges_.push_back({key.first, key.second, w});
    }
    if (!labels.empty() && static_cast<int>(labels.size()) != n_cells)
        throw InputError("label count does not match n_cells");
    net.labels_ = std::move(labels);

    // Standing assumption: the underlying undirected graph is connected.
    std::vector<int> seen(n_cells, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        for (int j = 0; j < n_cells; ++j) {
            if (seen[j]) continue;
            if (net.w_(i, j) != 0 || net.w_(j, i) != 0) {
                seen[j] = 1;
                stack.push_back(j);
            }
        }
    }
    if (std::count(seen.begin(), seen.end(), 1) != n_cells)
        throw ConnectivityError("network is not connected");
    return net;
}

Rational Network::valency(int cell) const {
    if (cell < 1 || cell > n_) throw IndexError("cell index out of range");
    Rational v = 0;
    for (int j = 0; j < n_; ++j) v += w_(cell - 1, j);
    return v;
}

RatMat Network::valency_matrix() const {
    RatMat d(n_, n_);
    for (int i = 1; i <= n_; ++i) d(i - 1, i - 1) = valency(i);
    return d;
}

RatMat Network::laplacian() const { return valency_matrix() - w_; }

bool Network::is_regular() const {
    Rational v0 = valency(1);
    for (int i = 2; i <= n_; ++i)
        if (valency(i) != v0) return false;
    return true;
}

Network Network::permuted(const std::vector<int>& perm) const {
    std::vector<int> inv(n_);
    for (int i = 0; i < n_; ++i) inv[perm[i]] = i;
    std::vector<Edge> edges;
    for (const auto& e : edges_) edges.push_back({inv[e.source - 1] + 1, inv[e.target - 1] + 1, e.weight});
    std::vector<std::string> labels;
    if (!labels_.empty()) {
        labels.resize(n_);
        for (int i = 0; i < n_; ++i) labels[i] = labels_[perm[i]];
    }
    return from_edges(n_, edges, std::move(labels));
}

CoalescenceSpec CoalescenceSpec::canonical() const {
    if (merge_cell_1 < 1 || merge_cell_1 > first.n_cells())
        throw IndexError("merge cell of first network out of range");
    if (merge_cell_2 < 1 || merge_cell_2 > second.n_cells())
        throw IndexError("merge cell of second network out of range");
    CoalescenceSpec out = *this;
    if (merge_cell_1 != first.n_cells()) {
        std::vector<int> perm; // perm[new] = old
        for (int i = 0; i < first.n_cells(); ++i)
            if (i != merge_cell_1 - 1) perm.push_back(i);
        perm.push_back(merge_cell_1 - 1);
        out.first = first.permuted(perm);
        out.merge_cell_1 = first.n_cells();
    }
    if (merge_cell_2 != 1) {
        std::vector<int> perm = {merge_cell_2 - 1};
        for (int i = 0; i < second.n_cells(); ++i)
            if (i != merge_cell_2 - 1) perm.push_back(i);
        out.second = second.permuted(perm);
        out.merge_cell_2 = 1;
    }
    return out;
}

bool CoalescenceSpec::is_canonical() const {
    return merge_cell_1 == first.n_cells() && merge_cell_2 == 1;
}

Network build_network(int n_cells, const std::vector<Edge>& edges, std::vector<std::string> labels) {
    return Network::from_edges(n_cells, edges, std::move(labels));
}

RatMat adjacency(const Network& net) { return net.adjacency(); }
RatMat laplacian(const Network& net) { return net.laplacian(); }
Rational valency(const Network& net, int cell) { return net.valency(cell); }
bool is_regular(const Network& net) { return net.is_regular(); }

Network coalesce(const CoalescenceSpec& raw) {
    CoalescenceSpec spec = raw.canonical();
    const int n1 = spec.first.n_cells();
    const int n2 = spec.second.n_cells();
    const int n = n1 + n2 - 1;
    std::vector<Edge> edges;
    for (const auto& e : spec.first.edges()) edges.push_back(e);
    // Cells 2..n2 of the second network land at n1+1..n; its cell 1 is the
    // coalescence cell n1. Self-loop weights at the merged cell add up.
    auto renum = [&](int cell) { return cell == 1 ? n1 : n1 + cell - 1; };
    for (const auto& e : spec.second.edges()) edges.push_back({renum(e.source), renum(e.target), e.weight});

    std::vector<std::string> labels;
    const auto& l1 = spec.first.labels();
    const auto& l2 = spec.second.labels();
    if (!l1.empty() || !l2.empty()) {
        auto name1 = [&](int i) { return l1.empty() ? "a" + std::to_string(i + 1) : l1[i]; };
        auto name2 = [&](int i) { return l2.empty() ? "b" + std::to_string(i + 1) : l2[i]; };
        for (int i = 0; i < n1 - 1; ++i) labels.push_back(name1(i));
        std::string lc = name1(n1 - 1);
        if (name2(0) != lc) lc += "+" + name2(0);
        labels.push_back(lc);
        for (int i = 1; i < n2; ++i) labels.push_back(name2(i));
    }
    return Network::from_edges(n, edges, std::move(labels));
}

bool is_ffcn(const CoalescenceSpec& raw) {
    CoalescenceSpec spec = raw.canonical();
    // The merging cell may keep a self-loop; the c-row of L_{N2} is zero
    // exactly when no other cell of the second network feeds it.
    const RatMat& w = spec.second.adjacency();
    for (int j = 1; j < spec.second.n_cells(); ++j)
        if (w(0, j) != 0) return false;
    return true;
}

Network sequential_coalesce(const RFoldSpec& spec) {
    if (spec.nets.empty()) throw InputError("empty coalescence chain");
    if (spec.merges.size() + 1 != spec.nets.size()) throw InputError("chain needs one merge per step");
    Network acc = spec.nets[0];
    for (size_t i = 0; i < spec.merges.size(); ++i) {
        CoalescenceSpec step{acc, spec.merges[i].first, spec.nets[i + 1], spec.merges[i].second};
        if (!is_ffcn(step)) throw PreconditionError("chain step " + std::to_string(i + 1) + " is not feedforward");
        acc = coalesce(step);
    }
    return acc;
}

namespace {

Rational weight_from_json(const json& v) {
    if (v.is_number_integer()) return Rational(static_cast<long long>(v.get<long long>()));
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_float())
        throw ParseError("non-integer numeric weight; use a decimal string to keep it exact");
    throw ParseError("weight must be an integer or a decimal string");
}

Network network_from_json(const json& j) {
    if (!j.contains("n_cells")) throw ParseError("network file needs 'n_cells'");
    int n = j.at("n_cells").get<int>();
    std::vector<Edge> edges;
    if (j.contains("edges"))
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 3) throw ParseError("edge must be [source, target, weight]");
            edges.push_back({e[0].get<int>(), e[1].get<int>(), weight_from_json(e[2])});
        }
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    return Network::from_edges(n, edges, std::move(labels));
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

} // namespace

Network parse_network_json(const std::string& text) {
    try {
        return network_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
}

Network load_network(const std::string& path) { return network_from_json(parse_file(path)); }

CoalescenceSpec load_coalescence_spec(const std::string& path) {
    json j = parse_file(path);
    if (!j.contains("first") || !j.contains("second") || !j.contains("merge_1") || !j.contains("merge_2"))
        throw ParseError("coalescence file needs first/merge_1/second/merge_2");
    auto resolve = [&](const json& v) {
        if (v.is_string()) {
            std::filesystem::path p = v.get<std::string>();
            if (p.is_relative()) p = std::filesystem::path(path).parent_path() / p;
            return load_network(p.string());
        }
        return network_from_json(v);
    };
    CoalescenceSpec spec;
    spec.first = resolve(j.at("first"));
    spec.second = resolve(j.at("second"));
    spec.merge_cell_1 = j.at("merge_1").get<int>();
    spec.merge_cell_2 = j.at("merge_2").get<int>();
    return spec;
}

std::string network_to_json(const Network& net) {
    json j;
    j["n_cells"] = net.n_cells();
    if (!net.labels().empty()) j["labels"] = net.labels();
    json edges = json::array();
    for (const auto& e : net.edges()) {
        json entry = json::array();
        entry.push_back(e.source);
        entry.push_back(e.target);
        if (denominator(e.weight) == 1 && abs(numerator(e.weight)) < 1000000000)
            entry.push_back(static_cast<long long>(numerator(e.weight).convert_to<long long>()));
        else
            entry.push_back(rat_to_string(e.weight));
        edges.push_back(entry);
    }
    j["edges"] = edges;
    return j.dump(2);
}

void save_network(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << network_to_json(net) << "\n";
}

} // namespace coalnet
