#include "bivirus/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "bivirus/errors.hpp"
#include "bivirus/sis.hpp"

namespace bivirus {

namespace {

using EdgeTriple = std::tuple<std::size_t, std::size_t, double>;

bool parse_double(const std::string& tok, double& out) {
    std::size_t pos = 0;
    try {
        out = std::stod(tok, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == tok.size();
}

void check_connected(const kernels::Csr& csr) {
    const std::size_t n = csr.n;
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t visited = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t k = csr.row_ptr[u]; k < csr.row_ptr[u + 1]; ++k) {
            const std::size_t v = csr.col_idx[k];
            if (!seen[v]) {
                seen[v] = 1;
                ++visited;
                stack.push_back(v);
            }
        }
    }
    if (visited != n)
        throw DisconnectedError("graph has " + std::to_string(n) + " nodes but only " +
                                std::to_string(visited) + " reachable from node 0");
}

} // namespace

Graph Graph::from_edges(std::size_t n, const std::vector<EdgeTriple>& edges,
                        std::vector<std::string> node_labels) {
    if (n == 0) throw ParseError("graph must have at least one node");
    if (edges.empty()) throw DisconnectedError("graph has no edges");

    // adjacency buckets, deduplicated
    std::vector<std::map<std::size_t, double>> adj(n);
    for (const auto& [u, v, w] : edges) {
        if (u >= n || v >= n) throw ParseError("edge endpoint out of range");
        if (u == v) throw SelfLoopError("self loop at node " + std::to_string(u));
        if (w < 0.0) throw NegativeWeightError("edge (" + std::to_string(u) + "," +
                                               std::to_string(v) + ") has weight " +
                                               std::to_string(w));
        if (w == 0.0) throw NegativeWeightError("edge (" + std::to_string(u) + "," +
                                                std::to_string(v) + ") has zero weight");
        if (adj[u].count(v))
            throw DuplicateEdgeError("edge {" + std::to_string(u) + "," + std::to_string(v) +
                                     "} listed more than once");
        adj[u][v] = w;
        adj[v][u] = w;
    }

    Graph g;
    g.csr_.n = n;
    g.csr_.row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) g.csr_.row_ptr[i + 1] = g.csr_.row_ptr[i] + adj[i].size();
    g.csr_.col_idx.reserve(g.csr_.row_ptr[n]);
    g.csr_.values.reserve(g.csr_.row_ptr[n]);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [j, w] : adj[i]) {
            g.csr_.col_idx.push_back(j);
            g.csr_.values.push_back(w);
        }
    }

    check_connected(g.csr_);

    if (node_labels.empty()) {
        node_labels.resize(n);
        for (std::size_t i = 0; i < n; ++i) node_labels[i] = std::to_string(i);
    } else if (node_labels.size() != n) {
        throw ParseError("label count does not match node count");
    }
    g.labels_ = std::move(node_labels);
    return g;
}

double Graph::weight(std::size_t i, std::size_t j) const {
    for (std::size_t k = csr_.row_ptr[i]; k < csr_.row_ptr[i + 1]; ++k)
        if (csr_.col_idx[k] == j) return csr_.values[k];
    return 0.0;
}

Graph Graph::complete(std::size_t n) {
    std::vector<EdgeTriple> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j, 1.0);
    return from_edges(n, edges);
}

Graph Graph::cycle(std::size_t n) {
    std::vector<EdgeTriple> edges;
    for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n, 1.0);
    if (n == 2) edges.pop_back();  // avoid duplicate {0,1}
    return from_edges(n, edges);
}

Graph Graph::star(std::size_t n) {
    std::vector<EdgeTriple> edges;
    for (std::size_t i = 1; i < n; ++i) edges.emplace_back(0, i, 1.0);
    return from_edges(n, edges);
}

Graph Graph::path(std::size_t n) {
    std::vector<EdgeTriple> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1, 1.0);
    return from_edges(n, edges);
}

void Graph::emit(std::ostream& os) const {
    const auto& csr = csr_;
    char buf[64];
    for (std::size_t i = 0; i < csr.n; ++i) {
        for (std::size_t k = csr.row_ptr[i]; k < csr.row_ptr[i + 1]; ++k) {
            const std::size_t j = csr.col_idx[k];
            if (j < i) continue;  // upper triangle once
            os << labels_[i] << ' ' << labels_[j];
            if (csr.values[k] != 1.0) {
                std::snprintf(buf, sizeof buf, " %.17g", csr.values[k]);
                os << buf;
            }
            os << '\n';
        }
    }
}

Graph load_edge_list(std::istream& in) {
    std::unordered_map<std::string, std::size_t> id_of;
    std::vector<std::string> labels;
    std::vector<EdgeTriple> edges;
    // weight as listed, keyed on the unordered pair, to flag contradictory
    // double listings
    std::map<std::pair<std::size_t, std::size_t>, double> listed;

    auto intern = [&](const std::string& tok) {
        auto [it, inserted] = id_of.try_emplace(tok, labels.size());
        if (inserted) labels.push_back(tok);
        return it->second;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tu, tv, tw, extra;
        if (!(ls >> tu)) continue;  // blank line
        if (!(ls >> tv)) throw ParseError("line " + std::to_string(lineno) + ": expected two node ids");
        double w = 1.0;
        if (ls >> tw) {
            if (!parse_double(tw, w))
                throw ParseError("line " + std::to_string(lineno) + ": bad weight '" + tw + "'");
            if (ls >> extra)
                throw ParseError("line " + std::to_string(lineno) + ": trailing tokens");
        }
        const std::size_t u = intern(tu);
        const std::size_t v = intern(tv);
        if (u == v) throw SelfLoopError("line " + std::to_string(lineno) + ": node " + tu);
        if (w < 0.0)
            throw NegativeWeightError("line " + std::to_string(lineno) + ": weight " + std::to_string(w));
        if (w == 0.0)
            throw NegativeWeightError("line " + std::to_string(lineno) + ": zero weight");
        const auto key = std::minmax(u, v);
        auto [it, inserted] = listed.try_emplace({key.first, key.second}, w);
        if (!inserted) {
            const char* detail = (it->second == w) ? "duplicate edge" : "relisted with a different weight";
            throw DuplicateEdgeError("line " + std::to_string(lineno) + ": edge {" + tu + "," + tv +
                                     "} " + detail);
        }
        edges.emplace_back(u, v, w);
    }
    if (labels.empty()) throw ParseError("empty edge list");
    const std::size_t n = labels.size();
    return Graph::from_edges(n, edges, std::move(labels));
}

Graph load_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return load_edge_list(in);
}

DegreeStats degree_stats(const Graph& g) {
    const auto& csr = g.adjacency();
    DegreeStats st;
    st.d_min = std::numeric_limits<double>::infinity();
    st.d_max = 0.0;
    for (std::size_t i = 0; i < csr.n; ++i) {
        double deg = 0.0;
        for (std::size_t k = csr.row_ptr[i]; k < csr.row_ptr[i + 1]; ++k) deg += csr.values[k];
        st.d_min = std::min(st.d_min, deg);
        st.d_max = std::max(st.d_max, deg);
    }
    return st;
}

SufficiencyVerdict santos_bounds(const VirusParams& p1, const VirusParams& p2,
                                 const Graph& a, const Graph& b) {
    const DegreeStats da = degree_stats(a);
    const DegreeStats db = degree_stats(b);
    SufficiencyVerdict v;
    v.t1_dmin_a = p1.tau() * da.d_min;
    v.t2_dmax_b = p2.tau() * db.d_max;
    v.t1_dmax_a = p1.tau() * da.d_max;
    v.t2_dmin_b = p2.tau() * db.d_min;
    if (v.t1_dmin_a > v.t2_dmax_b)
        v.outcome = SufficiencyOutcome::Virus2Dies;
    else if (v.t1_dmax_a < v.t2_dmin_b)
        v.outcome = SufficiencyOutcome::Virus1Dies;
    else
        v.outcome = SufficiencyOutcome::Inconclusive;
    return v;
}

} // namespace bivirus
