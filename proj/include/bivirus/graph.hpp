#ifndef BIVIRUS_GRAPH_HPP
#define BIVIRUS_GRAPH_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "bivirus/kernels.hpp"

namespace bivirus {

/// Undirected, connected, weighted graph with nonnegative weights and no
/// self loops. Immutable once built; safe to share across threads.
class Graph {
public:
    /// Builds from an explicit edge list (endpoints already 0-based).
    /// Validates symmetry-by-construction, self loops, duplicates,
    /// positive weights and connectivity.
    static Graph from_edges(std::size_t n,
                            const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges,
                            std::vector<std::string> node_labels = {});

    // tiny built-in families used by tests and examples
    static Graph complete(std::size_t n);
    static Graph cycle(std::size_t n);
    static Graph star(std::size_t n);   // node 0 is the hub
    static Graph path(std::size_t n);

    std::size_t node_count() const { return csr_.n; }
    std::size_t edge_count() const { return csr_.nnz() / 2; }

    double weight(std::size_t i, std::size_t j) const;

    /// Adjacency matrix in CSR form (symmetric, both triangles stored).
    const kernels::Csr& adjacency() const { return csr_; }

    /// Original node id for a remapped index (identity labels when the
    /// graph was built programmatically).
    const std::string& label(std::size_t i) const { return labels_[i]; }
    const std::vector<std::string>& labels() const { return labels_; }

    /// Writes the graph back out in the edge-list format accepted by
    /// load_edge_list, using original labels. Weight-1 edges are written
    /// as "u v", others as "u v w" with full precision.
    void emit(std::ostream& os) const;

private:
    Graph() = default;
    kernels::Csr csr_;
    std::vector<std::string> labels_;
};

struct DegreeStats {
    double d_min = 0.0;
    double d_max = 0.0;
};

/// Parses a whitespace-separated edge list ("u v" or "u v w", '#' starts a
/// comment). Arbitrary node ids are remapped to 0..N-1 in order of first
/// appearance; single-direction lines are symmetrized.
Graph load_edge_list(std::istream& in);
Graph load_edge_list_file(const std::string& path);

/// Weighted row sums, min and max.
DegreeStats degree_stats(const Graph& g);

struct VirusParams;  // sis.hpp

enum class SufficiencyOutcome { Virus2Dies, Virus1Dies, Inconclusive };

/// Degree-bound sufficient conditions for one virus to die out:
/// tau1*d_min(A) > tau2*d_max(B) kills Virus 2, tau1*d_max(A) < tau2*d_min(B)
/// kills Virus 1. Much coarser than the spectral thresholds; kept for
/// comparison.
struct SufficiencyVerdict {
    SufficiencyOutcome outcome = SufficiencyOutcome::Inconclusive;
    double t1_dmin_a = 0.0;
    double t2_dmax_b = 0.0;
    double t1_dmax_a = 0.0;
    double t2_dmin_b = 0.0;
};

SufficiencyVerdict santos_bounds(const VirusParams& p1, const VirusParams& p2,
                                 const Graph& a, const Graph& b);

} // namespace bivirus

#endif
