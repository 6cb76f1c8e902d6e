#ifndef NATID_GRAPH_HPP
#define NATID_GRAPH_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "natid/model.hpp"

namespace natid::graph {

enum class GraphKind { Follow, Interaction };

// Node-labeled weighted graph over labeled users, node ids sorted so every
// construction of the same dataset is identical.
struct LabeledGraph {
    std::vector<std::string> node_ids;
    std::vector<model::Stance> node_labels;
    struct Edge {
        int src;
        int dst;
        double weight;
    };
    std::vector<Edge> edges;
    bool directed = true;
    GraphKind kind = GraphKind::Follow;
};

struct MixingMatrix {
    // e[i][j]: fraction of edge weight from label i to label j (0 = PI).
    double e[2][2];
    double a[2];  // row sums
    double b[2];  // column sums
};

struct HomophilyReport {
    double assortativity_r = 0.0;
    double p_value = 1.0;  // label-permutation test (primary)
    double mww_p_value = 1.0;  // same-label neighbor fractions (secondary)
    std::string method;
    std::int64_t n_nodes = 0;
    std::int64_t n_edges = 0;
};

// Which interaction kinds contribute, and with weight 1 each.
struct InteractionKinds {
    bool retweets = true;
    bool replies = true;
    bool mentions = true;
    bool favourites = true;
};

// Directed graph over labeled users: u->v iff v in u.followees or u in
// v.followers. Deduplicated, self-loops dropped, weight 1. Fewer than two
// labeled users is an error.
LabeledGraph build_follow_graph(const model::Dataset& dataset);

// Directed weighted graph; weight(u->v) sums u's retweets of, replies to,
// mentions of, and favourites of v (labeled pairs only, kinds configurable).
LabeledGraph build_interaction_graph(const model::Dataset& dataset,
                                     const InteractionKinds& kinds = {});

// Edge-weight fractions by (source label, target label). With symmetrize
// each edge contributes half its weight in both directions; by default
// directed graphs report the directed matrix and undirected ones the
// symmetric matrix.
MixingMatrix mixing_matrix(const LabeledGraph& g, bool symmetrize);
MixingMatrix mixing_matrix(const LabeledGraph& g);

// Newman's nominal assortativity r = (sum_i e_ii - sum_i a_i b_i) /
// (1 - sum_i a_i b_i) over the symmetrized mixing matrix.
double nominal_assortativity(const LabeledGraph& g);

// Primary p: share of label permutations with r_perm >= r_observed, +1
// smoothing on both numerator and denominator. Secondary: Mann-Whitney U on
// per-node same-label neighbor fractions, observed vs pooled permuted.
HomophilyReport homophily_significance(const LabeledGraph& g,
                                       int n_permutations, std::uint64_t seed);

enum class ExportFormat { DOT, GraphML, CSV };

// Writes the graph with node attribute "stance" and edge attribute "weight";
// node and edge order is sorted, so identical graphs export byte-identically.
// Returns bytes written.
std::int64_t export_graph(const LabeledGraph& g, ExportFormat format,
                          const std::filesystem::path& path);

}  // namespace natid::graph

#endif
