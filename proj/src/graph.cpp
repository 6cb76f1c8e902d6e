#include "natid/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "natid/stats.hpp"
#include "natid/util.hpp"

namespace natid::graph {

namespace {

struct NodeIndex {
    std::vector<std::string> ids;
    std::vector<model::Stance> labels;
    std::unordered_map<std::string, int> of;
};

NodeIndex labeled_nodes(const model::Dataset& dataset) {
    NodeIndex idx;
    for (const auto& [id, user] : dataset.users) {
        if (!user.label) continue;
        idx.of.emplace(id, (int)idx.ids.size());
        idx.ids.push_back(id);
        idx.labels.push_back(*user.label);
    }
    if (idx.ids.size() < 2) throw InputError("degenerate graph");
    return idx;
}

}  // namespace

LabeledGraph build_follow_graph(const model::Dataset& dataset) {
    NodeIndex idx = labeled_nodes(dataset);
    std::set<std::pair<int, int>> edges;
    for (const auto& [id, user] : dataset.users) {
        if (!user.label) continue;
        int u = idx.of.at(id);
        for (const auto& v_id : user.followees) {
            auto it = idx.of.find(v_id);
            if (it != idx.of.end() && it->second != u)
                edges.emplace(u, it->second);
        }
        for (const auto& w_id : user.followers) {
            auto it = idx.of.find(w_id);
            if (it != idx.of.end() && it->second != u)
                edges.emplace(it->second, u);
        }
    }
    LabeledGraph g;
    g.node_ids = std::move(idx.ids);
    g.node_labels = std::move(idx.labels);
    g.directed = true;
    g.kind = GraphKind::Follow;
    for (auto [s, d] : edges) g.edges.push_back({s, d, 1.0});
    return g;
}

LabeledGraph build_interaction_graph(const model::Dataset& dataset,
                                     const InteractionKinds& kinds) {
    NodeIndex idx = labeled_nodes(dataset);
    std::map<std::pair<int, int>, double> weight;
    auto add = [&](int u, const std::string& target_id, double w) {
        auto it = idx.of.find(target_id);
        if (it == idx.of.end() || it->second == u) return;
        weight[{u, it->second}] += w;
    };
    for (const auto& [id, user] : dataset.users) {
        if (!user.label) continue;
        int u = idx.of.at(id);
        for (const auto& t : user.timeline) {
            if (kinds.retweets && t.retweet_of) add(u, *t.retweet_of, 1.0);
            if (kinds.replies && t.reply_to) add(u, *t.reply_to, 1.0);
            if (kinds.mentions)
                for (const auto& m : t.mentions) add(u, m, 1.0);
        }
        if (kinds.favourites)
            for (const auto& t : user.favourites) add(u, t.author_id, 1.0);
    }
    LabeledGraph g;
    g.node_ids = std::move(idx.ids);
    g.node_labels = std::move(idx.labels);
    g.directed = true;
    g.kind = GraphKind::Interaction;
    for (const auto& [key, w] : weight) g.edges.push_back({key.first, key.second, w});
    return g;
}

namespace {

MixingMatrix mixing_from(const std::vector<LabeledGraph::Edge>& edges,
                         const std::vector<model::Stance>& labels,
                         bool symmetrize) {
    MixingMatrix m{};
    double total = 0.0;
    for (const auto& e : edges) {
        int i = labels[e.src] == model::Stance::PI ? 0 : 1;
        int j = labels[e.dst] == model::Stance::PI ? 0 : 1;
        if (symmetrize) {
            m.e[i][j] += e.weight / 2.0;
            m.e[j][i] += e.weight / 2.0;
        } else {
            m.e[i][j] += e.weight;
        }
        total += e.weight;
    }
    if (total <= 0.0) throw InputError("graph has no edges");
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m.e[i][j] /= total;
    for (int i = 0; i < 2; ++i) {
        m.a[i] = m.e[i][0] + m.e[i][1];
        m.b[i] = m.e[0][i] + m.e[1][i];
    }
    return m;
}

// Returns r, or NaN when assortativity is undefined (all endpoint weight on
// one label). Used by the permutation loop, which must not throw per
// replicate.
double assortativity_or_nan(const std::vector<LabeledGraph::Edge>& edges,
                            const std::vector<model::Stance>& labels) {
    MixingMatrix m = mixing_from(edges, labels, true);
    double trace = m.e[0][0] + m.e[1][1];
    double ab = m.a[0] * m.b[0] + m.a[1] * m.b[1];
    if (1.0 - ab <= 1e-12) return std::numeric_limits<double>::quiet_NaN();
    return (trace - ab) / (1.0 - ab);
}

}  // namespace

MixingMatrix mixing_matrix(const LabeledGraph& g, bool symmetrize) {
    return mixing_from(g.edges, g.node_labels, symmetrize);
}

MixingMatrix mixing_matrix(const LabeledGraph& g) {
    return mixing_from(g.edges, g.node_labels, !g.directed);
}

double nominal_assortativity(const LabeledGraph& g) {
    double r = assortativity_or_nan(g.edges, g.node_labels);
    if (std::isnan(r)) throw InputError("undefined assortativity");
    return r;
}

HomophilyReport homophily_significance(const LabeledGraph& g,
                                       int n_permutations,
                                       std::uint64_t seed) {
    if (n_permutations < 100)
        throw InputError("need at least 100 permutations");
    if (g.edges.size() < 2) throw InputError("degenerate graph");
    const double r_obs = nominal_assortativity(g);

    // Per-node same-label weight fraction (nodes with incident edges only).
    auto neighbor_fractions = [&](const std::vector<model::Stance>& labels) {
        std::vector<double> same(labels.size(), 0.0), total(labels.size(), 0.0);
        for (const auto& e : g.edges) {
            bool eq = labels[e.src] == labels[e.dst];
            for (int node : {e.src, e.dst}) {
                total[node] += e.weight;
                if (eq) same[node] += e.weight;
            }
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (total[i] > 0) out.push_back(same[i] / total[i]);
        return out;
    };

    const int mww_replicates = std::min(n_permutations, 50);
    std::vector<double> observed = neighbor_fractions(g.node_labels);
    std::vector<double> pooled;
    pooled.reserve(observed.size() * mww_replicates);

    int at_least = 0;
    for (int rep = 0; rep < n_permutations; ++rep) {
        // Fresh copy per replicate so results do not depend on replicate
        // order (they could run in parallel).
        std::vector<model::Stance> perm = g.node_labels;
        Rng rng(derive_seed(seed, (std::uint64_t)rep + 1));
        rng.shuffle(perm);
        double r = assortativity_or_nan(g.edges, perm);
        // A permutation that concentrates all endpoint weight on one label
        // counts as maximal homophily: conservative for the p-value.
        if (std::isnan(r)) r = 1.0;
        if (r >= r_obs - 1e-12) ++at_least;
        if (rep < mww_replicates) {
            auto f = neighbor_fractions(perm);
            pooled.insert(pooled.end(), f.begin(), f.end());
        }
    }

    HomophilyReport report;
    report.assortativity_r = r_obs;
    report.p_value = (1.0 + at_least) / (1.0 + n_permutations);
    report.mww_p_value =
        stats::mann_whitney_u(observed, pooled).p_value;
    report.method = "permutation_r(n=" + std::to_string(n_permutations) +
                    ")+mww_neighbor_fraction(replicates=" +
                    std::to_string(mww_replicates) + "); headline p from the "
                    "permutation test";
    report.n_nodes = (std::int64_t)g.node_ids.size();
    report.n_edges = (std::int64_t)g.edges.size();
    return report;
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::int64_t export_graph(const LabeledGraph& g, ExportFormat format,
                          const std::filesystem::path& path) {
    // Sort nodes by id and edges by (src id, dst id) so equal graphs export
    // byte-identically regardless of construction history.
    std::vector<int> node_order(g.node_ids.size());
    for (std::size_t i = 0; i < node_order.size(); ++i) node_order[i] = (int)i;
    std::sort(node_order.begin(), node_order.end(), [&](int a, int b) {
        return g.node_ids[a] < g.node_ids[b];
    });
    std::vector<LabeledGraph::Edge> edges = g.edges;
    std::sort(edges.begin(), edges.end(), [&](const auto& a, const auto& b) {
        if (g.node_ids[a.src] != g.node_ids[b.src])
            return g.node_ids[a.src] < g.node_ids[b.src];
        return g.node_ids[a.dst] < g.node_ids[b.dst];
    });

    auto stance = [&](int n) { return model::stance_name(g.node_labels[n]); };
    std::string buf;
    switch (format) {
        case ExportFormat::DOT: {
            buf += g.directed ? "digraph g {\n" : "graph g {\n";
            const char* arrow = g.directed ? " -> " : " -- ";
            for (int n : node_order)
                buf += "  \"" + dot_escape(g.node_ids[n]) + "\" [stance=\"" +
                       stance(n) + "\"];\n";
            for (const auto& e : edges)
                buf += "  \"" + dot_escape(g.node_ids[e.src]) + "\"" + arrow +
                       "\"" + dot_escape(g.node_ids[e.dst]) + "\" [weight=" +
                       format_double(e.weight) + "];\n";
            buf += "}\n";
            break;
        }
        case ExportFormat::GraphML: {
            buf += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
            buf += "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
            buf += "  <key id=\"d0\" for=\"node\" attr.name=\"stance\" "
                   "attr.type=\"string\"/>\n";
            buf += "  <key id=\"d1\" for=\"edge\" attr.name=\"weight\" "
                   "attr.type=\"double\"/>\n";
            buf += std::string("  <graph edgedefault=\"") +
                   (g.directed ? "directed" : "undirected") + "\">\n";
            for (int n : node_order)
                buf += "    <node id=\"" + xml_escape(g.node_ids[n]) +
                       "\"><data key=\"d0\">" + stance(n) + "</data></node>\n";
            for (const auto& e : edges)
                buf += "    <edge source=\"" + xml_escape(g.node_ids[e.src]) +
                       "\" target=\"" + xml_escape(g.node_ids[e.dst]) +
                       "\"><data key=\"d1\">" + format_double(e.weight) +
                       "</data></edge>\n";
            buf += "  </graph>\n</graphml>\n";
            break;
        }
        case ExportFormat::CSV: {
            buf += "src,dst,weight,src_stance,dst_stance\n";
            for (const auto& e : edges)
                buf += csv_escape(g.node_ids[e.src]) + "," +
                       csv_escape(g.node_ids[e.dst]) + "," +
                       format_double(e.weight) + "," + stance(e.src) + "," +
                       stance(e.dst) + "\n";
            break;
        }
        default:
            throw InputError("unknown export format");
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << buf;
    if (!out) throw InputError("write failed for " + path.string());
    return (std::int64_t)buf.size();
}

}  // namespace natid::graph
