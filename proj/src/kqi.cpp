#include "citemap/kqi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace citemap {

std::string_view to_string(TreeStrategy s) {
    switch (s) {
        case TreeStrategy::flat: return "flat";
        case TreeStrategy::citation_primary_parent: return "citation_primary_parent";
        case TreeStrategy::community_two_level: return "community_two_level";
        case TreeStrategy::custom: return "custom";
    }
    return "custom";
}

TreeStrategy parse_tree_strategy(std::string_view name) {
    if (name == "flat") return TreeStrategy::flat;
    if (name == "citation" || name == "citation_primary_parent") return TreeStrategy::citation_primary_parent;
    if (name == "community" || name == "community_two_level") return TreeStrategy::community_two_level;
    throw InvalidArgument("unknown tree strategy '" + std::string(name) + "'");
}

EncodingTree EncodingTree::from_parents(const CitationGraph& g, std::vector<std::int64_t> parent,
                                        TreeStrategy strategy) {
    const std::size_t n = g.node_count();
    if (parent.size() < n + 1) throw InvalidArgument("encoding tree: parent table shorter than graph");
    if (parent[root] != absent) throw InvalidArgument("encoding tree: root must not have a parent");
    const std::size_t size = parent.size();
    auto is_present = [&](std::size_t t) { return t == root || parent[t] != absent; };

    for (NodeIndex v = 0; v < n; ++v) {
        const bool isolated = g.degree(v) == 0;
        if (isolated && parent[v + 1] != absent)
            throw InvalidArgument("encoding tree: isolated node '" + g.record(v).paper_id + "' must be absent");
        if (!isolated && parent[v + 1] == absent)
            throw InvalidArgument("encoding tree: node '" + g.record(v).paper_id + "' missing");
    }
    std::vector<std::vector<std::size_t>> children(size);
    for (std::size_t t = 1; t < size; ++t) {
        if (parent[t] == absent) continue;
        if (parent[t] < 0 || static_cast<std::size_t>(parent[t]) >= size)
            throw InvalidArgument("encoding tree: parent index out of range");
        const auto p = static_cast<std::size_t>(parent[t]);
        if (!is_present(p)) throw InvalidArgument("encoding tree: parent is absent");
        children[p].push_back(t);
    }

    // Breadth-first from the root; anything unreached sits on a cycle.
    std::vector<std::size_t> order{root};
    order.reserve(size);
    for (std::size_t i = 0; i < order.size(); ++i)
        for (auto c : children[order[i]]) order.push_back(c);
    std::size_t present_count = 0;
    for (std::size_t t = 0; t < size; ++t) present_count += is_present(t);
    if (order.size() != present_count) throw InvalidArgument("encoding tree: parent links contain a cycle");

    EncodingTree tree;
    tree.graph_nodes_ = n;
    tree.strategy_ = strategy;
    tree.volume_.assign(size, 0);
    tree.cut_.assign(size, 0);
    std::vector<std::uint32_t> depth(size, 0);
    for (std::size_t i = 1; i < order.size(); ++i) depth[order[i]] = depth[static_cast<std::size_t>(parent[order[i]])] + 1;

    // Binary lifting for edge LCAs.
    std::uint32_t max_depth = 0;
    for (auto t : order) max_depth = std::max(max_depth, depth[t]);
    std::size_t levels = 1;
    while ((std::size_t{1} << levels) <= max_depth) ++levels;
    std::vector<std::vector<std::size_t>> up(levels, std::vector<std::size_t>(size, root));
    for (auto t : order) up[0][t] = t == root ? root : static_cast<std::size_t>(parent[t]);
    for (std::size_t k = 1; k < levels; ++k)
        for (auto t : order) up[k][t] = up[k - 1][up[k - 1][t]];
    auto lca = [&](std::size_t a, std::size_t b) {
        if (depth[a] < depth[b]) std::swap(a, b);
        for (std::size_t k = levels; k-- > 0;)
            if (depth[a] - depth[b] >= (1u << k)) a = up[k][a];
        if (a == b) return a;
        for (std::size_t k = levels; k-- > 0;)
            if (up[k][a] != up[k][b]) {
                a = up[k][a];
                b = up[k][b];
            }
        return up[0][a];
    };

    std::vector<std::uint64_t> internal_edges(size, 0);
    for (const auto& [u, v] : g.undirected_edges()) ++internal_edges[lca(tree_node(u), tree_node(v))];
    for (NodeIndex v = 0; v < n; ++v) tree.volume_[v + 1] = g.degree(v);

    tree.bottom_up_.assign(order.rbegin(), order.rend());
    for (auto t : tree.bottom_up_) {
        if (t != root) {
            const auto p = static_cast<std::size_t>(parent[t]);
            tree.volume_[p] += tree.volume_[t];
            internal_edges[p] += internal_edges[t];
        }
    }
    for (auto t : tree.bottom_up_) {
        if (t != root && tree.volume_[t] == 0)
            throw InvalidArgument("encoding tree: internal node without graph descendants");
        tree.cut_[t] = tree.volume_[t] - 2 * internal_edges[t];
    }
    tree.parent_ = std::move(parent);
    return tree;
}

namespace {

std::vector<std::int64_t> empty_parents(const CitationGraph& g, std::size_t internal) {
    return std::vector<std::int64_t>(g.node_count() + 1 + internal, EncodingTree::absent);
}

}  // namespace

EncodingTree build_encoding_tree(const CitationGraph& g, const Partition& communities) {
    if (communities.node_count() != g.node_count()) throw InvalidArgument("partition does not cover the graph");
    const std::size_t n = g.node_count();
    // One internal node per community holding at least one non-isolated paper.
    std::vector<std::int64_t> slot(communities.community_count(), EncodingTree::absent);
    std::size_t internal = 0;
    for (NodeIndex v = 0; v < n; ++v)
        if (g.degree(v) > 0 && slot[communities[v]] == EncodingTree::absent)
            slot[communities[v]] = static_cast<std::int64_t>(n + 1 + internal++);
    auto parent = empty_parents(g, internal);
    for (std::size_t i = 0; i < internal; ++i) parent[n + 1 + i] = EncodingTree::root;
    for (NodeIndex v = 0; v < n; ++v)
        if (g.degree(v) > 0) parent[v + 1] = slot[communities[v]];
    return EncodingTree::from_parents(g, std::move(parent), TreeStrategy::community_two_level);
}

EncodingTree build_encoding_tree(const CitationGraph& g, TreeStrategy strategy, std::uint64_t seed) {
    const std::size_t n = g.node_count();
    switch (strategy) {
        case TreeStrategy::flat: {
            auto parent = empty_parents(g, 0);
            for (NodeIndex v = 0; v < n; ++v)
                if (g.degree(v) > 0) parent[v + 1] = EncodingTree::root;
            return EncodingTree::from_parents(g, std::move(parent), TreeStrategy::flat);
        }
        case TreeStrategy::citation_primary_parent: {
            auto precedes = [&](NodeIndex a, NodeIndex b) {
                const auto& ra = g.record(a);
                const auto& rb = g.record(b);
                if (ra.date != rb.date) return ra.date < rb.date;
                return ra.paper_id < rb.paper_id;
            };
            auto parent = empty_parents(g, 0);
            for (NodeIndex v = 0; v < n; ++v) {
                if (g.degree(v) == 0) continue;
                std::int64_t best = -1;
                for (NodeIndex c : g.cited_by(v)) {
                    if (!precedes(c, v)) continue;
                    if (best < 0) {
                        best = c;
                        continue;
                    }
                    const auto b = static_cast<NodeIndex>(best);
                    if (g.degree(c) != g.degree(b) ? g.degree(c) > g.degree(b) : precedes(c, b)) best = c;
                }
                parent[v + 1] = best < 0 ? EncodingTree::root : best + 1;
            }
            return EncodingTree::from_parents(g, std::move(parent), TreeStrategy::citation_primary_parent);
        }
        case TreeStrategy::community_two_level:
            return build_encoding_tree(g, label_propagation(g, {.seed = seed, .max_rounds = 100}));
        case TreeStrategy::custom:
            break;
    }
    throw InvalidArgument("build_encoding_tree: strategy 'custom' needs explicit parents");
}

double shannon_entropy_h1(const CitationGraph& g) {
    const double vol = static_cast<double>(g.volume());
    if (vol == 0.0) throw InvalidArgument("Shannon entropy undefined for a graph without edges");
    double h = 0.0;
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
        const double d = g.degree(v);
        if (d > 0) h -= (d / vol) * std::log2(d / vol);
    }
    return h;
}

namespace {

void check_tree(const CitationGraph& g, const EncodingTree& tree) {
    if (tree.graph_node_count() != g.node_count() || tree.volume(EncodingTree::root) != g.volume() ||
        tree.cut(EncodingTree::root) != 0)
        throw InvalidArgument("encoding tree does not belong to this graph");
}

// Structural-entropy term of one non-root tree node.
double node_term(const EncodingTree& tree, std::size_t t, double vol) {
    const auto cut = tree.cut(t);
    if (cut == 0) return 0.0;
    const double v = static_cast<double>(tree.volume(t));
    const double pv = static_cast<double>(tree.volume(static_cast<std::size_t>(tree.parent(t))));
    return -(static_cast<double>(cut) / vol) * std::log2(v / pv);
}

}  // namespace

double structural_entropy(const CitationGraph& g, const EncodingTree& tree) {
    check_tree(g, tree);
    const double vol = static_cast<double>(g.volume());
    if (vol == 0.0) throw InvalidArgument("structural entropy undefined for a graph without edges");
    double h = 0.0;
    for (std::size_t t = 1; t < tree.size(); ++t)
        if (tree.present(t)) h += node_term(tree, t, vol);
    return h;
}

EntropyReport kqi_total(const CitationGraph& g, const EncodingTree& tree) {
    EntropyReport r;
    r.h1 = shannon_entropy_h1(g);
    r.ht = structural_entropy(g, tree);
    r.k = r.h1 - r.ht;
    r.vol = g.volume();
    r.strategy = tree.strategy();
    return r;
}

KqiScores kqi_per_node(const CitationGraph& g, const EncodingTree& tree) {
    check_tree(g, tree);
    const std::size_t n = g.node_count();
    const double vol = static_cast<double>(g.volume());
    if (vol == 0.0) throw InvalidArgument("KQI undefined for a graph without edges");

    // share[t]: sum over internal ancestors a of t (t inclusive) of term(a) / volume(a).
    std::vector<double> share(tree.size(), 0.0);
    const auto order = tree.bottom_up();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto t = *it;
        if (t == EncodingTree::root) continue;
        const double inherited = share[static_cast<std::size_t>(tree.parent(t))];
        share[t] = tree.graph_node(t) ? inherited
                                      : inherited + node_term(tree, t, vol) / static_cast<double>(tree.volume(t));
    }

    KqiScores s;
    s.per_node.assign(n, 0.0);
    for (NodeIndex v = 0; v < n; ++v) {
        const double d = g.degree(v);
        if (d == 0) continue;
        const auto t = EncodingTree::tree_node(v);
        const double h1 = -(d / vol) * std::log2(d / vol);
        const double ht = node_term(tree, t, vol) + d * share[static_cast<std::size_t>(tree.parent(t))];
        s.per_node[v] = h1 - ht;
    }
    for (double x : s.per_node) s.total += x;
    return s;
}

std::string_view to_string(GroupBy g) {
    switch (g) {
        case GroupBy::first_author: return "first_author";
        case GroupBy::affiliation: return "affiliation";
        case GroupBy::country: return "country";
    }
    return "first_author";
}

GroupBy parse_group_by(std::string_view name) {
    if (name == "first_author" || name == "author") return GroupBy::first_author;
    if (name == "affiliation") return GroupBy::affiliation;
    if (name == "country") return GroupBy::country;
    throw InvalidArgument("unknown grouping '" + std::string(name) + "'");
}

Ranking aggregate_scores(const KqiScores& scores, const CitationGraph& g, GroupBy group_by, std::size_t top_k) {
    if (scores.per_node.size() != g.node_count()) throw InvalidArgument("scores do not belong to this graph");
    std::map<std::string, double> totals;
    Ranking r;
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
        const auto& rec = g.record(v);
        const std::string* key = nullptr;
        switch (group_by) {
            case GroupBy::first_author:
                if (!rec.author_ids.empty()) key = &rec.author_ids.front();
                break;
            case GroupBy::affiliation:
                if (!rec.affiliation_id.empty()) key = &rec.affiliation_id;
                break;
            case GroupBy::country:
                if (!rec.country.empty()) key = &rec.country;
                break;
        }
        if (!key) {
            ++r.skipped_papers;
            r.skipped_kqi += scores.per_node[v];
            continue;
        }
        totals[*key] += scores.per_node[v];
    }
    r.entries.reserve(totals.size());
    for (auto& [id, total] : totals) r.entries.push_back({id, total});
    std::stable_sort(r.entries.begin(), r.entries.end(),
                     [](const RankedEntity& a, const RankedEntity& b) { return a.kqi > b.kqi; });
    if (top_k && r.entries.size() > top_k) r.entries.resize(top_k);
    return r;
}

void export_scores(const CitationGraph& g, const KqiScores& scores, std::ostream& out) {
    std::vector<NodeIndex> order(g.node_count());
    for (NodeIndex v = 0; v < order.size(); ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) {
        if (scores.per_node[a] != scores.per_node[b]) return scores.per_node[a] > scores.per_node[b];
        return g.record(a).paper_id < g.record(b).paper_id;
    });
    out << "paper_id\tkqi_bits\n";
    for (auto v : order) out << g.record(v).paper_id << '\t' << format_double(scores.per_node[v]) << '\n';
}

void export_ranking(const Ranking& ranking, std::ostream& out) {
    out << "rank\tentity_id\tkqi_bits\n";
    for (std::size_t i = 0; i < ranking.entries.size(); ++i)
        out << i + 1 << '\t' << ranking.entries[i].entity_id << '\t' << format_double(ranking.entries[i].kqi) << '\n';
}

std::string entropy_report_json(const EntropyReport& report) {
    nlohmann::ordered_json j;
    j["h1"] = report.h1;
    j["ht"] = report.ht;
    j["k"] = report.k;
    j["vol"] = report.vol;
    j["strategy"] = std::string(to_string(report.strategy));
    return j.dump(2);
}

}  // namespace citemap
