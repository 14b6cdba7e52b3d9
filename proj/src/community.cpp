#include "citemap/community.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "citemap/csv.hpp"

namespace citemap {

Partition Partition::from_labels(std::span<const std::uint32_t> labels) {
    Partition p;
    p.assignment_.resize(labels.size());
    std::unordered_map<std::uint32_t, std::uint32_t> dense;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto [it, inserted] = dense.emplace(labels[i], static_cast<std::uint32_t>(dense.size()));
        p.assignment_[i] = it->second;
    }
    p.count_ = dense.size();
    return p;
}

Partition Partition::from_dense(std::vector<std::uint32_t> labels) {
    Partition p;
    std::uint32_t top = 0;
    for (auto l : labels) top = std::max(top, l + 1);
    std::vector<char> used(top, 0);
    for (auto l : labels) used[l] = 1;
    if (std::find(used.begin(), used.end(), 0) != used.end()) throw InvalidArgument("community labels are not dense");
    p.assignment_ = std::move(labels);
    p.count_ = top;
    return p;
}

std::vector<std::vector<NodeIndex>> Partition::members() const {
    std::vector<std::vector<NodeIndex>> out(count_);
    for (NodeIndex v = 0; v < assignment_.size(); ++v) out[assignment_[v]].push_back(v);
    return out;
}

std::vector<std::size_t> Partition::sizes() const {
    std::vector<std::size_t> out(count_, 0);
    for (auto c : assignment_) ++out[c];
    return out;
}

namespace {

Partition propagate(const UndirectedGraph& g, const LabelPropagationOptions& options) {
    const std::size_t n = g.node_count();
    std::vector<std::uint32_t> label(n);
    std::iota(label.begin(), label.end(), 0u);
    const double two_m = 2.0 * g.total_weight();
    if (two_m <= 0.0) return Partition::from_labels(label);

    std::vector<double> label_strength(n);
    for (NodeIndex v = 0; v < n; ++v) label_strength[v] = g.strength(v);

    std::vector<NodeIndex> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::vector<double> link(n, 0.0);
    std::vector<std::uint32_t> touched;
    Rng rng(options.seed);

    for (int round = 0; round < options.max_rounds; ++round) {
        rng.shuffle(order);
        bool changed = false;
        for (const NodeIndex v : order) {
            const auto nb = g.neighbors(v);
            if (nb.empty()) continue;
            const auto w = g.weights(v);
            touched.clear();
            for (std::size_t k = 0; k < nb.size(); ++k) {
                const auto c = label[nb[k]];
                if (link[c] == 0.0) touched.push_back(c);
                link[c] += w[k];
            }
            const auto own = label[v];
            const double sv = g.strength(v);
            const double stay = link[own] - sv * (label_strength[own] - sv) / two_m;
            double best = stay;
            std::uint32_t best_label = own;
            std::sort(touched.begin(), touched.end());
            for (const auto c : touched) {
                if (c == own) continue;
                const double score = link[c] - sv * label_strength[c] / two_m;
                if (best_label == own ? score - stay > 1e-12 * (1.0 + std::abs(stay)) : score > best) {
                    best = score;
                    best_label = c;
                }
            }
            for (const auto c : touched) link[c] = 0.0;
            if (best_label != own) {
                label_strength[own] -= sv;
                label_strength[best_label] += sv;
                label[v] = best_label;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return Partition::from_labels(label);
}

}  // namespace

UndirectedGraph contract(const UndirectedGraph& g, const Partition& p) {
    if (p.node_count() != g.node_count()) throw InvalidArgument("partition does not cover the graph");
    std::vector<WeightedEdge> edges;
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
        if (g.self_weight(v) > 0) edges.push_back({p[v], p[v], g.self_weight(v)});
        const auto nb = g.neighbors(v);
        const auto w = g.weights(v);
        for (std::size_t k = 0; k < nb.size(); ++k)
            if (nb[k] > v) edges.push_back({p[v], p[nb[k]], w[k]});
    }
    return UndirectedGraph::from_edges(p.community_count(), edges);
}

Partition label_propagation(const UndirectedGraph& g, const LabelPropagationOptions& options) {
    if (options.max_rounds < 1) throw InvalidArgument("max_rounds must be >= 1");
    Partition p = propagate(g, options);
    if (!options.coarsen) return p;
    UndirectedGraph level = contract(g, p);
    std::vector<std::uint32_t> labels(p.assignment().begin(), p.assignment().end());
    for (std::uint64_t pass = 1;; ++pass) {
        const Partition merged = propagate(level, {.seed = mix_seed(options.seed, pass), .max_rounds = options.max_rounds});
        if (merged.community_count() == level.node_count()) break;
        for (auto& l : labels) l = merged[l];
        level = contract(level, merged);
    }
    return Partition::from_labels(labels);
}

Partition label_propagation(const CitationGraph& g, const LabelPropagationOptions& options) {
    return label_propagation(UndirectedGraph::from_citations(g), options);
}

double modularity(const UndirectedGraph& g, const Partition& p) {
    if (p.node_count() != g.node_count()) throw InvalidArgument("partition does not cover the graph");
    const double m = g.total_weight();
    if (m <= 0.0) return 0.0;
    std::vector<double> internal(p.community_count(), 0.0), total(p.community_count(), 0.0);
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
        const auto c = p[v];
        total[c] += g.strength(v);
        internal[c] += g.self_weight(v);
        const auto nb = g.neighbors(v);
        const auto w = g.weights(v);
        for (std::size_t k = 0; k < nb.size(); ++k)
            if (nb[k] > v && p[nb[k]] == c) internal[c] += w[k];
    }
    double q = 0.0;
    for (std::size_t c = 0; c < internal.size(); ++c) {
        const double frac = total[c] / (2.0 * m);
        q += internal[c] / m - frac * frac;
    }
    return q;
}

double modularity(const CitationGraph& g, const Partition& p) {
    return modularity(UndirectedGraph::from_citations(g), p);
}

double nmi(const Partition& p, const Partition& q) {
    if (p.node_count() != q.node_count()) throw InvalidArgument("nmi: partitions cover different node sets");
    const std::size_t n = p.node_count();
    if (n == 0) return 1.0;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> joint;
    for (NodeIndex v = 0; v < n; ++v) ++joint[{p[v], q[v]}];
    const auto ps = p.sizes();
    const auto qs = q.sizes();
    const double nn = static_cast<double>(n);
    auto entropy = [&](const std::vector<std::size_t>& sizes) {
        double h = 0.0;
        for (auto s : sizes)
            if (s) h -= (s / nn) * std::log2(s / nn);
        return h;
    };
    const double hp = entropy(ps);
    const double hq = entropy(qs);
    if (hp + hq == 0.0) return 1.0;  // both trivial, hence identical
    double mi = 0.0;
    for (const auto& [key, count] : joint) {
        const double pxy = count / nn;
        mi += pxy * std::log2(pxy * nn * nn / (static_cast<double>(ps[key.first]) * qs[key.second]));
    }
    return std::clamp(2.0 * mi / (hp + hq), 0.0, 1.0);
}

void export_partition(const CitationGraph& g, const Partition& p, std::ostream& out) {
    if (p.node_count() != g.node_count()) throw InvalidArgument("partition does not cover the graph");
    out << "node_id,community\n";
    for (NodeIndex v = 0; v < g.node_count(); ++v) out << csv::escape(g.record(v).paper_id) << ',' << p[v] << '\n';
}

Partition import_partition(const CitationGraph& g, std::istream& in) {
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() < 2 || fields[0] != "node_id" || fields[1] != "community")
        throw DataError("partition header must be 'node_id,community'", reader.line());
    constexpr auto unset = std::uint32_t(-1);
    std::vector<std::uint32_t> labels(g.node_count(), unset);
    while (reader.next(fields)) {
        if (fields.size() < 2) throw DataError("expected node_id,community", reader.line());
        const auto v = g.find(fields[0]);
        if (!v) throw DataError("unknown node '" + fields[0] + "'", reader.line());
        if (labels[*v] != unset) throw DataError("node '" + fields[0] + "' assigned twice", reader.line());
        try {
            std::size_t used = 0;
            const unsigned long c = std::stoul(fields[1], &used);
            if (used != fields[1].size() || c >= unset) throw std::invalid_argument("range");
            labels[*v] = static_cast<std::uint32_t>(c);
        } catch (const std::exception&) {
            throw DataError("invalid community '" + fields[1] + "'", reader.line());
        }
    }
    for (NodeIndex v = 0; v < labels.size(); ++v)
        if (labels[v] == unset) throw DataError("node '" + g.record(v).paper_id + "' has no community");
    return Partition::from_labels(labels);
}

}  // namespace citemap
