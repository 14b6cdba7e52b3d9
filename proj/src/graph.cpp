#include "citemap/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <numeric>

namespace citemap {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : days[m - 1];
}

int parse_fixed(std::string_view s, std::string_view whole) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw DataError("invalid date '" + std::string(whole) + "'");
    return v;
}

// Builds CSR adjacency from (source, target) pairs already sorted by source.
void build_csr(std::size_t n, const std::vector<std::pair<NodeIndex, NodeIndex>>& pairs,
               std::vector<std::uint32_t>& offsets, std::vector<NodeIndex>& targets) {
    offsets.assign(n + 1, 0);
    for (const auto& [s, t] : pairs) ++offsets[s + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    targets.resize(pairs.size());
    std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& [s, t] : pairs) targets[cursor[s]++] = t;
}

}  // namespace

Date Date::parse(std::string_view text) {
    Date d;
    if (text.empty()) return d;
    const bool shape_ok = (text.size() == 4 || text.size() == 7 || text.size() == 10) &&
                          (text.size() < 7 || text[4] == '-') && (text.size() < 10 || text[7] == '-');
    if (!shape_ok) throw DataError("invalid date '" + std::string(text) + "'");
    d.year = parse_fixed(text.substr(0, 4), text);
    if (d.year < 1000 || d.year > 3000)
        throw DataError("date year out of range [1000, 3000]: '" + std::string(text) + "'");
    if (text.size() >= 7) {
        d.month = parse_fixed(text.substr(5, 2), text);
        if (d.month < 1 || d.month > 12) throw DataError("invalid month in '" + std::string(text) + "'");
    }
    if (text.size() == 10) {
        d.day = parse_fixed(text.substr(8, 2), text);
        if (d.day < 1 || d.day > days_in_month(d.year, d.month))
            throw DataError("invalid day in '" + std::string(text) + "'");
    }
    return d;
}

std::string Date::to_string() const {
    if (!known()) return {};
    char buf[16];
    int len;
    if (day)
        len = std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    else if (month)
        len = std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    else
        len = std::snprintf(buf, sizeof buf, "%04d", year);
    return std::string(buf, static_cast<std::size_t>(len));
}

CitationGraph CitationGraph::build(std::vector<PaperRecord> records, std::vector<Citation> edges) {
    CitationGraph g;
    const std::size_t n = records.size();
    g.index_.reserve(n);
    for (NodeIndex i = 0; i < n; ++i) {
        const auto& r = records[i];
        if (r.paper_id.empty()) throw DataError("empty paper_id");
        if (!g.index_.emplace(r.paper_id, i).second) throw DataError("duplicate paper_id '" + r.paper_id + "'");
        std::vector<std::string_view> authors(r.author_ids.begin(), r.author_ids.end());
        std::sort(authors.begin(), authors.end());
        if (std::adjacent_find(authors.begin(), authors.end()) != authors.end())
            throw DataError("duplicate author id in paper '" + r.paper_id + "'");
    }
    std::sort(edges.begin(), edges.end());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        if (e.citing >= n || e.cited >= n) throw DataError("edge endpoint out of range");
        if (e.citing == e.cited) throw DataError("self-loop on '" + records[e.citing].paper_id + "'");
        if (i && edges[i - 1] == e) throw DataError("duplicate edge");
    }
    g.records_ = std::move(records);
    g.edges_ = std::move(edges);

    std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
    pairs.reserve(g.edges_.size());
    for (const auto& e : g.edges_) pairs.emplace_back(e.citing, e.cited);
    build_csr(n, pairs, g.out_offsets_, g.out_targets_);

    for (auto& p : pairs) std::swap(p.first, p.second);
    std::sort(pairs.begin(), pairs.end());
    build_csr(n, pairs, g.in_offsets_, g.in_targets_);

    pairs.reserve(2 * g.edges_.size());
    for (const auto& e : g.edges_) pairs.emplace_back(e.citing, e.cited);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    build_csr(n, pairs, g.und_offsets_, g.und_targets_);
    return g;
}

std::optional<NodeIndex> CitationGraph::find(std::string_view paper_id) const {
    const auto it = index_.find(std::string(paper_id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::span<const NodeIndex> CitationGraph::cited_by(NodeIndex v) const {
    return {out_targets_.data() + out_offsets_[v], out_targets_.data() + out_offsets_[v + 1]};
}

std::span<const NodeIndex> CitationGraph::citations_of(NodeIndex v) const {
    return {in_targets_.data() + in_offsets_[v], in_targets_.data() + in_offsets_[v + 1]};
}

std::span<const NodeIndex> CitationGraph::neighbors(NodeIndex v) const {
    return {und_targets_.data() + und_offsets_[v], und_targets_.data() + und_offsets_[v + 1]};
}

std::vector<std::pair<NodeIndex, NodeIndex>> CitationGraph::undirected_edges() const {
    std::vector<std::pair<NodeIndex, NodeIndex>> out;
    out.reserve(undirected_edge_count());
    for (NodeIndex u = 0; u < node_count(); ++u)
        for (NodeIndex v : neighbors(u))
            if (u < v) out.emplace_back(u, v);
    return out;
}

UndirectedGraph UndirectedGraph::from_edges(std::size_t n, std::span<const WeightedEdge> edges) {
    UndirectedGraph g;
    g.self_weight_.assign(n, 0.0);
    std::vector<WeightedEdge> half;
    half.reserve(2 * edges.size());
    for (const auto& e : edges) {
        if (e.u >= n || e.v >= n) throw InvalidArgument("edge endpoint out of range");
        if (e.u == e.v) {
            g.self_weight_[e.u] += e.weight;
        } else {
            half.push_back({e.u, e.v, e.weight});
            half.push_back({e.v, e.u, e.weight});
        }
    }
    std::sort(half.begin(), half.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    g.offsets_.assign(n + 1, 0);
    g.targets_.reserve(half.size());
    g.weights_.reserve(half.size());
    for (std::size_t i = 0; i < half.size();) {
        std::size_t j = i;
        double w = 0.0;
        while (j < half.size() && half[j].u == half[i].u && half[j].v == half[i].v) w += half[j++].weight;
        g.targets_.push_back(half[i].v);
        g.weights_.push_back(w);
        ++g.offsets_[half[i].u + 1];
        i = j;
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    g.strength_.assign(n, 0.0);
    double twice = 0.0;
    for (NodeIndex v = 0; v < n; ++v) {
        double s = 2.0 * g.self_weight_[v];
        for (double w : g.weights(v)) s += w;
        g.strength_[v] = s;
        twice += s;
    }
    g.total_weight_ = twice / 2.0;
    return g;
}

UndirectedGraph UndirectedGraph::from_citations(const CitationGraph& cg) {
    std::vector<WeightedEdge> edges;
    edges.reserve(cg.undirected_edge_count());
    for (const auto& [u, v] : cg.undirected_edges()) edges.push_back({u, v, 1.0});
    return from_edges(cg.node_count(), edges);
}

UndirectedGraph UndirectedGraph::induced(std::span<const NodeIndex> nodes) const {
    std::vector<std::int64_t> local(node_count(), -1);
    for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<std::int64_t>(i);
    std::vector<WeightedEdge> edges;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto nb = neighbors(nodes[i]);
        const auto w = weights(nodes[i]);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            const auto j = local[nb[k]];
            if (j > static_cast<std::int64_t>(i))
                edges.push_back({static_cast<NodeIndex>(i), static_cast<NodeIndex>(j), w[k]});
        }
    }
    return from_edges(nodes.size(), edges);
}

CitationGraph snapshot(const CitationGraph& g, int year) {
    std::vector<std::int64_t> remap(g.node_count(), -1);
    std::vector<PaperRecord> records;
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
        const auto& r = g.record(v);
        if (r.date.known() && r.date.year <= year) {
            remap[v] = static_cast<std::int64_t>(records.size());
            records.push_back(r);
        }
    }
    std::vector<Citation> edges;
    for (const auto& e : g.edges()) {
        if (remap[e.citing] >= 0 && remap[e.cited] >= 0)
            edges.push_back({static_cast<NodeIndex>(remap[e.citing]), static_cast<NodeIndex>(remap[e.cited])});
    }
    return CitationGraph::build(std::move(records), std::move(edges));
}

std::vector<Citation> temporal_violations(const CitationGraph& g) {
    std::vector<Citation> out;
    for (const auto& e : g.edges()) {
        const auto& a = g.record(e.citing).date;
        const auto& b = g.record(e.cited).date;
        if (a.known() && b.known() && a.year < b.year) out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [&](const Citation& x, const Citation& y) {
        const auto& xa = g.record(x.citing).paper_id;
        const auto& ya = g.record(y.citing).paper_id;
        if (xa != ya) return xa < ya;
        return g.record(x.cited).paper_id < g.record(y.cited).paper_id;
    });
    return out;
}

std::vector<YearCount> annual_counts(const CitationGraph& g) {
    std::map<int, std::size_t> by_year;
    for (const auto& r : g.records())
        if (r.date.known()) ++by_year[r.date.year];
    std::vector<YearCount> out;
    if (by_year.empty()) return out;
    const int lo = by_year.begin()->first;
    const int hi = by_year.rbegin()->first;
    out.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (int y = lo; y <= hi; ++y) {
        const auto it = by_year.find(y);
        out.push_back({y, it == by_year.end() ? 0 : it->second});
    }
    return out;
}

}  // namespace citemap
