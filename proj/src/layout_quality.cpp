#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "citemap/layout.hpp"
#include "citemap/svg.hpp"

namespace citemap {

namespace {

// Up to k distinct node indices from [0, n), seeded; all of them when n <= k.
std::vector<NodeIndex> sample_nodes(std::size_t n, std::size_t k, std::uint64_t seed) {
    std::vector<NodeIndex> all(n);
    std::iota(all.begin(), all.end(), 0u);
    if (n <= k) return all;
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
}

// Hop distances from `source` (-1 when unreachable) and the visiting order.
void bfs(const UndirectedGraph& g, NodeIndex source, std::vector<std::int32_t>& dist, std::vector<NodeIndex>& order) {
    dist.assign(g.node_count(), -1);
    order.clear();
    dist[source] = 0;
    order.push_back(source);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto v = order[i];
        for (NodeIndex u : g.neighbors(v))
            if (dist[u] < 0) {
                dist[u] = dist[v] + 1;
                order.push_back(u);
            }
    }
}

void check_cover(const UndirectedGraph& g, const PositionMap& positions) {
    if (positions.coords.size() != g.node_count()) throw InvalidArgument("positions do not cover the graph");
}

}  // namespace

double normalized_stress(const UndirectedGraph& g, const PositionMap& positions, const QualityOptions& options) {
    check_cover(g, positions);
    const auto sources = sample_nodes(g.node_count(), options.stress_sources, mix_seed(options.seed, 11));
    std::vector<std::int32_t> dist;
    std::vector<NodeIndex> order;
    double cross = 0.0, euclid = 0.0, pairs = 0.0;
    for (const auto s : sources) {
        bfs(g, s, dist, order);
        for (const auto t : order) {
            if (t == s) continue;
            const double d = dist[t];
            const double e = (positions.coords[s] - positions.coords[t]).norm();
            cross += e / d;
            euclid += (e / d) * (e / d);
            pairs += 1.0;
        }
    }
    if (pairs == 0.0) return 0.0;
    if (euclid == 0.0) return 1.0;
    return std::clamp(1.0 - cross * cross / (euclid * pairs), 0.0, 1.0);
}

double silhouette(const PositionMap& positions, const Partition& partition, const QualityOptions& options) {
    if (positions.coords.size() != partition.node_count())
        throw InvalidArgument("positions and partition differ in size");
    if (partition.community_count() < 2) return 0.0;
    const auto nodes = sample_nodes(partition.node_count(), options.silhouette_samples, mix_seed(options.seed, 12));
    const std::size_t k = partition.community_count();
    std::vector<double> sum(k);
    std::vector<std::size_t> count(k, 0);
    for (auto v : nodes) ++count[partition[v]];
    double total = 0.0;
    for (auto v : nodes) {
        const auto own = partition[v];
        if (count[own] < 2) continue;  // singleton cluster in the sample scores 0
        std::fill(sum.begin(), sum.end(), 0.0);
        for (auto u : nodes)
            if (u != v) sum[partition[u]] += (positions.coords[u] - positions.coords[v]).norm();
        const double a = sum[own] / static_cast<double>(count[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c)
            if (c != own && count[c] > 0) b = std::min(b, sum[c] / static_cast<double>(count[c]));
        if (!std::isfinite(b)) continue;
        const double denom = std::max(a, b);
        if (denom > 0) total += (b - a) / denom;
    }
    return nodes.empty() ? 0.0 : total / static_cast<double>(nodes.size());
}

LayoutQuality layout_quality(const UndirectedGraph& g, const PositionMap& positions, const Partition* partition,
                             const QualityOptions& options) {
    check_cover(g, positions);
    LayoutQuality q;
    q.normalized_stress = normalized_stress(g, positions, options);

    constexpr std::size_t k = 10;
    const auto samples = sample_nodes(g.node_count(), options.neighborhood_samples, mix_seed(options.seed, 13));
    std::vector<std::int32_t> dist;
    std::vector<NodeIndex> order;
    std::vector<std::pair<double, NodeIndex>> euclid;
    double total = 0.0;
    std::size_t scored = 0;
    for (const auto v : samples) {
        bfs(g, v, dist, order);
        const std::size_t kk = std::min(k, order.size() - 1);
        if (kk == 0) continue;
        std::vector<NodeIndex> graph_near(order.begin() + 1, order.begin() + 1 + static_cast<std::ptrdiff_t>(kk));
        euclid.clear();
        for (NodeIndex u = 0; u < g.node_count(); ++u)
            if (u != v) euclid.emplace_back((positions.coords[u] - positions.coords[v]).norm(), u);
        std::partial_sort(euclid.begin(), euclid.begin() + static_cast<std::ptrdiff_t>(kk), euclid.end());
        std::sort(graph_near.begin(), graph_near.end());
        std::size_t hits = 0;
        for (std::size_t i = 0; i < kk; ++i)
            hits += std::binary_search(graph_near.begin(), graph_near.end(), euclid[i].second);
        total += static_cast<double>(hits) / static_cast<double>(kk);
        ++scored;
    }
    q.neighborhood_preservation = scored ? total / static_cast<double>(scored) : 0.0;
    if (partition) q.silhouette = silhouette(positions, *partition, options);
    return q;
}

void export_positions_jsonl(const CitationGraph& g, const PositionMap& positions, const Partition& blocks,
                            std::ostream& out) {
    if (positions.coords.size() != g.node_count() || blocks.node_count() != g.node_count())
        throw InvalidArgument("positions do not cover the graph");
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
        nlohmann::ordered_json j;
        j["node_id"] = g.record(v).paper_id;
        j["x"] = positions.coords[v].x;
        j["y"] = positions.coords[v].y;
        j["block_id"] = blocks[v];
        out << j.dump() << '\n';
    }
}

std::string layout_svg(const UndirectedGraph& g, const PositionMap& positions, const Partition& blocks,
                       const SvgOptions& options) {
    check_cover(g, positions);
    const auto& c = positions.coords;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (!c.empty()) {
        x0 = x1 = c[0].x;
        y0 = y1 = c[0].y;
        for (const auto& p : c) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
    }
    const double span = std::max({x1 - x0, y1 - y0, 1e-9});
    const double margin = 20.0;
    const double size = options.width;
    const double scale = (size - 2 * margin) / span;
    auto px = [&](const Vec2& p) { return std::pair{margin + (p.x - x0) * scale, margin + (y1 - p.y) * scale}; };

    svg::Document doc(size, size);
    doc.rect(0, 0, size, size, "#ffffff");
    if (options.draw_edges && g.edge_count() <= options.edge_cutoff) {
        for (NodeIndex v = 0; v < g.node_count(); ++v)
            for (NodeIndex u : g.neighbors(v))
                if (u > v) {
                    const auto [ax, ay] = px(c[v]);
                    const auto [bx, by] = px(c[u]);
                    doc.line(ax, ay, bx, by, "#999999", 0.3, 0.4);
                }
    }
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
        const auto [x, y] = px(c[v]);
        const double r = 0.8 + std::log1p(g.strength(v));
        doc.circle(x, y, r, svg::palette(blocks.node_count() == g.node_count() ? blocks[v] : 0), 0.85);
    }
    return doc.str();
}

std::string stage_timings_json(const StageTimings& t) {
    nlohmann::ordered_json j;
    j["segment_s"] = t.segment_s;
    j["block_graph_s"] = t.block_graph_s;
    j["layout_blocks_s"] = t.layout_blocks_s;
    j["layout_subgraphs_s"] = t.layout_subgraphs_s;
    j["stitch_s"] = t.stitch_s;
    j["fine_tune_s"] = t.fine_tune_s;
    j["total_s"] = t.total_s;
    return j.dump(2);
}

}  // namespace citemap
