#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "citemap/layout.hpp"
#include "force_kernel.hpp"

namespace citemap {

using detail::snap;

double Vec2::norm() const { return std::hypot(x, y); }

void LayoutConfig::validate() const {
    if (iterations_block < 0 || iterations_sub < 0 || iterations_finetune < 0)
        throw InvalidArgument("layout iterations must be >= 0");
    if (!(attraction_scale > 0) || !(repulsion_scale > 0) || !(gravity > 0))
        throw InvalidArgument("layout force scales must be > 0");
    if (!(theta > 0) || theta > 1) throw InvalidArgument("theta must lie in (0, 1]");
    if (!(convergence_epsilon >= 0)) throw InvalidArgument("convergence_epsilon must be >= 0");
    if (!(block_radius_scale > 0)) throw InvalidArgument("block_radius_scale must be > 0");
    if (!(subgraph_fill > 0) || subgraph_fill > 1) throw InvalidArgument("subgraph_fill must lie in (0, 1]");
    if (!(coordinate_quantum > 0)) throw InvalidArgument("coordinate_quantum must be > 0");
}

std::string_view to_string(LayoutStage s) {
    switch (s) {
        case LayoutStage::initial: return "initial";
        case LayoutStage::block: return "block";
        case LayoutStage::stitched: return "stitched";
        case LayoutStage::final: return "final";
    }
    return "initial";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> node_masses(const UndirectedGraph& g) {
    std::vector<double> m(g.node_count());
    for (NodeIndex v = 0; v < m.size(); ++v) m[v] = g.strength(v) + 1.0;
    return m;
}

// Two isolated nodes of mean mass balance attraction and repulsion at this distance.
double natural_length(const std::vector<double>& mass, const LayoutConfig& c) {
    const double mean = mass.empty() ? 1.0 : std::accumulate(mass.begin(), mass.end(), 0.0) / mass.size();
    return mean * std::sqrt(c.repulsion_scale / c.attraction_scale);
}

double mean_edge_length(const UndirectedGraph& g, const std::vector<Vec2>& pos) {
    double sum = 0.0;
    std::size_t count = 0;
    for (NodeIndex v = 0; v < g.node_count(); ++v)
        for (NodeIndex u : g.neighbors(v))
            if (u > v) {
                sum += (pos[u] - pos[v]).norm();
                ++count;
            }
    return count ? sum / count : 0.0;
}

// Similarity scale s > 0 minimizing the layout energy
//   ka/2 s^2 sum(w d^2) - kr ln(s) sum_{i<j} m_i m_j + g s sum(m |p|).
double energy_optimal_scale(const UndirectedGraph& g, const std::vector<Vec2>& pos, const std::vector<double>& mass,
                            const LayoutConfig& c) {
    double a = 0.0;
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
        const auto nb = g.neighbors(v);
        const auto w = g.weights(v);
        for (std::size_t k = 0; k < nb.size(); ++k)
            if (nb[k] > v) {
                const Vec2 d = pos[nb[k]] - pos[v];
                a += w[k] * (d.x * d.x + d.y * d.y);
            }
    }
    double sum_m = 0.0, sum_m2 = 0.0, grav = 0.0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        sum_m += mass[i];
        sum_m2 += mass[i] * mass[i];
        grav += mass[i] * pos[i].norm();
    }
    const double qa = c.attraction_scale * a;
    const double qb = c.gravity * grav;
    const double qc = c.repulsion_scale * (sum_m * sum_m - sum_m2) / 2.0;
    if (qc <= 0.0) return 1.0;
    if (qa <= 0.0) return qb > 0.0 ? qc / qb : 1.0;
    return (-qb + std::sqrt(qb * qb + 4.0 * qa * qc)) / (2.0 * qa);
}

detail::KernelParams kernel_params(const LayoutConfig& c, std::uint64_t seed, int iterations, double step) {
    detail::KernelParams p;
    p.attraction = c.attraction_scale;
    p.repulsion = c.repulsion_scale;
    p.gravity = c.gravity;
    p.theta = c.theta;
    p.epsilon = c.convergence_epsilon;
    p.seed = seed;
    p.iterations = iterations;
    p.initial_step = step;
    return p;
}

std::string attribute_value(const PaperRecord& r, const std::string& key) {
    if (key == "venue_id" || key == "venue") return r.venue_id;
    if (key == "affiliation_id" || key == "affiliation") return r.affiliation_id;
    if (key == "country") return r.country;
    if (key == "first_author") return r.author_ids.empty() ? std::string{} : r.author_ids.front();
    if (key == "year") return r.date.known() ? std::to_string(r.date.year) : std::string{};
    throw InvalidArgument("unknown attribute key '" + key + "'");
}

}  // namespace

Partition segment_graph(const UndirectedGraph& g, const LayoutConfig& config) {
    if (config.segmentation != SegmentationMode::community)
        throw InvalidArgument("attribute segmentation needs paper metadata");
    return label_propagation(g, {.seed = mix_seed(config.seed, 1), .max_rounds = 100, .coarsen = true});
}

Partition segment_graph(const CitationGraph& g, const LayoutConfig& config) {
    if (config.segmentation == SegmentationMode::community)
        return segment_graph(UndirectedGraph::from_citations(g), config);
    if (g.node_count() == 0) {
        attribute_value(PaperRecord{}, config.attribute_key);  // still reject unknown keys
        return {};
    }
    std::vector<std::string> values(g.node_count());
    for (NodeIndex v = 0; v < g.node_count(); ++v) values[v] = attribute_value(g.record(v), config.attribute_key);
    // Blocks ordered by attribute value; papers missing it share one trailing block.
    std::map<std::string, std::uint32_t> ids;
    for (const auto& s : values)
        if (!s.empty()) ids.emplace(s, 0);
    std::uint32_t next = 0;
    for (auto& [value, id] : ids) id = next++;
    std::vector<std::uint32_t> labels(g.node_count());
    for (NodeIndex v = 0; v < g.node_count(); ++v) labels[v] = values[v].empty() ? next : ids[values[v]];
    return Partition::from_dense(std::move(labels));
}

BlockGraph build_block_graph(const UndirectedGraph& g, const Partition& p, double radius_scale) {
    if (p.node_count() != g.node_count()) throw InvalidArgument("partition does not cover the graph");
    BlockGraph bg;
    bg.blocks.resize(p.community_count());
    for (std::uint32_t b = 0; b < bg.blocks.size(); ++b) bg.blocks[b].id = b;
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> between;
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
        const auto bv = p[v];
        ++bg.blocks[bv].member_count;
        const auto nb = g.neighbors(v);
        for (NodeIndex u : nb) {
            if (u <= v) continue;
            const auto bu = p[u];
            if (bu == bv)
                ++bg.blocks[bv].internal_edge_count;
            else
                between[{std::min(bu, bv), std::max(bu, bv)}] += 1.0;
        }
    }
    for (auto& b : bg.blocks) b.radius = radius_scale * std::sqrt(static_cast<double>(b.member_count));
    for (const auto& [key, w] : between) bg.block_edges.push_back({key.first, key.second, w});
    return bg;
}

PositionMap force_layout(const UndirectedGraph& g, const LayoutConfig& config, const PositionMap* initial,
                         int iterations) {
    config.validate();
    if (iterations < 0) throw InvalidArgument("iterations must be >= 0");
    const std::size_t n = g.node_count();
    const auto mass = node_masses(g);
    const double length = natural_length(mass, config);
    PositionMap out;
    double step;
    if (initial) {
        if (initial->coords.size() != n) throw InvalidArgument("initial positions do not cover the graph");
        out.coords = initial->coords;
        const double edge = mean_edge_length(g, out.coords);
        step = 0.1 * (edge > 0 ? edge : length);
    } else {
        out.coords = detail::random_positions(n, 0.5 * length * std::sqrt(static_cast<double>(n)),
                                              mix_seed(config.seed, 2));
        step = length;
    }
    out.provenance = LayoutStage::final;
    if (iterations == 0 || n == 0) return out;
    detail::ForceSystem system;
    system.graph = &g;
    system.mass = mass;
    detail::run_force_kernel(system, out.coords, kernel_params(config, mix_seed(config.seed, 3), iterations, step));
    return out;
}

double min_block_gap(const BlockGraph& blocks) {
    double gap = std::numeric_limits<double>::infinity();
    const auto& c = blocks.centers;
    if (c.size() != blocks.blocks.size()) throw InvalidArgument("block graph has no centers");
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j)
            gap = std::min(gap, (c[i] - c[j]).norm() - (blocks.blocks[i].radius + blocks.blocks[j].radius));
    return gap;
}

BlockGraph layout_blocks(BlockGraph bg, const LayoutConfig& config) {
    config.validate();
    const std::size_t b = bg.blocks.size();
    bg.centers.assign(b, Vec2{});
    if (b == 0) return bg;
    for (const auto& blk : bg.blocks)
        if (!(blk.radius > 0)) throw InvalidArgument("block radii must be > 0");
    if (b == 1) return bg;

    // Work in units of the radius scale: a block's mass equals its scaled radius.
    const double unit = config.block_radius_scale;
    detail::ForceSystem system;
    system.mass.resize(b);
    system.radius.resize(b);
    double total_area = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        system.radius[i] = bg.blocks[i].radius / unit;
        system.mass[i] = system.radius[i];
        total_area += system.radius[i] * system.radius[i];
    }
    std::vector<WeightedEdge> links;
    for (const auto& e : bg.block_edges) {
        const double density = e.weight / std::sqrt(static_cast<double>(bg.blocks[e.u].member_count) *
                                                    static_cast<double>(bg.blocks[e.v].member_count));
        links.push_back({e.u, e.v, density});
    }
    const UndirectedGraph link_graph = UndirectedGraph::from_edges(b, links);
    system.graph = &link_graph;
    system.hard_core = 10.0 * std::max({config.attraction_scale, config.repulsion_scale, config.gravity});

    const double spread = std::sqrt(total_area) * 1.5;
    std::vector<Vec2> pos = detail::random_positions(b, spread, mix_seed(config.seed, 4));
    const double mean_radius = std::sqrt(total_area / static_cast<double>(b));
    detail::run_force_kernel(system, pos,
                             kernel_params(config, mix_seed(config.seed, 5), config.iterations_block, mean_radius));

    // Back to layout units on the coordinate grid, then separate any remaining overlaps.
    const double q = config.coordinate_quantum;
    std::vector<double> radii(b);
    for (std::size_t i = 0; i < b; ++i) {
        radii[i] = bg.blocks[i].radius;
        bg.centers[i] = {snap(pos[i].x * unit, q), snap(pos[i].y * unit, q)};
    }
    auto separate_pass = [&] {
        const auto pairs = detail::overlapping_pairs(bg.centers, radii);
        for (const auto& [i, j] : pairs) {
            Vec2 d = bg.centers[i] - bg.centers[j];
            double dist = d.norm();
            if (dist < q) {
                d = detail::jitter_direction(i, j, config.seed);
                dist = 1.0;
            }
            const double gap = (bg.centers[i] - bg.centers[j]).norm() - (radii[i] + radii[j]);
            if (gap >= 0.0) continue;
            const double push = (-gap + 1e-9 * (radii[i] + radii[j]) + 4.0 * q) / 2.0;
            bg.centers[i] += (push / dist) * d;
            bg.centers[j] -= (push / dist) * d;
            for (auto* c : {&bg.centers[i], &bg.centers[j]}) *c = {snap(c->x, q), snap(c->y, q)};
        }
        return !pairs.empty();
    };
    int passes = 0;
    while (separate_pass() && ++passes < 1000) {
    }
    while (!detail::overlapping_pairs(bg.centers, radii).empty())
        for (auto& c : bg.centers) c = {snap(c.x * 1.25, q), snap(c.y * 1.25, q)};
    return bg;
}

std::map<std::uint32_t, PositionMap> layout_subgraphs(const UndirectedGraph& g, const Partition& p,
                                                      const BlockGraph& blocks, const LayoutConfig& config) {
    config.validate();
    if (p.node_count() != g.node_count()) throw InvalidArgument("partition does not cover the graph");
    if (blocks.blocks.size() != p.community_count()) throw InvalidArgument("block graph does not match partition");
    const auto members = p.members();
    std::vector<PositionMap> result(members.size());
    parallel_for(members.size(), [&](std::size_t b) {
        const auto& nodes = members[b];
        PositionMap local;
        local.provenance = LayoutStage::block;
        if (nodes.size() == 1) {
            local.coords.assign(1, Vec2{});
            result[b] = std::move(local);
            return;
        }
        const UndirectedGraph sub = g.induced(nodes);
        LayoutConfig c = config;
        c.seed = mix_seed(config.seed, 1000 + b);
        local = force_layout(sub, c, nullptr, config.iterations_sub);
        local.provenance = LayoutStage::block;
        Vec2 centroid;
        for (const auto& v : local.coords) centroid += v;
        centroid = (1.0 / static_cast<double>(nodes.size())) * centroid;
        double reach = 0.0;
        for (auto& v : local.coords) {
            v -= centroid;
            reach = std::max(reach, v.norm());
        }
        const double target = config.subgraph_fill * blocks.blocks[b].radius;
        const double scale = reach > 0 ? target / reach : 0.0;
        const double q = config.coordinate_quantum;
        for (auto& v : local.coords) v = {snap(scale * v.x, q), snap(scale * v.y, q)};
        result[b] = std::move(local);
    });
    std::map<std::uint32_t, PositionMap> out;
    for (std::size_t b = 0; b < result.size(); ++b) out.emplace(static_cast<std::uint32_t>(b), std::move(result[b]));
    return out;
}

PositionMap stitch(const BlockGraph& blocks, const Partition& p,
                   const std::map<std::uint32_t, PositionMap>& sub_layouts) {
    if (blocks.centers.size() != blocks.blocks.size() || blocks.blocks.size() != p.community_count())
        throw InvalidArgument("stitch: every block needs a center");
    const auto members = p.members();
    PositionMap out;
    out.provenance = LayoutStage::stitched;
    out.coords.resize(p.node_count());
    for (std::uint32_t b = 0; b < members.size(); ++b) {
        const auto it = sub_layouts.find(b);
        if (it == sub_layouts.end()) throw InvalidArgument("stitch: missing layout for block " + std::to_string(b));
        if (it->second.coords.size() != members[b].size())
            throw InvalidArgument("stitch: layout size mismatch for block " + std::to_string(b));
        for (std::size_t k = 0; k < members[b].size(); ++k)
            out.coords[members[b][k]] = blocks.centers[b] + it->second.coords[k];
    }
    return out;
}

PositionMap fine_tune(const UndirectedGraph& g, const PositionMap& positions, const LayoutConfig& config) {
    config.validate();
    if (positions.coords.size() != g.node_count()) throw InvalidArgument("positions do not cover the graph");
    if (!config.finetune_enabled || config.iterations_finetune == 0 || g.node_count() == 0) {
        PositionMap same = positions;
        same.provenance = LayoutStage::final;
        return same;
    }
    // Rescale into the force model's own length scale before the short warm-started run.
    const auto mass = node_masses(g);
    const double s = energy_optimal_scale(g, positions.coords, mass, config);
    PositionMap start = positions;
    for (auto& v : start.coords) v = s * v;
    return force_layout(g, config, &start, config.iterations_finetune);
}

VsanResult vsan_pipeline(const UndirectedGraph& g, const Partition& segmentation, const LayoutConfig& config) {
    config.validate();
    VsanResult r;
    const auto t0 = Clock::now();
    r.partition = segmentation;
    auto t = Clock::now();
    r.blocks = build_block_graph(g, r.partition, config.block_radius_scale);
    r.timings.block_graph_s = seconds_since(t);
    t = Clock::now();
    r.blocks = layout_blocks(std::move(r.blocks), config);
    r.timings.layout_blocks_s = seconds_since(t);
    t = Clock::now();
    const auto subs = layout_subgraphs(g, r.partition, r.blocks, config);
    r.timings.layout_subgraphs_s = seconds_since(t);
    t = Clock::now();
    r.stitched = stitch(r.blocks, r.partition, subs);
    r.timings.stitch_s = seconds_since(t);
    t = Clock::now();
    r.positions = fine_tune(g, r.stitched, config);
    r.timings.fine_tune_s = seconds_since(t);
    r.timings.total_s = seconds_since(t0);
    return r;
}

VsanResult vsan_pipeline(const UndirectedGraph& g, const LayoutConfig& config) {
    const auto t = Clock::now();
    Partition p = segment_graph(g, config);
    const double seg = seconds_since(t);
    VsanResult r = vsan_pipeline(g, p, config);
    r.timings.segment_s = seg;
    r.timings.total_s += seg;
    return r;
}

VsanResult vsan_pipeline(const CitationGraph& g, const LayoutConfig& config) {
    const auto t = Clock::now();
    Partition p = segment_graph(g, config);
    const double seg = seconds_since(t);
    VsanResult r = vsan_pipeline(UndirectedGraph::from_citations(g), p, config);
    r.timings.segment_s = seg;
    r.timings.total_s += seg;
    return r;
}

}  // namespace citemap
