#include <doctest.h>

#include <cmath>
#include <sstream>

#include "citemap/community.hpp"
#include "citemap/layout.hpp"
#include "citemap/synth.hpp"
#include "helpers.hpp"

using namespace citemap;

namespace {

UndirectedGraph ug(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<WeightedEdge> w;
    for (auto [a, b] : edges) w.push_back({static_cast<NodeIndex>(a), static_cast<NodeIndex>(b), 1.0});
    return UndirectedGraph::from_edges(n, w);
}

double dist(const PositionMap& p, NodeIndex a, NodeIndex b) { return (p.coords[a] - p.coords[b]).norm(); }

// Root of ka*d + g*m - kr*m^2/d for two nodes of mass m joined by one unit edge,
// each pulled toward the origin by constant gravity g*m. Found by bisection.
double two_node_equilibrium(double ka, double kr, double g, double m) {
    auto f = [&](double d) { return ka * d + g * m - kr * m * m / d; };
    double lo = 1e-9, hi = 1e6;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

LayoutConfig converged_config() {
    LayoutConfig c;
    c.convergence_epsilon = 1e-9;
    return c;
}

}  // namespace

TEST_CASE("layout config validation") {
    LayoutConfig c;
    CHECK_NOTHROW(c.validate());
    c.theta = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.repulsion_scale = -1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.iterations_sub = -1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("force layout: single node sits at the origin") {
    const auto p = force_layout(ug(1, {}), LayoutConfig{}, nullptr, 50);
    REQUIRE(p.coords.size() == 1);
    CHECK(p.coords[0].norm() <= 1e-9);
}

TEST_CASE("force layout: two nodes reach the analytic equilibrium") {
    const auto g = ug(2, {{0, 1}});
    struct Case {
        double ka, kr, gravity;
    };
    for (const auto& k : {Case{1, 1, 1}, Case{2, 0.5, 0.3}, Case{0.5, 3, 1}}) {
        auto c = converged_config();
        c.attraction_scale = k.ka;
        c.repulsion_scale = k.kr;
        c.gravity = k.gravity;
        const auto p = force_layout(g, c, nullptr, 2000);
        const double expect = two_node_equilibrium(k.ka, k.kr, k.gravity, 2.0);
        CHECK(std::abs(dist(p, 0, 1) - expect) <= 0.1 * expect);
    }
    // Default constants: d^2 + 2d - 4 = 0.
    CHECK(two_node_equilibrium(1, 1, 1, 2) == doctest::Approx(std::sqrt(5.0) - 1.0));
}

TEST_CASE("force layout: K4 is symmetric") {
    const auto g = ug(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto c = converged_config();
        c.seed = seed;
        const auto p = force_layout(g, c, nullptr, 3000);
        std::vector<double> d;
        for (NodeIndex a = 0; a < 4; ++a)
            for (NodeIndex b = a + 1; b < 4; ++b) d.push_back(dist(p, a, b));
        // Four points in the plane cannot be pairwise equidistant; the symmetric
        // equilibrium is a square: four equal sides, two equal diagonals.
        std::sort(d.begin(), d.end());
        const double side = d[0], diag = d[5];
        CHECK(diag / side == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
        for (int i = 0; i < 4; ++i) CHECK(std::abs(d[i] - side) <= 0.05 * side);
        CHECK(std::abs(d[4] - diag) <= 0.05 * diag);
    }
}

TEST_CASE("force layout: deterministic, zero iterations return the start") {
    const auto g = synth::planted_communities(500, 5, 6, 0.1, 3).graph;
    LayoutConfig c;
    const auto a = force_layout(g, c, nullptr, 40);
    const auto b = force_layout(g, c, nullptr, 40);
    CHECK(a.coords == b.coords);
    const auto start = force_layout(g, c, nullptr, 0);
    const auto again = force_layout(g, c, &start, 0);
    CHECK(again.coords == start.coords);
    for (const auto& p : a.coords) CHECK((std::isfinite(p.x) && std::isfinite(p.y)));
}

TEST_CASE("force layout: coincident points separate deterministically") {
    const auto g = ug(3, {{0, 1}, {1, 2}});
    PositionMap start;
    start.coords = {{0, 0}, {0, 0}, {0, 0}};
    const auto p = force_layout(g, LayoutConfig{}, &start, 100);
    CHECK(dist(p, 0, 1) > 1e-3);
    CHECK(dist(p, 0, 2) > 1e-3);
    CHECK(p.coords == force_layout(g, LayoutConfig{}, &start, 100).coords);
}

TEST_CASE("segmentation") {
    const auto cliques = synth::clique_chain(2, 4);
    LayoutConfig c;
    CHECK(segment_graph(cliques.graph, c).community_count() == 2);

    const auto g = testing_util::ingest_text("paper_id,venue_id,country\nA,V1,US\nB,V1,\nC,V2,DE\nD,,DE\n",
                                             "citing_id,cited_id\nB,A\n")
                       .graph;
    c.segmentation = SegmentationMode::attribute;
    c.attribute_key = "venue_id";
    const auto p = segment_graph(g, c);
    CHECK(p.community_count() == 3);  // V1, V2, unknown
    CHECK(p[0] == p[1]);
    CHECK(p[0] != p[2]);
    CHECK(p.sizes()[p[0]] == 2);
    CHECK(p.sizes()[p[3]] == 1);
    CHECK(p[3] != p[2]);
    c.attribute_key = "shoe_size";
    CHECK_THROWS_AS(segment_graph(g, c), InvalidArgument);
}

TEST_CASE("block graph") {
    const auto g = ug(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}});
    const auto p = Partition::from_labels(std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1});
    const auto b = build_block_graph(g, p);
    REQUIRE(b.blocks.size() == 2);
    CHECK(b.blocks[0].member_count == 3);
    CHECK(b.blocks[0].internal_edge_count == 3);
    CHECK(b.blocks[0].radius == doctest::Approx(std::sqrt(3.0)));
    REQUIRE(b.block_edges.size() == 1);
    CHECK(b.block_edges[0].weight == 1.0);

    const auto one = build_block_graph(g, Partition::from_labels(std::vector<std::uint32_t>(6, 0)));
    CHECK(one.blocks.size() == 1);
    CHECK(one.block_edges.empty());

    // Communities {0,1} {2,3} {4,5}: 2 edges between the first two, 4 between the first and last.
    // Weights are ignored: block edges count graph edges.
    const std::vector<WeightedEdge> w = {{0, 2, 1}, {1, 3, 1}, {0, 4, 1}, {0, 5, 1}, {1, 4, 1}, {1, 5, 2}};
    const auto h = UndirectedGraph::from_edges(6, w);
    const auto b3 = build_block_graph(h, Partition::from_labels(std::vector<std::uint32_t>{0, 0, 1, 1, 2, 2}));
    REQUIRE(b3.block_edges.size() == 2);
    CHECK(b3.block_edges[0].weight == 2.0);
    CHECK(b3.block_edges[1].weight == 4.0);
}

TEST_CASE("layout blocks: non-overlap") {
    LayoutConfig c;
    BlockGraph two;
    two.blocks = {{0, 1, 0, 1.0}, {1, 4, 0, 2.0}};
    two.block_edges = {{0, 1, 10.0}};
    const auto placed = layout_blocks(two, c);
    CHECK((placed.centers[0] - placed.centers[1]).norm() >= 3.0);
    CHECK(min_block_gap(placed) >= 0.0);

    BlockGraph single;
    single.blocks = {{0, 5, 0, std::sqrt(5.0)}};
    CHECK(layout_blocks(single, c).centers[0].norm() <= 1e-9);

    BlockGraph ten;
    for (std::uint32_t i = 0; i < 10; ++i) ten.blocks.push_back({i, 4, 0, 2.0});
    const auto spread = layout_blocks(ten, c);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(spread.centers[i].norm() <= 20 * 2.0);
        for (std::size_t j = i + 1; j < 10; ++j) CHECK((spread.centers[i] - spread.centers[j]).norm() >= 4.0);
    }

    // Random block graphs, strong pulls between blocks of very different size.
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        Rng rng(seed);
        BlockGraph b;
        const std::size_t k = 2 + rng.below(40);
        for (std::uint32_t i = 0; i < k; ++i) {
            const std::size_t members = 1 + rng.below(500);
            b.blocks.push_back({i, members, 0, std::sqrt(static_cast<double>(members))});
        }
        for (std::uint32_t i = 0; i < k; ++i)
            for (std::uint32_t j = i + 1; j < k; ++j)
                if (rng.uniform() < 0.3) b.block_edges.push_back({i, j, 1.0 + static_cast<double>(rng.below(200))});
        c.seed = seed;
        CHECK(min_block_gap(layout_blocks(b, c)) >= 0.0);
    }
}

TEST_CASE("subgraph layouts fit their disks") {
    const auto planted = synth::planted_communities(400, 6, 6, 0.05, 9);
    LayoutConfig c;
    const auto p = segment_graph(planted.graph, c);
    const auto blocks = layout_blocks(build_block_graph(planted.graph, p), c);
    const auto subs = layout_subgraphs(planted.graph, p, blocks, c);
    REQUIRE(subs.size() == blocks.blocks.size());
    for (const auto& [id, local] : subs) {
        double far = 0;
        for (const auto& q : local.coords) far = std::max(far, q.norm());
        CHECK(far <= 0.9 * blocks.blocks[id].radius * (1 + 1e-9));
    }

    // Singleton block at its local origin; a triangle block is equilateral.
    const auto tri = ug(4, {{0, 1}, {1, 2}, {0, 2}});
    const auto tp = Partition::from_labels(std::vector<std::uint32_t>{0, 0, 0, 1});
    const auto tb = layout_blocks(build_block_graph(tri, tp), converged_config());
    auto cc = converged_config();
    cc.iterations_sub = 2000;
    const auto ts = layout_subgraphs(tri, tp, tb, cc);
    CHECK(ts.at(1).coords[0].norm() == 0.0);
    const auto& t = ts.at(0).coords;
    const double a = (t[0] - t[1]).norm(), b = (t[1] - t[2]).norm(), d = (t[0] - t[2]).norm();
    CHECK(std::abs(a - b) <= 0.05 * a);
    CHECK(std::abs(a - d) <= 0.05 * a);
}

TEST_CASE("stitch is a pure translation") {
    BlockGraph b;
    b.blocks = {{0, 1, 0, 1.0}};
    b.centers = {{10, 0}};
    PositionMap local;
    local.coords = {{1, 1}};
    const auto p = Partition::from_labels(std::vector<std::uint32_t>{0});
    const auto s = stitch(b, p, {{0u, local}});
    CHECK(s.coords[0] == Vec2{11, 1});
    CHECK(s.provenance == LayoutStage::stitched);
    CHECK_THROWS_AS(stitch(b, p, {}), InvalidArgument);
    BlockGraph centerless = b;
    centerless.centers.clear();
    CHECK_THROWS_AS(stitch(centerless, p, {{0u, local}}), InvalidArgument);
}

TEST_CASE("pipeline: stitch preserves intra-block distances bit-exactly") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto planted = synth::planted_communities(1500, 8, 8, 0.1, seed);
        LayoutConfig c;
        c.seed = seed;
        const auto r = vsan_pipeline(planted.graph, c);
        const auto subs = layout_subgraphs(planted.graph, r.partition, r.blocks, c);
        const auto members = r.partition.members();
        for (const auto& [id, local] : subs) {
            const auto& m = members[id];
            for (std::size_t i = 0; i < m.size(); i += 7)
                for (std::size_t j = i + 1; j < m.size(); j += 5) {
                    const double before = (local.coords[i] - local.coords[j]).norm();
                    const double after = (r.stitched.coords[m[i]] - r.stitched.coords[m[j]]).norm();
                    REQUIRE(before == after);
                }
        }
        CHECK(min_block_gap(r.blocks) >= 0.0);
    }
}

TEST_CASE("fine-tune identity cases") {
    const auto g = synth::planted_communities(300, 3, 6, 0.1, 2).graph;
    LayoutConfig c;
    const auto r = vsan_pipeline(g, c);
    LayoutConfig off = c;
    off.finetune_enabled = false;
    CHECK(fine_tune(g, r.stitched, off).coords == r.stitched.coords);
    LayoutConfig zero = c;
    zero.iterations_finetune = 0;
    CHECK(fine_tune(g, r.stitched, zero).coords == r.stitched.coords);
}

TEST_CASE("two-clique benchmark") {
    const auto g = synth::clique_chain(2, 100).graph;
    LayoutConfig c;
    const auto r = vsan_pipeline(g, c);
    REQUIRE(r.partition.community_count() == 2);
    // Separated clusters.
    Vec2 centroid[2];
    double radius[2] = {0, 0};
    const auto members = r.partition.members();
    for (int k = 0; k < 2; ++k) {
        for (auto v : members[k]) centroid[k] += r.positions.coords[v];
        centroid[k] = (1.0 / static_cast<double>(members[k].size())) * centroid[k];
        for (auto v : members[k]) radius[k] = std::max(radius[k], (r.positions.coords[v] - centroid[k]).norm());
    }
    CHECK((centroid[0] - centroid[1]).norm() > radius[0] + radius[1]);
    // Determinism.
    CHECK(vsan_pipeline(g, c).positions.coords == r.positions.coords);
    // Silhouette beats random placement, which scores near zero.
    const double vsan_s = silhouette(r.positions, r.partition);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto random = force_layout(g, LayoutConfig{.seed = seed}, nullptr, 0);
        const double s = silhouette(random, r.partition);
        CHECK(std::abs(s) < 0.2);
        CHECK(vsan_s > s);
    }
}

// Known failure: warm-started force iterations spread each clique and push the two apart.
TEST_CASE("fine-tune stress on the two-clique benchmark") {
    const auto g = synth::clique_chain(2, 100).graph;
    const auto r = vsan_pipeline(g, LayoutConfig{});
    CHECK(normalized_stress(g, r.positions) <= 1.01 * normalized_stress(g, r.stitched));
}

TEST_CASE("pipeline output does not depend on thread count") {
    const auto g = synth::planted_communities(3000, 12, 8, 0.1, 5).graph;
    LayoutConfig c;
    setenv("CITEMAP_THREADS", "1", 1);
    const auto a = vsan_pipeline(g, c);
    setenv("CITEMAP_THREADS", "4", 1);
    const auto b = vsan_pipeline(g, c);
    unsetenv("CITEMAP_THREADS");
    CHECK(a.positions.coords == b.positions.coords);
}

TEST_CASE("layout quality") {
    const auto path = ug(3, {{0, 1}, {1, 2}});
    PositionMap exact;
    exact.coords = {{0, 0}, {1, 0}, {2, 0}};
    CHECK(normalized_stress(path, exact) == doctest::Approx(0.0).epsilon(1e-12));
    PositionMap scaled;
    scaled.coords = {{0, 0}, {5, 0}, {10, 0}};
    CHECK(normalized_stress(path, scaled) <= 1e-12);  // scale-invariant
    PositionMap bent;
    bent.coords = {{0, 0}, {1, 0}, {1, 1}};
    CHECK(normalized_stress(path, bent) > 0.0);
    const auto q = layout_quality(path, exact, nullptr);
    CHECK(q.neighborhood_preservation == doctest::Approx(1.0));
    CHECK(q.silhouette == 0.0);
    PositionMap short_map;
    CHECK_THROWS_AS(layout_quality(path, short_map, nullptr), InvalidArgument);
}

TEST_CASE("exports") {
    const auto g = testing_util::chain();
    LayoutConfig c;
    const auto r = vsan_pipeline(g, c);
    std::ostringstream out;
    export_positions_jsonl(g, r.positions, r.partition, out);
    const auto text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(text.rfind("{\"node_id\":\"A\",\"x\":", 0) == 0);
    const auto ug_chain = UndirectedGraph::from_citations(g);
    const auto svg = layout_svg(ug_chain, r.positions, r.partition);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(std::count(svg.begin(), svg.end(), '\n') > 3);
    SvgOptions no_edges;
    no_edges.edge_cutoff = 1;
    CHECK(layout_svg(ug_chain, r.positions, r.partition, no_edges).find("<line") == std::string::npos);
    CHECK(stage_timings_json(r.timings).find("\"total_s\"") != std::string::npos);
}
