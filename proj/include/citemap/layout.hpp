#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citemap/community.hpp"
#include "citemap/graph.hpp"

namespace citemap {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    Vec2& operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    Vec2& operator-=(Vec2 o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    double norm() const;
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

enum class SegmentationMode { community, attribute };

struct LayoutConfig {
    std::uint64_t seed = 42;
    int iterations_block = 300;
    int iterations_sub = 200;
    int iterations_finetune = 25;
    double attraction_scale = 1.0;
    double repulsion_scale = 1.0;
    double gravity = 1.0;
    double theta = 0.8;                  // Barnes-Hut opening angle, (0, 1]
    double convergence_epsilon = 1e-4;   // mean displacement per iteration, layout units
    SegmentationMode segmentation = SegmentationMode::community;
    std::string attribute_key = "venue_id";
    bool finetune_enabled = true;
    double block_radius_scale = 1.0;     // block radius = scale * sqrt(member_count)
    double subgraph_fill = 0.9;          // sub-layouts are scaled to this fraction of the radius
    double coordinate_quantum = 0x1.0p-20;

    /// Throws InvalidArgument when a constant is out of range.
    void validate() const;
};

enum class LayoutStage { initial, block, stitched, final };
std::string_view to_string(LayoutStage s);

/// Coordinates indexed by node.
struct PositionMap {
    std::vector<Vec2> coords;
    LayoutStage provenance = LayoutStage::initial;
};

struct Block {
    std::uint32_t id = 0;
    std::size_t member_count = 0;
    std::size_t internal_edge_count = 0;
    double radius = 0.0;
};

struct BlockGraph {
    std::vector<Block> blocks;               // indexed by community id
    std::vector<WeightedEdge> block_edges;   // u < v, weight = inter-block edge count
    std::vector<Vec2> centers;               // filled by layout_blocks
};

/// Community mode runs label propagation; attribute mode groups papers by the
/// metadata value named in config.attribute_key ("venue_id", "affiliation_id",
/// "country", "first_author", "year"), with missing values in one extra block.
/// Throws InvalidArgument for an unknown key.
Partition segment_graph(const CitationGraph& g, const LayoutConfig& config);
Partition segment_graph(const UndirectedGraph& g, const LayoutConfig& config);

BlockGraph build_block_graph(const UndirectedGraph& g, const Partition& p, double radius_scale = 1.0);

/// Linear attraction along edges, repulsion repulsion_scale * m_u * m_v / d with
/// Barnes-Hut approximation, constant-magnitude gravity toward the origin, and a
/// global step adapted from the force energy. Node mass is weighted degree + 1.
/// Without `initial`, starts from seeded random positions.
PositionMap force_layout(const UndirectedGraph& g, const LayoutConfig& config,
                         const PositionMap* initial, int iterations);

/// Places block centers with mass sqrt(member_count), a hard-core term while two
/// disks overlap, and a final separation sweep after which no disks overlap.
BlockGraph layout_blocks(BlockGraph blocks, const LayoutConfig& config);

/// Lays out each block's induced subgraph centered on its centroid and scaled so
/// the farthest node sits at subgraph_fill * radius. Keyed by block id.
std::map<std::uint32_t, PositionMap> layout_subgraphs(const UndirectedGraph& g, const Partition& p,
                                                      const BlockGraph& blocks, const LayoutConfig& config);

/// Translates every block-local layout by its block center. Throws InvalidArgument
/// when a block lacks a center or a sub-layout.
PositionMap stitch(const BlockGraph& blocks, const Partition& p,
                   const std::map<std::uint32_t, PositionMap>& sub_layouts);

/// Warm-started force_layout for iterations_finetune steps; identity when disabled.
PositionMap fine_tune(const UndirectedGraph& g, const PositionMap& positions, const LayoutConfig& config);

struct StageTimings {
    double segment_s = 0, block_graph_s = 0, layout_blocks_s = 0, layout_subgraphs_s = 0, stitch_s = 0,
           fine_tune_s = 0, total_s = 0;
};

struct VsanResult {
    PositionMap positions;
    Partition partition;
    BlockGraph blocks;
    PositionMap stitched;
    StageTimings timings;
};

VsanResult vsan_pipeline(const CitationGraph& g, const LayoutConfig& config);
/// Community segmentation only.
VsanResult vsan_pipeline(const UndirectedGraph& g, const LayoutConfig& config);
VsanResult vsan_pipeline(const UndirectedGraph& g, const Partition& segmentation, const LayoutConfig& config);

struct LayoutQuality {
    double normalized_stress = 0.0;
    double neighborhood_preservation = 0.0;  // at k = 10
    double silhouette = 0.0;                 // 0 without a partition of >= 2 communities
};

struct QualityOptions {
    std::size_t stress_sources = 64;
    std::size_t neighborhood_samples = 256;
    std::size_t silhouette_samples = 2000;
    std::uint64_t seed = 7;
};

/// Stress uses BFS distances from sampled sources, weights 1/d^2 and the optimal
/// global scale, so it lies in [0, 1]. Neighborhood preservation compares the 10
/// nearest nodes in BFS order with the 10 nearest in the plane.
LayoutQuality layout_quality(const UndirectedGraph& g, const PositionMap& positions, const Partition* partition,
                             const QualityOptions& options = {});

double normalized_stress(const UndirectedGraph& g, const PositionMap& positions, const QualityOptions& options = {});
double silhouette(const PositionMap& positions, const Partition& partition, const QualityOptions& options = {});

/// Smallest gap between two block disks (+inf with fewer than two blocks).
double min_block_gap(const BlockGraph& blocks);

/// JSON lines {"node_id","x","y","block_id"}.
void export_positions_jsonl(const CitationGraph& g, const PositionMap& positions, const Partition& blocks,
                            std::ostream& out);
struct SvgOptions {
    double width = 1200;
    bool draw_edges = true;
    std::size_t edge_cutoff = 1'000'000;  // edges are skipped above this count
};
std::string layout_svg(const UndirectedGraph& g, const PositionMap& positions, const Partition& blocks,
                       const SvgOptions& options = {});
std::string stage_timings_json(const StageTimings& t);

}  // namespace citemap
