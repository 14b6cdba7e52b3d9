#pragma once

// Shared force-directed kernel behind force_layout, layout_blocks and fine_tune.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "citemap/graph.hpp"
#include "citemap/layout.hpp"

namespace citemap::detail {

/// Barnes-Hut quadtree over weighted points.
class QuadTree {
public:
    void build(std::span<const Vec2> pos, std::span<const double> mass);

    /// Sum of kr * m_i * m_j * (p_i - p_j) / |p_i - p_j|^2 over all j != i.
    Vec2 repulsion(std::size_t i, std::span<const Vec2> pos, std::span<const double> mass, double kr, double theta,
                   std::uint64_t seed) const;

private:
    struct Cell {
        double cx = 0.0, cy = 0.0, half = 0.0;
        double mass = 0.0;
        Vec2 com;
        std::int32_t child[4] = {-1, -1, -1, -1};
        std::uint32_t begin = 0, end = 0;  // range in order_ for leaves
        bool leaf = true;
    };

    std::int32_t build_cell(std::uint32_t begin, std::uint32_t end, double cx, double cy, double half, int depth,
                            std::span<const Vec2> pos, std::span<const double> mass);

    std::vector<Cell> cells_;
    std::vector<std::uint32_t> order_;
};

/// Direction for two coincident points, antisymmetric in (i, j), seeded.
Vec2 jitter_direction(std::size_t i, std::size_t j, std::uint64_t seed);

struct ForceSystem {
    const UndirectedGraph* graph = nullptr;  // attraction edges; may be null
    std::vector<double> mass;
    std::vector<double> radius;              // non-empty enables the hard-core term
    double hard_core = 0.0;
};

struct KernelParams {
    double attraction = 1.0;
    double repulsion = 1.0;
    double gravity = 1.0;
    double theta = 0.8;
    double epsilon = 1e-4;
    std::uint64_t seed = 0;
    int iterations = 0;
    double initial_step = 1.0;
};

/// Moves `pos` in place; returns the number of iterations performed.
int run_force_kernel(const ForceSystem& system, std::vector<Vec2>& pos, const KernelParams& params);

/// Deterministic uniform random positions in a square of half-width `spread`.
std::vector<Vec2> random_positions(std::size_t n, double spread, std::uint64_t seed);

/// Rounds toward zero onto the grid of spacing `quantum`.
inline double snap(double v, double quantum) { return std::trunc(v / quantum) * quantum; }

/// Overlapping disk pairs (i < j, gap < 0), found with a sweep along x.
std::vector<std::pair<std::size_t, std::size_t>> overlapping_pairs(std::span<const Vec2> centers,
                                                                   std::span<const double> radii);

}  // namespace citemap::detail
