#include "force_kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace citemap::detail {

namespace {

constexpr int max_depth = 40;
constexpr double coincident_distance = 1e-6;

}  // namespace

Vec2 jitter_direction(std::size_t i, std::size_t j, std::uint64_t seed) {
    const auto lo = std::min(i, j), hi = std::max(i, j);
    const std::uint64_t h = mix_seed(seed ^ (static_cast<std::uint64_t>(lo) << 32), hi);
    const double angle = static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 * 3.14159265358979323846;
    const double sign = i < j ? 1.0 : -1.0;
    return {sign * std::cos(angle), sign * std::sin(angle)};
}

void QuadTree::build(std::span<const Vec2> pos, std::span<const double> mass) {
    cells_.clear();
    order_.resize(pos.size());
    for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
    if (pos.empty()) return;
    double x0 = pos[0].x, x1 = pos[0].x, y0 = pos[0].y, y1 = pos[0].y;
    for (const auto& p : pos) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    const double half = std::max({x1 - x0, y1 - y0, 1e-9}) * 0.5 * (1.0 + 1e-9);
    cells_.reserve(2 * pos.size());
    build_cell(0, static_cast<std::uint32_t>(pos.size()), (x0 + x1) * 0.5, (y0 + y1) * 0.5, half, 0, pos, mass);
}

std::int32_t QuadTree::build_cell(std::uint32_t begin, std::uint32_t end, double cx, double cy, double half, int depth,
                                  std::span<const Vec2> pos, std::span<const double> mass) {
    const auto index = static_cast<std::int32_t>(cells_.size());
    Cell cell;
    cell.cx = cx;
    cell.cy = cy;
    cell.half = half;
    cells_.push_back(cell);
    double m = 0.0, mx = 0.0, my = 0.0;
    for (std::uint32_t k = begin; k < end; ++k) {
        const auto i = order_[k];
        m += mass[i];
        mx += mass[i] * pos[i].x;
        my += mass[i] * pos[i].y;
    }
    cells_[index].mass = m;
    cells_[index].com = m > 0 ? Vec2{mx / m, my / m} : Vec2{cx, cy};
    cells_[index].begin = begin;
    cells_[index].end = end;
    if (end - begin <= 1 || depth >= max_depth) return index;

    cells_[index].leaf = false;
    auto first = order_.begin() + begin, last = order_.begin() + end;
    const auto mid_y = std::partition(first, last, [&](std::uint32_t i) { return pos[i].y < cy; });
    const auto q0 = std::partition(first, mid_y, [&](std::uint32_t i) { return pos[i].x < cx; });
    const auto q2 = std::partition(mid_y, last, [&](std::uint32_t i) { return pos[i].x < cx; });
    const std::uint32_t bounds[5] = {begin, static_cast<std::uint32_t>(q0 - order_.begin()),
                                     static_cast<std::uint32_t>(mid_y - order_.begin()),
                                     static_cast<std::uint32_t>(q2 - order_.begin()), end};
    const double h = half * 0.5;
    const double ox[4] = {cx - h, cx + h, cx - h, cx + h};
    const double oy[4] = {cy - h, cy - h, cy + h, cy + h};
    for (int q = 0; q < 4; ++q) {
        if (bounds[q] == bounds[q + 1]) continue;
        const auto c = build_cell(bounds[q], bounds[q + 1], ox[q], oy[q], h, depth + 1, pos, mass);
        cells_[index].child[q] = c;
    }
    return index;
}

Vec2 QuadTree::repulsion(std::size_t i, std::span<const Vec2> pos, std::span<const double> mass, double kr,
                         double theta, std::uint64_t seed) const {
    Vec2 f;
    if (cells_.empty()) return f;
    const Vec2 p = pos[i];
    const double mi = mass[i];
    std::array<std::int32_t, 4 * max_depth + 8> stack;
    std::size_t top = 0;
    stack[top++] = 0;
    while (top) {
        const Cell& c = cells_[static_cast<std::size_t>(stack[--top])];
        if (c.leaf) {
            for (auto k = c.begin; k < c.end; ++k) {
                const auto j = order_[k];
                if (j == i) continue;
                Vec2 d = p - pos[j];
                double d2 = d.x * d.x + d.y * d.y;
                if (d2 < coincident_distance * coincident_distance) {
                    d = coincident_distance * jitter_direction(i, j, seed);
                    d2 = coincident_distance * coincident_distance;
                }
                f += (kr * mi * mass[j] / d2) * d;
            }
            continue;
        }
        const Vec2 d = p - c.com;
        const double d2 = d.x * d.x + d.y * d.y;
        const bool inside = std::abs(p.x - c.cx) <= c.half && std::abs(p.y - c.cy) <= c.half;
        const double width = 2.0 * c.half;
        if (!inside && width * width < theta * theta * d2) {
            f += (kr * mi * c.mass / d2) * d;
            continue;
        }
        for (auto child : c.child)
            if (child >= 0) stack[top++] = child;
    }
    return f;
}

std::vector<Vec2> random_positions(std::size_t n, double spread, std::uint64_t seed) {
    std::vector<Vec2> pos(n);
    if (n == 1) return pos;  // a lone node rests at the origin
    Rng rng(seed);
    for (auto& p : pos) {
        p.x = rng.uniform(-spread, spread);
        p.y = rng.uniform(-spread, spread);
    }
    return pos;
}

std::vector<std::pair<std::size_t, std::size_t>> overlapping_pairs(std::span<const Vec2> centers,
                                                                   std::span<const double> radii) {
    std::vector<std::size_t> order(centers.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double la = centers[a].x - radii[a], lb = centers[b].x - radii[b];
        return la != lb ? la < lb : a < b;
    });
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t s = 0; s < order.size(); ++s) {
        const auto a = order[s];
        const double right = centers[a].x + radii[a];
        for (std::size_t t = s + 1; t < order.size(); ++t) {
            const auto b = order[t];
            if (centers[b].x - radii[b] > right) break;
            if ((centers[a] - centers[b]).norm() - (radii[a] + radii[b]) < 0.0)
                out.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

int run_force_kernel(const ForceSystem& system, std::vector<Vec2>& pos, const KernelParams& params) {
    const std::size_t n = pos.size();
    if (n == 0 || params.iterations <= 0) return 0;
    const auto& mass = system.mass;
    std::vector<Vec2> force(n);
    QuadTree tree;
    double step = params.initial_step;
    double prev_energy = std::numeric_limits<double>::infinity();
    int progress = 0;
    constexpr double cooling = 0.9;
    constexpr std::size_t chunk = 512;
    const std::size_t chunks = (n + chunk - 1) / chunk;

    int it = 0;
    while (it < params.iterations) {
        ++it;
        tree.build(pos, mass);
        parallel_for(chunks, [&](std::size_t c) {
            const std::size_t end = std::min(n, (c + 1) * chunk);
            for (std::size_t i = c * chunk; i < end; ++i) {
                Vec2 f = tree.repulsion(i, pos, mass, params.repulsion, params.theta, params.seed);
                if (system.graph) {
                    const auto nb = system.graph->neighbors(static_cast<NodeIndex>(i));
                    const auto w = system.graph->weights(static_cast<NodeIndex>(i));
                    for (std::size_t k = 0; k < nb.size(); ++k) f += (params.attraction * w[k]) * (pos[nb[k]] - pos[i]);
                }
                const double r = pos[i].norm();
                if (r > 0.0) f -= (params.gravity * mass[i] / r) * pos[i];
                force[i] = f;
            }
        });
        if (!system.radius.empty()) {
            for (const auto& [a, b] : overlapping_pairs(pos, system.radius)) {
                Vec2 d = pos[a] - pos[b];
                double dist = d.norm();
                if (dist < coincident_distance) {
                    d = jitter_direction(a, b, params.seed);
                    dist = 1.0;
                }
                const double overlap = system.radius[a] + system.radius[b] - dist;
                const Vec2 push = (system.hard_core * overlap * (mass[a] + mass[b]) / dist) * d;
                force[a] += push;
                force[b] -= push;
            }
        }

        double energy = 0.0;
        for (const auto& f : force) energy += f.x * f.x + f.y * f.y;
        const double rms = std::sqrt(energy / static_cast<double>(n));
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double fn = force[i].norm();
            if (fn == 0.0) continue;
            const double s = step / std::max(fn, rms);
            pos[i] += s * force[i];
            moved += s * fn;
        }
        if (energy < prev_energy) {
            if (++progress >= 5) {
                progress = 0;
                step /= cooling;
            }
        } else {
            progress = 0;
            step *= cooling;
        }
        prev_energy = energy;
        if (moved / static_cast<double>(n) < params.epsilon) break;
    }
    return it;
}

}  // namespace citemap::detail
