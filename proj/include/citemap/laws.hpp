#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "citemap/graph.hpp"
#include "citemap/kqi.hpp"

namespace citemap {

struct LawRow {
    int year = 0;
    std::size_t n = 0;         // papers
    std::size_t m = 0;         // undirected citation edges
    std::size_t sarnoff = 0;   // papers with degree >= 1
    double reed_log2 = 0.0;    // log2 of 2^n
    double kqi_bits = 0.0;     // 0 when m == 0
};

struct LawSeries {
    std::vector<LawRow> rows;
    TreeStrategy strategy = TreeStrategy::citation_primary_parent;
};

/// One row per year (ascending, no repeats), each computed on snapshot(g, year).
/// Rows are independent and may be computed concurrently.
LawSeries law_series(const CitationGraph& g, std::span<const int> years, TreeStrategy strategy,
                     std::uint64_t seed = 0);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points_used = 0;
    std::size_t points_skipped = 0;  // pairs with a non-positive coordinate
};

/// Ordinary least squares of log2(y) on log2(x). Throws InvalidArgument on unequal
/// lengths, fewer than two positive pairs, or constant x. r2 is 1 for a zero-residual
/// fit, including the constant-y case.
SlopeFit fit_loglog(std::span<const double> xs, std::span<const double> ys);

/// Non-empty vertex subsets inducing a connected subgraph, by exhaustive
/// enumeration. Refuses graphs with more than 20 nodes.
std::uint64_t count_connected_subgraphs(const CitationGraph& g);
std::uint64_t count_connected_subgraphs(const UndirectedGraph& g);

/// CSV "year,n,m,sarnoff,reed_log2,kqi_bits".
void export_law_series(const LawSeries& s, std::ostream& out);
std::string slope_fit_json(const SlopeFit& fit);
/// Log-log plot of the four value series against n.
std::string law_series_svg(const LawSeries& s);

}  // namespace citemap
