#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "citemap/community.hpp"
#include "citemap/graph.hpp"

// Seeded synthetic graphs for benchmarks, tests and demos.
namespace citemap::synth {

struct PlantedGraph {
    UndirectedGraph graph;
    Partition planted;
};

/// Growing citation DAG: paper i cites min(i, cites_per_paper) distinct earlier papers,
/// each drawn with probability proportional to (undirected degree + 1). Paper i is
/// dated first_year + i / papers_per_year and named "P<i>".
CitationGraph preferential_attachment_dag(std::size_t n, std::size_t cites_per_paper, std::uint64_t seed,
                                          int first_year = 2000, std::size_t papers_per_year = 0);

/// G(n, p) where each sampled pair (i < j) becomes the citation j -> i.
CitationGraph random_citation_graph(std::size_t n, double p, std::uint64_t seed, int year = 2000);

/// Stochastic block model with `blocks` equal blocks.
PlantedGraph stochastic_block_model(std::size_t blocks, std::size_t block_size, double p_in, double p_out,
                                    std::uint64_t seed);

/// Sparse planted communities: n * mean_degree / 2 edges, each one internal to a
/// random node's community with probability 1 - mixing, otherwise uniform.
PlantedGraph planted_communities(std::size_t n, std::size_t communities, double mean_degree, double mixing,
                                 std::uint64_t seed);

/// `count` cliques of `size` nodes, consecutive cliques joined by one bridge edge.
PlantedGraph clique_chain(std::size_t count, std::size_t size);

/// Wraps an undirected graph as a citation graph: edge {u < v} becomes v -> u,
/// papers are "n<i>" dated `year`.
CitationGraph as_citation_graph(const UndirectedGraph& g, int year = 2000);

}  // namespace citemap::synth
