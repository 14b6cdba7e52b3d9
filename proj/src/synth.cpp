#include "citemap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace citemap::synth {

namespace {

// Visits pairs (i < j) of [0, n) each with probability p using geometric skips.
template <class Fn>
void sample_pairs(std::size_t lo, std::size_t hi, double p, Rng& rng, Fn&& fn) {
    if (p <= 0.0 || hi - lo < 2) return;
    if (p >= 1.0) {
        for (std::size_t j = lo + 1; j < hi; ++j)
            for (std::size_t i = lo; i < j; ++i) fn(i, j);
        return;
    }
    const double log_q = std::log1p(-p);
    std::int64_t j = static_cast<std::int64_t>(lo) + 1, i = static_cast<std::int64_t>(lo) - 1;
    const auto end = static_cast<std::int64_t>(hi);
    for (;;) {
        const double r = rng.uniform();
        i += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
        while (j < end && i >= j) {
            i -= j - static_cast<std::int64_t>(lo);
            ++j;
        }
        if (j >= end) return;
        fn(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
}

}  // namespace

CitationGraph preferential_attachment_dag(std::size_t n, std::size_t cites_per_paper, std::uint64_t seed,
                                          int first_year, std::size_t papers_per_year) {
    Rng rng(seed);
    std::vector<PaperRecord> records(n);
    for (std::size_t i = 0; i < n; ++i) {
        records[i].paper_id = "P" + std::to_string(i);
        records[i].date.year = first_year + (papers_per_year ? static_cast<int>(i / papers_per_year) : 0);
    }
    // Each node sits in the urn once plus once per incident edge.
    std::vector<NodeIndex> urn;
    urn.reserve(n * (2 * cites_per_paper + 1));
    std::vector<Citation> edges;
    edges.reserve(n * cites_per_paper);
    std::vector<NodeIndex> chosen;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t want = std::min(i, cites_per_paper);
        chosen.clear();
        while (chosen.size() < want) {
            const NodeIndex c = urn[rng.below(urn.size())];
            if (std::find(chosen.begin(), chosen.end(), c) == chosen.end()) chosen.push_back(c);
        }
        const auto v = static_cast<NodeIndex>(i);
        for (NodeIndex c : chosen) {
            edges.push_back({v, c});
            urn.push_back(c);
            urn.push_back(v);
        }
        urn.push_back(v);
    }
    return CitationGraph::build(std::move(records), std::move(edges));
}

CitationGraph random_citation_graph(std::size_t n, double p, std::uint64_t seed, int year) {
    Rng rng(seed);
    std::vector<PaperRecord> records(n);
    for (std::size_t i = 0; i < n; ++i) {
        records[i].paper_id = "P" + std::to_string(i);
        records[i].date.year = year;
    }
    std::vector<Citation> edges;
    sample_pairs(0, n, p, rng, [&](std::size_t i, std::size_t j) {
        edges.push_back({static_cast<NodeIndex>(j), static_cast<NodeIndex>(i)});
    });
    return CitationGraph::build(std::move(records), std::move(edges));
}

PlantedGraph stochastic_block_model(std::size_t blocks, std::size_t block_size, double p_in, double p_out,
                                    std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t n = blocks * block_size;
    std::vector<WeightedEdge> edges;
    std::vector<std::uint32_t> labels(n);
    for (std::size_t v = 0; v < n; ++v) labels[v] = static_cast<std::uint32_t>(v / block_size);
    sample_pairs(0, n, p_out, rng, [&](std::size_t i, std::size_t j) {
        if (labels[i] != labels[j]) edges.push_back({static_cast<NodeIndex>(i), static_cast<NodeIndex>(j), 1.0});
    });
    // p_in applies to intra-block pairs; the inter-block pass skipped them.
    for (std::size_t b = 0; b < blocks; ++b)
        sample_pairs(b * block_size, (b + 1) * block_size, p_in, rng, [&](std::size_t i, std::size_t j) {
            edges.push_back({static_cast<NodeIndex>(i), static_cast<NodeIndex>(j), 1.0});
        });
    return {UndirectedGraph::from_edges(n, edges), Partition::from_labels(labels)};
}

PlantedGraph planted_communities(std::size_t n, std::size_t communities, double mean_degree, double mixing,
                                 std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::uint32_t> labels(n);
    std::vector<std::vector<NodeIndex>> members(communities);
    for (std::size_t v = 0; v < n; ++v) {
        labels[v] = static_cast<std::uint32_t>(v % communities);
        members[labels[v]].push_back(static_cast<NodeIndex>(v));
    }
    const auto m = static_cast<std::size_t>(std::llround(static_cast<double>(n) * mean_degree / 2.0));
    std::vector<WeightedEdge> edges;
    edges.reserve(m);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(2 * m);
    std::size_t attempts = 0;
    while (edges.size() < m && attempts < 20 * m + 100) {
        ++attempts;
        const auto u = static_cast<NodeIndex>(rng.below(n));
        NodeIndex v;
        if (rng.uniform() < mixing) {
            v = static_cast<NodeIndex>(rng.below(n));
        } else {
            const auto& pool = members[labels[u]];
            v = pool[rng.below(pool.size())];
        }
        if (u == v) continue;
        const std::uint64_t key = (std::uint64_t{std::min(u, v)} << 32) | std::max(u, v);
        if (!seen.insert(key).second) continue;
        edges.push_back({u, v, 1.0});
    }
    return {UndirectedGraph::from_edges(n, edges), Partition::from_labels(labels)};
}

PlantedGraph clique_chain(std::size_t count, std::size_t size) {
    std::vector<WeightedEdge> edges;
    std::vector<std::uint32_t> labels(count * size);
    for (std::size_t c = 0; c < count; ++c) {
        const std::size_t base = c * size;
        for (std::size_t i = 0; i < size; ++i) {
            labels[base + i] = static_cast<std::uint32_t>(c);
            for (std::size_t j = i + 1; j < size; ++j)
                edges.push_back({static_cast<NodeIndex>(base + i), static_cast<NodeIndex>(base + j), 1.0});
        }
        if (c + 1 < count)
            edges.push_back({static_cast<NodeIndex>(base + size - 1), static_cast<NodeIndex>(base + size), 1.0});
    }
    return {UndirectedGraph::from_edges(count * size, edges), Partition::from_labels(labels)};
}

CitationGraph as_citation_graph(const UndirectedGraph& g, int year) {
    std::vector<PaperRecord> records(g.node_count());
    for (std::size_t i = 0; i < records.size(); ++i) {
        records[i].paper_id = "n" + std::to_string(i);
        records[i].date.year = year;
    }
    std::vector<Citation> edges;
    for (NodeIndex u = 0; u < g.node_count(); ++u)
        for (NodeIndex v : g.neighbors(u))
            if (u < v) edges.push_back({v, u});
    return CitationGraph::build(std::move(records), std::move(edges));
}

}  // namespace citemap::synth
