#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "citemap/common.hpp"

namespace citemap {

/// ISO-8601 calendar date at year, month or day resolution. year == 0 means unknown.
struct Date {
    int year = 0;
    int month = 0;  // 0 when absent
    int day = 0;    // 0 when absent

    bool known() const noexcept { return year != 0; }

    /// Accepts "", "YYYY", "YYYY-MM", "YYYY-MM-DD". Throws DataError.
    static Date parse(std::string_view text);
    std::string to_string() const;

    friend auto operator<=>(const Date&, const Date&) = default;
};

struct PaperRecord {
    std::string paper_id;
    Date date;
    std::vector<std::string> author_ids;  // front() is the first author
    std::string affiliation_id;           // empty when absent
    std::string country;                  // ISO-3166 alpha-2, empty when absent
    std::string venue_id;                 // empty when absent
    std::vector<std::string> field_ids;
};

struct Citation {
    NodeIndex citing;
    NodeIndex cited;

    friend auto operator<=>(const Citation&, const Citation&) = default;
};

/// Immutable directed citation graph. Edges point from the citing to the cited paper.
///
/// Degrees, neighbors and volume refer to the undirected deduplicated view, where
/// a reciprocal pair of citations counts as one edge.
class CitationGraph {
public:
    CitationGraph() = default;

    /// Validates and indexes. Self-loops and duplicate edges must already be removed.
    static CitationGraph build(std::vector<PaperRecord> records, std::vector<Citation> edges);

    std::size_t node_count() const noexcept { return records_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::size_t undirected_edge_count() const noexcept { return und_targets_.size() / 2; }

    const PaperRecord& record(NodeIndex v) const { return records_[v]; }
    std::span<const PaperRecord> records() const noexcept { return records_; }
    std::optional<NodeIndex> find(std::string_view paper_id) const;

    /// Sorted by (citing, cited).
    std::span<const Citation> edges() const noexcept { return edges_; }

    std::span<const NodeIndex> cited_by(NodeIndex v) const;     // papers v cites
    std::span<const NodeIndex> citations_of(NodeIndex v) const; // papers citing v
    std::span<const NodeIndex> neighbors(NodeIndex v) const;    // undirected, sorted
    std::uint32_t degree(NodeIndex v) const { return static_cast<std::uint32_t>(neighbors(v).size()); }

    /// Sum of undirected degrees.
    std::uint64_t volume() const noexcept { return und_targets_.size(); }

    /// Undirected edges (u < v), sorted.
    std::vector<std::pair<NodeIndex, NodeIndex>> undirected_edges() const;

private:
    std::vector<PaperRecord> records_;
    std::unordered_map<std::string, NodeIndex> index_;
    std::vector<Citation> edges_;
    std::vector<std::uint32_t> out_offsets_, in_offsets_, und_offsets_;
    std::vector<NodeIndex> out_targets_, in_targets_, und_targets_;
};

struct WeightedEdge {
    NodeIndex u;
    NodeIndex v;
    double weight;
};

/// Undirected weighted graph in CSR form. Self-loops are kept apart from the
/// adjacency lists and count twice toward a node's strength.
class UndirectedGraph {
public:
    UndirectedGraph() = default;

    /// Parallel edges are merged by summing weights; u == v becomes a self-loop.
    static UndirectedGraph from_edges(std::size_t n, std::span<const WeightedEdge> edges);
    static UndirectedGraph from_citations(const CitationGraph& g);

    std::size_t node_count() const noexcept { return self_weight_.size(); }
    std::size_t edge_count() const noexcept { return targets_.size() / 2; }

    std::span<const NodeIndex> neighbors(NodeIndex v) const {
        return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
    }
    std::span<const double> weights(NodeIndex v) const {
        return {weights_.data() + offsets_[v], weights_.data() + offsets_[v + 1]};
    }
    double self_weight(NodeIndex v) const { return self_weight_[v]; }
    /// Weighted degree including 2x the self-loop weight.
    double strength(NodeIndex v) const { return strength_[v]; }
    /// Sum of all edge weights, self-loops included once.
    double total_weight() const noexcept { return total_weight_; }

    /// Induced subgraph on `nodes` (in the given order); self-loops dropped.
    UndirectedGraph induced(std::span<const NodeIndex> nodes) const;

private:
    std::vector<std::uint32_t> offsets_{0};
    std::vector<NodeIndex> targets_;
    std::vector<double> weights_;
    std::vector<double> self_weight_;
    std::vector<double> strength_;
    double total_weight_ = 0.0;
};

enum class DanglingPolicy { reject, stub };
enum class TableFormat { csv, jsonl };

struct IngestOptions {
    DanglingPolicy dangling = DanglingPolicy::reject;
};

struct IngestReport {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t self_loops_dropped = 0;
    std::size_t duplicate_edges_dropped = 0;
    std::size_t stubs_created = 0;
};

struct IngestResult {
    CitationGraph graph;
    IngestReport report;
};

/// Reads a nodes table and a "citing_id,cited_id" edges table. Throws DataError.
IngestResult ingest(std::istream& nodes, TableFormat nodes_format, std::istream& edges,
                    const IngestOptions& options = {});

/// Picks JSONL for ".jsonl"/".json" extensions, CSV otherwise.
TableFormat format_for_path(std::string_view path);

IngestResult ingest_files(const std::string& nodes_path, const std::string& edges_path,
                          const IngestOptions& options = {});

void export_nodes(const CitationGraph& g, std::ostream& out, TableFormat format);
void export_edges(const CitationGraph& g, std::ostream& out);

/// Induced subgraph on papers published in or before `year`. Undated papers are excluded.
CitationGraph snapshot(const CitationGraph& g, int year);

/// Edges whose citing paper is dated strictly earlier (by year) than the cited paper,
/// ordered lexicographically by (citing_id, cited_id).
std::vector<Citation> temporal_violations(const CitationGraph& g);

struct YearCount {
    int year;
    std::size_t papers;
    friend bool operator==(const YearCount&, const YearCount&) = default;
};

/// Papers per year over [min_year, max_year], zero-filled. Undated papers are ignored.
std::vector<YearCount> annual_counts(const CitationGraph& g);

}  // namespace citemap
