#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "citemap/graph.hpp"

namespace citemap {

/// Node -> community assignment with dense labels {0, ..., community_count - 1}.
class Partition {
public:
    Partition() = default;

    /// Relabels communities densely in order of first appearance.
    static Partition from_labels(std::span<const std::uint32_t> labels);
    /// Keeps labels as given; throws InvalidArgument unless they are exactly {0, ..., k - 1}.
    static Partition from_dense(std::vector<std::uint32_t> labels);

    std::size_t node_count() const noexcept { return assignment_.size(); }
    std::size_t community_count() const noexcept { return count_; }
    std::uint32_t operator[](NodeIndex v) const { return assignment_[v]; }
    std::span<const std::uint32_t> assignment() const noexcept { return assignment_; }

    /// Member lists per community, each in ascending node order.
    std::vector<std::vector<NodeIndex>> members() const;
    std::vector<std::size_t> sizes() const;

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<std::uint32_t> assignment_;
    std::size_t count_ = 0;
};

struct LabelPropagationOptions {
    std::uint64_t seed = 0;
    int max_rounds = 100;
    /// Contract the result and repeat on the community graph until a pass merges nothing.
    bool coarsen = false;
};

/// Asynchronous label propagation on the weighted undirected graph.
///
/// Each node, visited in a seed-shuffled order every round, scores every label
/// present among its neighbors by the weight linking it to that label, less the
/// expected weight strength(v) * strength(label) / (2 * total_weight). It moves
/// to the best label only when that beats staying; ties go to the smallest
/// label index. Stops after a round without changes or after max_rounds.
/// With `coarsen`, whole communities can then merge, which escapes the many
/// tiny communities a single pass leaves on sparse graphs.
Partition label_propagation(const UndirectedGraph& g, const LabelPropagationOptions& options = {});
Partition label_propagation(const CitationGraph& g, const LabelPropagationOptions& options = {});

/// Community graph: one node per community, summed weights, internal weight as self-loops.
UndirectedGraph contract(const UndirectedGraph& g, const Partition& p);

/// Newman modularity on the undirected view; 0 for a graph without edges.
double modularity(const UndirectedGraph& g, const Partition& p);
double modularity(const CitationGraph& g, const Partition& p);

/// Normalized mutual information, arithmetic-mean normalization.
/// Throws InvalidArgument when the partitions cover different node counts.
double nmi(const Partition& p, const Partition& q);

/// CSV "node_id,community".
void export_partition(const CitationGraph& g, const Partition& p, std::ostream& out);
Partition import_partition(const CitationGraph& g, std::istream& in);

}  // namespace citemap
