#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citemap/community.hpp"
#include "citemap/graph.hpp"

namespace citemap {

enum class TreeStrategy { flat, citation_primary_parent, community_two_level, custom };

std::string_view to_string(TreeStrategy s);
/// Accepts "flat", "citation", "citation_primary_parent", "community", "community_two_level".
TreeStrategy parse_tree_strategy(std::string_view name);

/// Rooted hierarchy over the non-isolated nodes of a citation graph.
///
/// Tree node 0 is the virtual root, tree node v + 1 stands for graph node v, and
/// indices above node_count() + 1 are internal community nodes. Isolated graph
/// nodes are absent from the tree. Every present node carries its subtree volume
/// (sum of degrees) and cut size (edges leaving the subtree).
class EncodingTree {
public:
    static constexpr std::size_t root = 0;
    static constexpr std::int64_t absent = -1;

    EncodingTree() = default;

    /// `parent` has one entry per tree node under the indexing above; the root and
    /// isolated graph nodes hold `absent`. Throws InvalidArgument on a malformed tree.
    static EncodingTree from_parents(const CitationGraph& g, std::vector<std::int64_t> parent,
                                     TreeStrategy strategy = TreeStrategy::custom);

    std::size_t size() const noexcept { return parent_.size(); }
    std::size_t graph_node_count() const noexcept { return graph_nodes_; }
    TreeStrategy strategy() const noexcept { return strategy_; }

    static std::size_t tree_node(NodeIndex v) { return static_cast<std::size_t>(v) + 1; }
    std::optional<NodeIndex> graph_node(std::size_t t) const {
        if (t == root || t > graph_nodes_) return std::nullopt;
        return static_cast<NodeIndex>(t - 1);
    }
    bool present(std::size_t t) const { return t == root || parent_[t] != absent; }
    std::int64_t parent(std::size_t t) const { return parent_[t]; }
    std::uint64_t volume(std::size_t t) const { return volume_[t]; }
    std::uint64_t cut(std::size_t t) const { return cut_[t]; }

    /// Present nodes ordered so that every node precedes its parent.
    std::span<const std::size_t> bottom_up() const noexcept { return bottom_up_; }

private:
    std::vector<std::int64_t> parent_;
    std::vector<std::uint64_t> volume_;
    std::vector<std::uint64_t> cut_;
    std::vector<std::size_t> bottom_up_;
    std::size_t graph_nodes_ = 0;
    TreeStrategy strategy_ = TreeStrategy::custom;
};

/// flat: every node under the root.
/// citation_primary_parent: each paper hangs under the cited paper of largest
///   degree (then earlier date, then smaller id). Only cited papers that precede
///   the citing one in (date, id) order qualify, which drops temporal violations
///   and keeps the hierarchy acyclic. Papers without a candidate hang under the root.
/// community_two_level: label-propagation communities (seeded) under the root,
///   papers under their community.
EncodingTree build_encoding_tree(const CitationGraph& g, TreeStrategy strategy, std::uint64_t seed = 0);

/// community_two_level with a caller-supplied partition.
EncodingTree build_encoding_tree(const CitationGraph& g, const Partition& communities);

/// Shannon entropy of the degree distribution, in bits. Throws InvalidArgument on an edgeless graph.
double shannon_entropy_h1(const CitationGraph& g);

/// -sum over non-root tree nodes of (cut / vol) * log2(volume / parent volume), in bits.
double structural_entropy(const CitationGraph& g, const EncodingTree& tree);

struct EntropyReport {
    double h1 = 0.0;
    double ht = 0.0;
    double k = 0.0;  // h1 - ht
    std::uint64_t vol = 0;
    TreeStrategy strategy = TreeStrategy::flat;
};

EntropyReport kqi_total(const CitationGraph& g, const EncodingTree& tree);

struct KqiScores {
    std::vector<double> per_node;  // indexed by graph node
    double total = 0.0;
};

/// Per-paper share of K: h1(v) - ht(v), with each internal community node's term
/// spread over the papers in its subtree in proportion to degree. Isolated papers score 0.
KqiScores kqi_per_node(const CitationGraph& g, const EncodingTree& tree);

enum class GroupBy { first_author, affiliation, country };

std::string_view to_string(GroupBy g);
GroupBy parse_group_by(std::string_view name);

struct RankedEntity {
    std::string entity_id;
    double kqi = 0.0;
};

struct Ranking {
    std::vector<RankedEntity> entries;  // descending kqi, ties by entity_id
    std::size_t skipped_papers = 0;     // papers without the grouping key
    double skipped_kqi = 0.0;
};

/// Credits each paper's score wholly to its first author's entity for the chosen key.
/// top_k == 0 keeps every entity.
Ranking aggregate_scores(const KqiScores& scores, const CitationGraph& g, GroupBy group_by, std::size_t top_k = 0);

/// TSV "paper_id\tkqi_bits", descending by score, ties by paper_id.
void export_scores(const CitationGraph& g, const KqiScores& scores, std::ostream& out);
/// TSV "rank\tentity_id\tkqi_bits".
void export_ranking(const Ranking& ranking, std::ostream& out);
/// JSON object with h1, ht, k, vol, strategy.
std::string entropy_report_json(const EntropyReport& report);

}  // namespace citemap
