#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "citemap/graph.hpp"

namespace citemap {

struct ConceptDocument {
    std::string doc_id;
    std::vector<std::string> concepts;  // sorted, unique, non-empty
};

class ConceptCorpus {
public:
    /// Deduplicates each document's concepts. Throws DataError on duplicate doc ids or empty tokens.
    static ConceptCorpus from_documents(std::vector<ConceptDocument> docs);
    /// JSON lines {"doc_id": ..., "concepts": [...]}.
    static ConceptCorpus read_jsonl(std::istream& in);

    const std::vector<ConceptDocument>& documents() const noexcept { return docs_; }
    /// token -> number of documents containing it
    const std::map<std::string, std::size_t>& vocabulary() const noexcept { return vocab_; }
    std::size_t document_frequency(std::string_view token) const;

private:
    std::vector<ConceptDocument> docs_;
    std::map<std::string, std::size_t> vocab_;
};

struct CooccurrenceGraph {
    std::vector<std::string> tokens;  // sorted
    std::vector<WeightedEdge> edges;  // u < v, weight = documents containing both

    UndirectedGraph graph() const;
    std::optional<NodeIndex> find(std::string_view token) const;
};

/// Drops tokens with document frequency below min_doc_freq, then keeps pairs
/// co-occurring in at least min_pair_count documents. Throws InvalidArgument on an
/// empty corpus or a zero threshold.
CooccurrenceGraph build_cooccurrence(const ConceptCorpus& corpus, std::size_t min_doc_freq = 1,
                                     std::size_t min_pair_count = 1);

struct TopicLabel {
    std::string keyword;
    double mi = 0.0;
    std::size_t doc_freq = 0;
    std::optional<std::string> entity;  // dictionary match
};

struct TopicNode {
    int level = 0;                  // 0 for concept tokens
    std::int64_t parent = -1;       // -1 at the root
    std::vector<std::size_t> children;
    std::vector<std::string> tokens;  // sorted token set covered by the node
    std::vector<TopicLabel> labels;
};

/// Levels: 0 = concept tokens, 1 = leaf communities, higher = merged hyper-nodes,
/// and a single root one level above the highest community level.
struct TopicTree {
    std::vector<TopicNode> nodes;  // tokens first, then levels in ascending order
    std::size_t root = 0;

    /// Root level: edges from the root down to a token.
    int depth() const { return nodes.empty() ? 0 : nodes[root].level; }
    std::vector<std::size_t> nodes_at(int level) const;
};

/// Leaf communities come from label propagation on the weighted co-occurrence graph;
/// each further level contracts the previous communities into hyper-nodes (weights
/// summed, internal weight kept as a self-loop) and partitions again. Stops when a
/// pass merges nothing or everything, or when max_levels levels above the tokens
/// (root included) exist. Throws InvalidArgument if max_levels < 2 or the graph has
/// no tokens.
TopicTree build_topic_tree(const CooccurrenceGraph& coocc, int max_levels = 4, std::uint64_t seed = 0);

/// MI in bits between "document contains token" and "document contains at least
/// one token of the topic", over all documents.
double keyword_mutual_information(const ConceptCorpus& corpus, std::string_view token,
                                  const std::vector<std::string>& topic);

/// Lowercase words with a plural 's'/'ies' folded to the singular.
std::vector<std::string> normalize_entity_words(std::string_view text);
/// Jaccard similarity of the normalized word sets.
double fuzzy_similarity(std::string_view a, std::string_view b);

/// Labels every topic node, leaves first: its tokens ranked by MI (ties by higher
/// document frequency, then lexicographically), top_k kept, each matched to the
/// dictionary entity of highest similarity when that similarity is >= 0.5.
void label_topics(TopicTree& tree, const ConceptCorpus& corpus, const std::vector<std::string>& dictionary,
                  std::size_t top_k = 5);

std::string topic_tree_json(const TopicTree& tree);
/// CSV "level,node_id,parent_id,label".
void export_topic_tree_csv(const TopicTree& tree, std::ostream& out);

}  // namespace citemap
