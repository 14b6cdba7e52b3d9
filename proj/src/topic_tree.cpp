#include "citemap/topic_tree.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "citemap/community.hpp"
#include "citemap/csv.hpp"

namespace citemap {

ConceptCorpus ConceptCorpus::from_documents(std::vector<ConceptDocument> docs) {
    ConceptCorpus c;
    std::set<std::string> ids;
    for (auto& d : docs) {
        if (!ids.insert(d.doc_id).second) throw DataError("duplicate doc_id '" + d.doc_id + "'");
        for (const auto& t : d.concepts)
            if (t.empty()) throw DataError("empty concept token in document '" + d.doc_id + "'");
        std::sort(d.concepts.begin(), d.concepts.end());
        d.concepts.erase(std::unique(d.concepts.begin(), d.concepts.end()), d.concepts.end());
        for (const auto& t : d.concepts) ++c.vocab_[t];
    }
    c.docs_ = std::move(docs);
    return c;
}

ConceptCorpus ConceptCorpus::read_jsonl(std::istream& in) {
    std::vector<ConceptDocument> docs;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(text);
            ConceptDocument d;
            d.doc_id = j.at("doc_id").get<std::string>();
            for (const auto& t : j.at("concepts")) d.concepts.push_back(t.get<std::string>());
            docs.push_back(std::move(d));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("malformed corpus record: ") + e.what(), line);
        }
    }
    return from_documents(std::move(docs));
}

std::size_t ConceptCorpus::document_frequency(std::string_view token) const {
    const auto it = vocab_.find(std::string(token));
    return it == vocab_.end() ? 0 : it->second;
}

UndirectedGraph CooccurrenceGraph::graph() const { return UndirectedGraph::from_edges(tokens.size(), edges); }

std::optional<NodeIndex> CooccurrenceGraph::find(std::string_view token) const {
    const auto it = std::lower_bound(tokens.begin(), tokens.end(), token);
    if (it == tokens.end() || *it != token) return std::nullopt;
    return static_cast<NodeIndex>(it - tokens.begin());
}

CooccurrenceGraph build_cooccurrence(const ConceptCorpus& corpus, std::size_t min_doc_freq,
                                     std::size_t min_pair_count) {
    if (corpus.documents().empty()) throw InvalidArgument("co-occurrence needs a non-empty corpus");
    if (min_doc_freq < 1 || min_pair_count < 1) throw InvalidArgument("co-occurrence thresholds must be >= 1");
    CooccurrenceGraph g;
    for (const auto& [token, df] : corpus.vocabulary())
        if (df >= min_doc_freq) g.tokens.push_back(token);
    std::unordered_map<std::uint64_t, std::size_t> pairs;
    std::vector<NodeIndex> ids;
    for (const auto& doc : corpus.documents()) {
        ids.clear();
        for (const auto& t : doc.concepts)
            if (const auto id = g.find(t)) ids.push_back(*id);
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = i + 1; j < ids.size(); ++j)
                ++pairs[(std::uint64_t{ids[i]} << 32) | ids[j]];  // ids ascending: concepts are sorted
    }
    for (const auto& [key, count] : pairs)
        if (count >= min_pair_count)
            g.edges.push_back({static_cast<NodeIndex>(key >> 32), static_cast<NodeIndex>(key & 0xffffffffu),
                               static_cast<double>(count)});
    std::sort(g.edges.begin(), g.edges.end(),
              [](const WeightedEdge& a, const WeightedEdge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
    return g;
}

std::vector<std::size_t> TopicTree::nodes_at(int level) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].level == level) out.push_back(i);
    return out;
}

TopicTree build_topic_tree(const CooccurrenceGraph& coocc, int max_levels, std::uint64_t seed) {
    if (max_levels < 2) throw InvalidArgument("max_levels must be >= 2");
    if (coocc.tokens.empty()) throw InvalidArgument("co-occurrence graph has no tokens");
    TopicTree tree;
    for (const auto& t : coocc.tokens) {
        TopicNode node;
        node.tokens = {t};
        tree.nodes.push_back(std::move(node));
    }

    // current[i]: tree node standing for hyper-node i of `graph`
    UndirectedGraph graph = coocc.graph();
    std::vector<std::size_t> current(coocc.tokens.size());
    for (std::size_t i = 0; i < current.size(); ++i) current[i] = i;

    auto add_level = [&](const Partition& p, int level) {
        std::vector<std::size_t> next(p.community_count());
        for (std::size_t c = 0; c < next.size(); ++c) {
            next[c] = tree.nodes.size();
            TopicNode node;
            node.level = level;
            tree.nodes.push_back(std::move(node));
        }
        for (NodeIndex v = 0; v < p.node_count(); ++v) {
            const auto parent = next[p[v]];
            auto& child = tree.nodes[current[v]];
            child.parent = static_cast<std::int64_t>(parent);
            tree.nodes[parent].children.push_back(current[v]);
            auto& tokens = tree.nodes[parent].tokens;
            tokens.insert(tokens.end(), child.tokens.begin(), child.tokens.end());
        }
        for (auto id : next) std::sort(tree.nodes[id].tokens.begin(), tree.nodes[id].tokens.end());
        current = std::move(next);
    };

    int level = 1;
    Partition p = label_propagation(graph, {.seed = mix_seed(seed, 1), .max_rounds = 100});
    add_level(p, level);
    while (current.size() > 1 && level + 1 < max_levels) {
        UndirectedGraph hyper = contract(graph, p);
        Partition next = label_propagation(hyper, {.seed = mix_seed(seed, static_cast<std::uint64_t>(level) + 1),
                                                   .max_rounds = 100});
        // No merge, or a single community that the root already represents.
        if (next.community_count() == current.size() || next.community_count() == 1) break;
        ++level;
        add_level(next, level);
        graph = std::move(hyper);
        p = std::move(next);
    }
    add_level(Partition::from_labels(std::vector<std::uint32_t>(current.size(), 0)), level + 1);
    tree.root = current.front();
    return tree;
}

namespace {

double plogp_ratio(double joint, double px, double py) {
    return joint > 0 ? joint * std::log2(joint / (px * py)) : 0.0;
}

double mutual_information(double n11, double n10, double n01, double n00) {
    const double n = n11 + n10 + n01 + n00;
    if (n == 0) return 0.0;
    const double x1 = (n11 + n10) / n, x0 = (n01 + n00) / n;
    const double y1 = (n11 + n01) / n, y0 = (n10 + n00) / n;
    const double mi = plogp_ratio(n11 / n, x1, y1) + plogp_ratio(n10 / n, x1, y0) + plogp_ratio(n01 / n, x0, y1) +
                      plogp_ratio(n00 / n, x0, y0);
    return std::max(0.0, mi);
}

bool doc_has(const ConceptDocument& d, std::string_view token) {
    return std::binary_search(d.concepts.begin(), d.concepts.end(), token);
}

}  // namespace

double keyword_mutual_information(const ConceptCorpus& corpus, std::string_view token,
                                  const std::vector<std::string>& topic) {
    double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
    for (const auto& d : corpus.documents()) {
        const bool x = doc_has(d, token);
        const bool y = std::any_of(topic.begin(), topic.end(), [&](const std::string& t) { return doc_has(d, t); });
        (x ? (y ? n11 : n10) : (y ? n01 : n00)) += 1;
    }
    return mutual_information(n11, n10, n01, n00);
}

std::vector<std::string> normalize_entity_words(std::string_view text) {
    std::vector<std::string> words;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        if (cur.size() > 4 && cur.ends_with("ies"))
            cur = cur.substr(0, cur.size() - 3) + "y";
        else if (cur.size() > 4 && (cur.ends_with("sses") || cur.ends_with("xes") || cur.ends_with("ches") ||
                                    cur.ends_with("shes")))
            cur.resize(cur.size() - 2);
        else if (cur.size() > 3 && cur.back() == 's' && !cur.ends_with("ss"))
            cur.pop_back();
        words.push_back(cur);
        cur.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c))
            cur.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    return words;
}

double fuzzy_similarity(std::string_view a, std::string_view b) {
    const auto wa = normalize_entity_words(a);
    const auto wb = normalize_entity_words(b);
    if (wa.empty() && wb.empty()) return 0.0;
    std::vector<std::string> common;
    std::set_intersection(wa.begin(), wa.end(), wb.begin(), wb.end(), std::back_inserter(common));
    return static_cast<double>(common.size()) / static_cast<double>(wa.size() + wb.size() - common.size());
}

void label_topics(TopicTree& tree, const ConceptCorpus& corpus, const std::vector<std::string>& dictionary,
                  std::size_t top_k) {
    // Postings: token -> documents containing it.
    std::unordered_map<std::string, std::vector<std::uint32_t>> postings;
    const auto& docs = corpus.documents();
    for (std::uint32_t d = 0; d < docs.size(); ++d)
        for (const auto& t : docs[d].concepts) postings[t].push_back(d);
    const double n = static_cast<double>(docs.size());

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i)
        if (tree.nodes[i].level > 0) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return tree.nodes[a].level < tree.nodes[b].level; });

    std::vector<char> in_topic(docs.size());
    for (const auto id : order) {
        auto& node = tree.nodes[id];
        std::fill(in_topic.begin(), in_topic.end(), 0);
        for (const auto& t : node.tokens)
            if (const auto it = postings.find(t); it != postings.end())
                for (auto d : it->second) in_topic[d] = 1;
        const double y1 = static_cast<double>(std::count(in_topic.begin(), in_topic.end(), 1));

        std::vector<TopicLabel> labels;
        for (const auto& t : node.tokens) {
            const auto it = postings.find(t);
            const auto& docs_with = it == postings.end() ? std::vector<std::uint32_t>{} : it->second;
            double n11 = 0;
            for (auto d : docs_with) n11 += in_topic[d];
            const double x1 = static_cast<double>(docs_with.size());
            const double n10 = x1 - n11, n01 = y1 - n11, n00 = n - n11 - n10 - n01;
            labels.push_back({t, mutual_information(n11, n10, n01, n00), docs_with.size(), std::nullopt});
        }
        std::sort(labels.begin(), labels.end(), [](const TopicLabel& a, const TopicLabel& b) {
            if (a.mi != b.mi) return a.mi > b.mi;
            if (a.doc_freq != b.doc_freq) return a.doc_freq > b.doc_freq;
            return a.keyword < b.keyword;
        });
        if (labels.size() > top_k) labels.resize(top_k);
        for (auto& label : labels) {
            double best = 0.0;
            for (const auto& entity : dictionary) {
                const double s = fuzzy_similarity(label.keyword, entity);
                if (s > best) {
                    best = s;
                    if (s >= 0.5) label.entity = entity;
                }
            }
        }
        node.labels = std::move(labels);
    }
}

namespace {

nlohmann::ordered_json node_json(const TopicTree& tree, std::size_t id) {
    const auto& node = tree.nodes[id];
    nlohmann::ordered_json j;
    j["id"] = id;
    j["level"] = node.level;
    if (node.level == 0) {
        j["token"] = node.tokens.front();
        return j;
    }
    j["size"] = node.tokens.size();
    auto labels = nlohmann::ordered_json::array();
    for (const auto& l : node.labels) {
        nlohmann::ordered_json lj;
        lj["keyword"] = l.keyword;
        lj["mi"] = l.mi;
        lj["doc_freq"] = l.doc_freq;
        if (l.entity) lj["entity"] = *l.entity;
        labels.push_back(std::move(lj));
    }
    j["labels"] = std::move(labels);
    auto children = nlohmann::ordered_json::array();
    for (auto c : node.children) children.push_back(node_json(tree, c));
    j["children"] = std::move(children);
    return j;
}

std::string display_label(const TopicNode& node) {
    if (node.level == 0) return node.tokens.front();
    if (node.labels.empty()) return {};
    const auto& top = node.labels.front();
    return top.entity ? *top.entity : top.keyword;
}

}  // namespace

std::string topic_tree_json(const TopicTree& tree) {
    if (tree.nodes.empty()) return "{}";
    return node_json(tree, tree.root).dump(2);
}

void export_topic_tree_csv(const TopicTree& tree, std::ostream& out) {
    out << "level,node_id,parent_id,label\n";
    std::vector<std::size_t> order(tree.nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return tree.nodes[a].level > tree.nodes[b].level; });
    for (auto id : order) {
        const auto& node = tree.nodes[id];
        out << node.level << ',' << id << ',';
        if (node.parent >= 0) out << node.parent;
        out << ',' << csv::escape(display_label(node)) << '\n';
    }
}

}  // namespace citemap
