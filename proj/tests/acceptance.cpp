// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: citemap_acceptance <path to citemap CLI>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "citemap/community.hpp"
#include "citemap/kqi.hpp"
#include "citemap/laws.hpp"
#include "citemap/layout.hpp"
#include "citemap/synth.hpp"
#include "citemap/topic_tree.hpp"
#include "oracles.hpp"

using namespace citemap;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0 && secs > budget_s) o.require(false, "runtime over budget");
    failures += !o.pass;
    std::printf("%s %2d %-28s %8.2fs  %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1
Outcome flat_identity() {
    Outcome o;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t n = 20 + seed * 180 / 99;
        const auto g = synth::random_citation_graph(n, 4.0 / static_cast<double>(n), seed);
        if (g.edge_count() == 0) continue;
        const auto r = kqi_total(g, build_encoding_tree(g, TreeStrategy::flat));
        worst = std::max(worst, std::abs(r.k));
    }
    o.require(worst <= 1e-12, fmt("max |K| = %.3g", worst));
    o.detail = o.pass ? fmt("max |K| = %.3g over 100 graphs", worst) : o.detail;
    return o;
}

// 2
Outcome entropy_oracle() {
    Outcome o;
    double worst = 0.0;
    std::size_t trees = 0;
    for (const auto& f : oracle::small_fixtures()) {
        const auto g = oracle::citation_graph(f.n, f.edges);
        const double h1 = shannon_entropy_h1(g);
        double min_ht = 1e300;
        oracle::for_each_encoding_tree(f.n, f.edges, [&](const std::vector<std::int64_t>& parent) {
            const double ht = structural_entropy(g, EncodingTree::from_parents(g, parent));
            worst = std::max(worst, std::abs(ht - oracle::structural_entropy(f.n, f.edges, parent).ht));
            min_ht = std::min(min_ht, ht);
            ++trees;
        });
        o.require(min_ht <= h1 + 1e-12, std::string("min H^T > H^1 on ") + f.name);
    }
    // 7- and 8-node fixtures: shipped strategies plus seeded random trees.
    for (const auto& f : oracle::medium_fixtures()) {
        const auto g = oracle::citation_graph(f.n, f.edges);
        if (g.edge_count() == 0) continue;
        const double h1 = shannon_entropy_h1(g);
        std::vector<std::int64_t> flat(f.n + 1, -1);
        for (int v = 0; v < f.n; ++v)
            if (g.degree(static_cast<NodeIndex>(v)) > 0) flat[v + 1] = 0;
        worst = std::max(worst, std::abs(h1 - oracle::structural_entropy(f.n, f.edges, flat).h1));
        for (std::uint64_t s = 0; s < 200; ++s) {
            const auto parent = oracle::random_encoding_tree(f.n, f.edges, static_cast<int>(s % 5), s);
            const double ht = structural_entropy(g, EncodingTree::from_parents(g, parent));
            worst = std::max(worst, std::abs(ht - oracle::structural_entropy(f.n, f.edges, parent).ht));
            ++trees;
        }
        for (auto strategy : {TreeStrategy::flat, TreeStrategy::citation_primary_parent,
                              TreeStrategy::community_two_level}) {
            const auto tree = build_encoding_tree(g, strategy, 1);
            std::vector<std::int64_t> parent(tree.size());
            for (std::size_t t = 0; t < tree.size(); ++t) parent[t] = tree.present(t) ? tree.parent(t) : -1;
            worst = std::max(worst, std::abs(structural_entropy(g, tree) -
                                             oracle::structural_entropy(f.n, f.edges, parent).ht));
            ++trees;
        }
    }
    o.require(worst <= 1e-12, fmt("max deviation %.3g", worst));
    if (o.pass) o.detail = fmt("%.0f trees, max deviation %.3g", static_cast<double>(trees), worst);
    return o;
}

// 3
Outcome hand_fixtures() {
    Outcome o;
    std::vector<PaperRecord> recs(3);
    const char* ids[] = {"A", "B", "C"};
    for (int i = 0; i < 3; ++i) {
        recs[i].paper_id = ids[i];
        recs[i].date = Date::parse(std::to_string(1990 + 10 * i));
    }
    const auto chain = CitationGraph::build(recs, {{2, 1}, {1, 0}});
    const auto tree = build_encoding_tree(chain, TreeStrategy::citation_primary_parent);
    const auto r = kqi_total(chain, tree);
    o.require(std::abs(r.h1 - 1.5) <= 1e-9, fmt("chain H1 = %.12g", r.h1));
    o.require(std::abs(r.ht - 0.5) <= 1e-9, fmt("chain HT = %.12g", r.ht));
    o.require(std::abs(r.k - 1.0) <= 1e-9, fmt("chain K = %.12g", r.k));
    // A = 0.5, B = 0.5 + log2(3/4)/4, C = 0.5 + log2(1/3)/4.
    const double expect[] = {0.5, 0.39624062518028907, 0.10375937481971093};
    const auto s = kqi_per_node(chain, tree);
    for (int i = 0; i < 3; ++i)
        o.require(std::abs(s.per_node[i] - expect[i]) <= 1e-9, fmt("chain node %g = %.12g", i, s.per_node[i]));
    const auto tri = oracle::citation_graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
    const auto p = Partition::from_labels(std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1});
    const double k = kqi_total(tri, build_encoding_tree(tri, p)).k;
    o.require(std::abs(k - 1.0) <= 1e-9, fmt("two triangles K = %.12g", k));
    if (o.pass) o.detail = "chain (1.5, 0.5, 1.0), two triangles K = 1";
    return o;
}

// 4
Outcome decomposition() {
    Outcome o;
    double worst = 0.0;
    const TreeStrategy strategies[] = {TreeStrategy::citation_primary_parent, TreeStrategy::community_two_level,
                                       TreeStrategy::flat};
    for (std::uint64_t i = 0; i < 100; ++i) {
        const std::size_t n = 50 * (i + 1);
        const auto g = synth::preferential_attachment_dag(n, 1 + i % 5, i, 1980, 1 + n / 40);
        const auto tree = build_encoding_tree(g, strategies[i % 3], i);
        const auto total = kqi_total(g, tree);
        const auto s = kqi_per_node(g, tree);
        double sum = 0.0;
        for (double x : s.per_node) sum += x;
        worst = std::max(worst, std::abs(sum - total.k));
    }
    o.require(worst <= 1e-9, fmt("max |sum - K| = %.3g", worst));
    if (o.pass) o.detail = fmt("max |sum - K| = %.3g, n up to 5000", worst);
    return o;
}

// 5
Outcome sublinear_law() {
    Outcome o;
    const auto g = synth::preferential_attachment_dag(50000, 5, 2024, 2000, 2500);
    std::vector<int> years;
    for (int y = 2000; y < 2020; ++y) years.push_back(y);
    const auto s = law_series(g, years, TreeStrategy::citation_primary_parent);
    std::vector<double> n, k;
    for (const auto& row : s.rows) {
        n.push_back(static_cast<double>(row.n));
        k.push_back(row.kqi_bits);
    }
    const auto fit = fit_loglog(n, k);
    o.require(fit.points_used == 20, fmt("only %g usable snapshots", static_cast<double>(fit.points_used)));
    o.require(fit.slope > 0.0 && fit.slope < 1.0, fmt("slope %.4f outside (0, 1)", fit.slope));
    if (o.pass) o.detail = fmt("slope %.4f (r2 %.3f) over 20 snapshots", fit.slope, fit.r2);
    return o;
}

// 6
Outcome metcalfe() {
    Outcome o;
    std::vector<double> n, m;
    for (int size = 4; size <= 64; ++size) {
        std::vector<oracle::Edge> edges;
        for (int i = 0; i < size; ++i)
            for (int j = i + 1; j < size; ++j) edges.push_back({i, j});
        const auto s = law_series(oracle::citation_graph(size, edges), std::vector<int>{2000}, TreeStrategy::flat);
        n.push_back(static_cast<double>(s.rows[0].n));
        m.push_back(static_cast<double>(s.rows[0].m));
    }
    const auto fit = fit_loglog(n, m);
    o.require(fit.slope >= 1.9 && fit.slope <= 2.0, fmt("slope %.4f outside [1.9, 2.0]", fit.slope));
    if (o.pass) o.detail = fmt("slope %.4f", fit.slope);
    return o;
}

// 7
Outcome connected_subgraphs() {
    Outcome o;
    o.require(count_connected_subgraphs(oracle::citation_graph(3, {{0, 1}, {1, 2}, {0, 2}})) == 7, "K3 != 7");
    o.require(count_connected_subgraphs(oracle::citation_graph(3, {{0, 1}, {1, 2}})) == 6, "P3 != 6");
    std::size_t checked = 0;
    for (const auto& list : {oracle::small_fixtures(), oracle::medium_fixtures()})
        for (const auto& f : list) {
            o.require(count_connected_subgraphs(oracle::citation_graph(f.n, f.edges)) ==
                          oracle::connected_subgraphs(f.n, f.edges),
                      std::string("mismatch on ") + f.name);
            ++checked;
        }
    if (o.pass) o.detail = fmt("K3 = 7, P3 = 6, %g fixtures agree", static_cast<double>(checked));
    return o;
}

// 8
Outcome community_recovery() {
    Outcome o;
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto sbm = synth::stochastic_block_model(10, 100, 0.3, 0.01, seed);
        total += nmi(label_propagation(sbm.graph, {.seed = seed, .max_rounds = 100}), sbm.planted);
    }
    o.require(total / 10 >= 0.9, fmt("mean NMI %.4f", total / 10));
    if (o.pass) o.detail = fmt("mean NMI %.4f", total / 10);
    return o;
}

// 9
bool stitch_is_exact(const UndirectedGraph& g, const VsanResult& r, const LayoutConfig& c) {
    const auto subs = layout_subgraphs(g, r.partition, r.blocks, c);
    const auto members = r.partition.members();
    for (std::uint32_t b = 0; b < members.size(); ++b) {
        const auto& local = subs.at(b).coords;
        const auto& m = members[b];
        const std::size_t stride = m.size() > 300 ? m.size() / 300 : 1;
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = i + 1; j < m.size(); j += stride) {
                const Vec2 ds = r.stitched.coords[m[i]] - r.stitched.coords[m[j]];
                const Vec2 dl = local[i] - local[j];
                if (ds.x != dl.x || ds.y != dl.y) return false;
            }
    }
    return true;
}

Outcome vsan_structure() {
    Outcome o;
    struct Family {
        const char* name;
        std::function<UndirectedGraph(std::uint64_t)> make;
    };
    const Family families[] = {
        {"planted-2000", [](std::uint64_t s) { return synth::planted_communities(2000, 10, 8, 0.1, s).graph; }},
        {"sbm-1000", [](std::uint64_t s) { return synth::stochastic_block_model(10, 100, 0.05, 0.002, s).graph; }},
    };
    std::string summary;
    for (const auto& fam : families) {
        double pipeline = 0.0, direct = 0.0, min_gap = 1e300;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto g = fam.make(seed);
            LayoutConfig c;
            c.seed = seed;
            const auto r = vsan_pipeline(g, c);
            if (r.blocks.blocks.size() > 1) min_gap = std::min(min_gap, min_block_gap(r.blocks));
            o.require(stitch_is_exact(g, r, c), std::string("stitch not exact on ") + fam.name);
            pipeline += normalized_stress(g, r.positions);
            // Same per-node iteration budget as the pipeline's node-level stages.
            direct += normalized_stress(g, force_layout(g, c, nullptr, c.iterations_sub + c.iterations_finetune));
        }
        o.require(min_gap >= 0.0, fmt("negative block gap %.3g", min_gap));
        const double ratio = pipeline / direct;
        o.require(ratio <= 1.15, std::string(fam.name) + fmt(" stress ratio %.3f", ratio));
        summary += std::string(fam.name) + fmt(" ratio %.3f gap %.3g; ", ratio, min_gap);
    }
    if (o.pass) o.detail = summary + "stitch exact";
    return o;
}

// 10
Outcome vsan_scaling() {
    Outcome o;
    std::vector<double> t;
    for (std::size_t n : {25000u, 50000u, 100000u}) {
        const auto g = synth::planted_communities(n, n / 1000, 8, 0.1, 10).graph;
        t.push_back(seconds([&] { (void)vsan_pipeline(g, LayoutConfig{}); }));
    }
    o.require(t[1] <= 3 * t[0] && t[2] <= 3 * t[1], fmt("doubling ratios %.2f, %.2f", t[1] / t[0], t[2] / t[1]));
    o.require(t[2] < 300.0, fmt("100k run took %.1f s", t[2]));
    if (o.pass)
        o.detail = fmt("25k %.1fs, 50k %.1fs, ", t[0], t[1]) + fmt("100k %.1fs", t[2]);
    return o;
}

// 11
ConceptCorpus make_corpus(const std::vector<std::vector<std::string>>& docs) {
    std::vector<ConceptDocument> d;
    for (std::size_t i = 0; i < docs.size(); ++i) d.push_back({"d" + std::to_string(i), docs[i]});
    return ConceptCorpus::from_documents(std::move(d));
}

std::string topic_token(int topic, int k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "t%d_%02d", topic, k);
    return buf;
}

std::vector<std::vector<std::string>> topic_documents() {
    // Token 0 of each topic is its indicator and appears in every document of the topic.
    std::vector<std::vector<std::string>> docs;
    Rng rng(11);
    for (int topic = 0; topic < 5; ++topic)
        for (int d = 0; d < 200; ++d) {
            std::vector<std::string> doc = {topic_token(topic, 0)};
            for (int extra = 0; extra < 6; ++extra) doc.push_back(topic_token(topic, 1 + static_cast<int>(rng.below(49))));
            docs.push_back(std::move(doc));
        }
    return docs;
}

Outcome topic_recovery() {
    Outcome o;
    const auto corpus = make_corpus(topic_documents());
    const auto coocc = build_cooccurrence(corpus);
    o.require(coocc.tokens.size() == 250, fmt("%g tokens", static_cast<double>(coocc.tokens.size())));
    auto tree = build_topic_tree(coocc, 4, 42);
    label_topics(tree, corpus, {}, 5);
    std::vector<std::uint32_t> found(coocc.tokens.size()), planted(coocc.tokens.size());
    const auto leaves = tree.nodes_at(1);
    for (std::size_t c = 0; c < leaves.size(); ++c) {
        const auto& node = tree.nodes[leaves[c]];
        for (const auto& tok : node.tokens) found[*coocc.find(tok)] = static_cast<std::uint32_t>(c);
        const int topic = node.tokens.front()[1] - '0';
        o.require(!node.labels.empty() && node.labels[0].keyword == topic_token(topic, 0),
                  "indicator not ranked first in topic " + std::to_string(topic));
    }
    for (std::size_t i = 0; i < coocc.tokens.size(); ++i) planted[i] = static_cast<std::uint32_t>(coocc.tokens[i][1] - '0');
    const double score = nmi(Partition::from_labels(found), Partition::from_labels(planted));
    o.require(score == 1.0, fmt("level-1 NMI %.6f", score));

    std::vector<std::vector<std::string>> table;
    for (int i = 0; i < 3; ++i) table.push_back({"x", "y"});
    table.push_back({"x"});
    table.push_back({"y"});
    for (int i = 0; i < 3; ++i) table.push_back({"z"});
    const double mi = keyword_mutual_information(make_corpus(table), "x", {"y"});
    o.require(std::abs(mi - 0.18872187554086717) <= 1e-9, fmt("MI fixture %.12f", mi));
    if (o.pass) o.detail = fmt("NMI %.1f, %g topics, MI fixture %.5f", score, static_cast<double>(leaves.size()), mi);
    return o;
}

// 12
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_inputs(const fs::path& dir, bool self_loops) {
    const auto g = synth::preferential_attachment_dag(600, 3, 77, 1995, 40);
    const char* countries[] = {"US", "DE", "CN", "FR"};
    std::ofstream nodes(dir / "nodes.csv", std::ios::binary);
    nodes << "paper_id,date,author_ids,affiliation_id,country,venue_id\n";
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
        const auto& r = g.record(v);
        nodes << r.paper_id << ',' << r.date.to_string() << ",a" << v % 37 << "|b" << v % 11 << ",u" << v % 9 << ','
              << countries[v % 4] << ",j" << v % 6 << '\n';
    }
    std::ofstream edges(dir / "edges.csv", std::ios::binary);
    edges << "citing_id,cited_id\n";
    for (const auto& e : g.edges()) {
        edges << g.record(e.citing).paper_id << ',' << g.record(e.cited).paper_id << '\n';
        if (self_loops && e.citing % 5 == 0) edges << g.record(e.citing).paper_id << ',' << g.record(e.citing).paper_id << '\n';
    }
    std::ofstream corpus(dir / "corpus.jsonl", std::ios::binary);
    const auto docs = topic_documents();
    for (std::size_t i = 0; i < docs.size(); i += 4) {
        corpus << "{\"doc_id\":\"d" << i << "\",\"concepts\":[";
        for (std::size_t k = 0; k < docs[i].size(); ++k) corpus << (k ? "," : "") << '"' << docs[i][k] << '"';
        corpus << "]}\n";
    }
    std::ofstream dict(dir / "dictionary.txt", std::ios::binary);
    dict << "t0 00\nt3 01\n";
}

struct Command {
    std::string name;
    std::string args;                 // {in} and {out} are replaced
    std::vector<std::string> outputs; // files under {out}
};

std::string expand(std::string s, const fs::path& in, const fs::path& out) {
    for (auto [key, value] : {std::pair<std::string, std::string>{"{in}", in.string()}, {"{out}", out.string()}})
        for (std::size_t pos; (pos = s.find(key)) != std::string::npos;) s.replace(pos, key.size(), value);
    return s;
}

Outcome cli_determinism(const std::string& cli) {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / ("citemap_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const fs::path clean = root / "clean", looped = root / "looped";
    fs::create_directories(clean);
    fs::create_directories(looped);
    write_inputs(clean, false);
    write_inputs(looped, true);

    const std::string graph = "--nodes {in}/nodes.csv --edges {in}/edges.csv";
    const std::vector<Command> commands = {
        {"ingest-check", "ingest-check " + graph + " --out {out}/ingest.json", {"ingest.json"}},
        {"kqi", "kqi " + graph + " --report {out}/report.json --scores {out}/scores.tsv",
         {"report.json", "scores.tsv"}},
        {"kqi-community", "kqi " + graph + " --strategy community --seed 7 --report {out}/creport.json --scores {out}/cscores.tsv",
         {"creport.json", "cscores.tsv"}},
        {"rank", "rank " + graph + " --by country --out {out}/rank.tsv", {"rank.tsv"}},
        {"laws", "laws " + graph + " --series {out}/series.csv --fit {out}/fit.json --plot {out}/laws.svg",
         {"series.csv", "fit.json", "laws.svg"}},
        {"layout", "layout " + graph + " --seed 5 --positions {out}/pos.jsonl --svg {out}/layout.svg --quality {out}/quality.json",
         {"pos.jsonl", "layout.svg", "quality.json"}},
        {"layout-venue", "layout " + graph + " --mode attribute:venue_id --positions {out}/vpos.jsonl", {"vpos.jsonl"}},
        {"topictree", "topictree --corpus {in}/corpus.jsonl --dictionary {in}/dictionary.txt --json {out}/tree.json --csv {out}/tree.csv",
         {"tree.json", "tree.csv"}},
        {"stats", "stats " + graph + " --out {out}/stats.csv", {"stats.csv"}},
    };
    auto run = [&](const Command& c, const fs::path& in, const fs::path& out) {
        fs::create_directories(out);
        const std::string cmd = "\"" + cli + "\" " + expand(c.args, in, out) + " > \"" + (out / (c.name + ".stdout")).string() +
                                "\" 2> \"" + (out / (c.name + ".stderr")).string() + "\"";
        return std::system(cmd.c_str()) == 0;
    };
    std::size_t compared = 0;
    for (const auto& c : commands) {
        o.require(run(c, clean, root / "run1") && run(c, clean, root / "run2"), c.name + " exited non-zero");
        auto outputs = c.outputs;
        outputs.push_back(c.name + ".stdout");
        for (const auto& f : outputs) {
            const auto a = slurp(root / "run1" / f), b = slurp(root / "run2" / f);
            o.require(!a.empty() || f.ends_with(".stdout"), c.name + ": empty " + f);
            o.require(a == b, c.name + ": " + f + " differs between runs");
            ++compared;
        }
    }
    // Self-citations are dropped at ingestion: entropy outputs must not move.
    for (const auto& c : commands) {
        if (c.name != "kqi" && c.name != "kqi-community" && c.name != "laws") continue;
        o.require(run(c, looped, root / "looped_out"), c.name + " failed on self-loop input");
        for (const auto& f : c.outputs)
            o.require(slurp(root / "run1" / f) == slurp(root / "looped_out" / f), c.name + ": self-loops changed " + f);
    }
    if (o.pass) {
        o.detail = fmt("%g outputs byte-identical, self-loop injection inert", static_cast<double>(compared));
        fs::remove_all(root);
    } else {
        o.detail += " (artifacts in " + root.string() + ")";
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <citemap executable>\n", argv[0]);
        return 2;
    }
    const std::string cli = argv[1];
    criterion(1, "flat-tree identity", 10, flat_identity);
    criterion(2, "structural-entropy oracle", 120, entropy_oracle);
    criterion(3, "hand fixtures", 0, hand_fixtures);
    criterion(4, "per-node decomposition", 60, decomposition);
    criterion(5, "sublinear knowledge law", 300, sublinear_law);
    criterion(6, "metcalfe exactness", 5, metcalfe);
    criterion(7, "connected-subgraph oracle", 30, connected_subgraphs);
    criterion(8, "community recovery", 30, community_recovery);
    criterion(9, "vsan structure", 300, vsan_structure);
    criterion(10, "vsan scaling", 0, vsan_scaling);
    criterion(11, "topic-tree recovery", 30, topic_recovery);
    criterion(12, "determinism", 0, [&] { return cli_determinism(cli); });
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
