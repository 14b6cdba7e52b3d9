// citemap: command-line front end for ingestion checks, KQI, rankings, growth laws,
// layouts and topic trees.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "citemap/community.hpp"
#include "citemap/graph.hpp"
#include "citemap/kqi.hpp"
#include "citemap/laws.hpp"
#include "citemap/layout.hpp"
#include "citemap/topic_tree.hpp"

namespace {

using namespace citemap;
using json = nlohmann::ordered_json;

constexpr std::uint64_t default_seed = 42;

// JSON config: top-level scalars/arrays apply to the active subcommand when it has
// a matching option; an object keyed by a subcommand name holds that subcommand's
// options. Keys may use '_' or '-'.
class JsonConfig : public CLI::Config {
public:
    explicit JsonConfig(const CLI::App* root) : root_(root) {}
    void set_active(std::string name) { active_ = std::move(name); }

    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
        std::vector<CLI::ConfigItem> items;
        const CLI::App* sub = active_.empty() ? nullptr : root_->get_subcommand_no_throw(active_);
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                if (key != active_) continue;
                for (const auto& [k, v] : value.items()) items.push_back(item({active_}, k, v));
            } else if (sub) {
                const auto name = option_name(key);
                if (sub->get_option_no_throw("--" + name)) items.push_back(item({active_}, key, value));
            }
        }
        return items;
    }

private:
    static std::string option_name(std::string key) {
        std::replace(key.begin(), key.end(), '_', '-');
        return key;
    }

    static std::string scalar(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number()) return v.dump();
        throw CLI::ConversionError("unsupported config value " + v.dump());
    }

    static CLI::ConfigItem item(std::vector<std::string> parents, const std::string& key, const json& v) {
        CLI::ConfigItem it;
        it.parents = std::move(parents);
        it.name = option_name(key);
        if (v.is_array())
            for (const auto& e : v) it.inputs.push_back(scalar(e));
        else
            it.inputs.push_back(scalar(v));
        return it;
    }

    const CLI::App* root_;
    std::string active_;
};

void write_output(const std::string& path, const std::string& data) {
    if (path == "-") {
        std::cout << data;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file '" + path + "'");
    out << data;
    if (!out) throw DataError("failed writing '" + path + "'");
}

void require_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw DataError(std::string("cannot read ") + what + " '" + path + "'");
}

struct GraphInput {
    std::string nodes;
    std::string edges;
    std::string dangling = "reject";

    void add(CLI::App* app) {
        app->add_option("--nodes", nodes, "Nodes table (CSV, or JSONL by .jsonl/.json extension)")->required();
        app->add_option("--edges", edges, "Edges CSV with header citing_id,cited_id")->required();
        app->add_option("--dangling", dangling, "Edges to unknown papers: reject or stub")
            ->capture_default_str()
            ->check(CLI::IsMember({"reject", "stub"}));
    }

    IngestResult load() const {
        require_file(nodes, "nodes table");
        require_file(edges, "edges table");
        IngestOptions options;
        options.dangling = dangling == "stub" ? DanglingPolicy::stub : DanglingPolicy::reject;
        return ingest_files(nodes, edges, options);
    }
};

const std::vector<std::string> strategy_names = {"flat", "citation", "citation_primary_parent", "community",
                                                 "community_two_level"};

// ---- ingest-check ----

struct IngestCheckArgs {
    GraphInput input;
    std::string out = "-";
};

void run_ingest_check(const IngestCheckArgs& a) {
    const auto result = a.input.load();
    const auto& g = result.graph;
    const auto violations = temporal_violations(g);
    std::size_t undated = 0;
    for (const auto& r : g.records()) undated += !r.date.known();
    json j;
    j["nodes"] = result.report.nodes;
    j["edges"] = result.report.edges;
    j["self_loops_dropped"] = result.report.self_loops_dropped;
    j["duplicate_edges_dropped"] = result.report.duplicate_edges_dropped;
    j["stubs_created"] = result.report.stubs_created;
    j["undated_papers"] = undated;
    j["temporal_violations"] = violations.size();
    auto list = json::array();
    for (const auto& c : violations)
        list.push_back({{"citing_id", g.record(c.citing).paper_id}, {"cited_id", g.record(c.cited).paper_id}});
    j["violations"] = std::move(list);
    write_output(a.out, j.dump(2) + "\n");
    if (!violations.empty())
        std::cerr << "warning: " << violations.size() << " citation(s) point forward in time\n";
}

// ---- kqi / rank ----

struct KqiArgs {
    GraphInput input;
    std::string strategy = "citation";
    std::uint64_t seed = default_seed;
    std::string report = "-";
    std::string scores;
};

void add_strategy(CLI::App* app, std::string& strategy) {
    app->add_option("--strategy", strategy, "Encoding tree: flat, citation or community")
        ->capture_default_str()
        ->check(CLI::IsMember(strategy_names));
}

void run_kqi(const KqiArgs& a) {
    const auto g = a.input.load().graph;
    const auto tree = build_encoding_tree(g, parse_tree_strategy(a.strategy), a.seed);
    const auto report = kqi_total(g, tree);
    write_output(a.report, entropy_report_json(report) + "\n");
    if (!a.scores.empty()) {
        std::ostringstream tsv;
        export_scores(g, kqi_per_node(g, tree), tsv);
        write_output(a.scores, tsv.str());
    }
    if (report.k < 0) std::cerr << "warning: K is negative (" << format_double(report.k) << " bits)\n";
}

struct RankArgs {
    GraphInput input;
    std::string strategy = "citation";
    std::string by = "first_author";
    std::size_t top_k = 0;
    std::uint64_t seed = default_seed;
    std::string out = "-";
};

void run_rank(const RankArgs& a) {
    const auto g = a.input.load().graph;
    const auto tree = build_encoding_tree(g, parse_tree_strategy(a.strategy), a.seed);
    const auto ranking = aggregate_scores(kqi_per_node(g, tree), g, parse_group_by(a.by), a.top_k);
    std::ostringstream tsv;
    export_ranking(ranking, tsv);
    write_output(a.out, tsv.str());
    if (ranking.skipped_papers)
        std::cerr << "note: " << ranking.skipped_papers << " paper(s) lack " << a.by << " ("
                  << format_double(ranking.skipped_kqi) << " bits not attributed)\n";
}

// ---- laws ----

struct LawsArgs {
    GraphInput input;
    std::string strategy = "citation";
    std::vector<int> years;
    std::uint64_t seed = default_seed;
    std::string series = "-";
    std::string fit;
    std::string plot;
};

void run_laws(const LawsArgs& a) {
    const auto g = a.input.load().graph;
    std::vector<int> years = a.years;
    if (years.empty()) {
        const auto counts = annual_counts(g);
        for (const auto& c : counts) years.push_back(c.year);
    } else {
        std::sort(years.begin(), years.end());
        years.erase(std::unique(years.begin(), years.end()), years.end());
    }
    if (years.empty()) throw DataError("no dated papers to build a growth series from");
    const auto s = law_series(g, years, parse_tree_strategy(a.strategy), a.seed);
    std::ostringstream csv;
    export_law_series(s, csv);
    write_output(a.series, csv.str());

    if (!a.fit.empty()) {
        std::vector<double> n, m, sarnoff, k;
        for (const auto& r : s.rows) {
            n.push_back(static_cast<double>(r.n));
            m.push_back(static_cast<double>(r.m));
            sarnoff.push_back(static_cast<double>(r.sarnoff));
            k.push_back(r.kqi_bits);
        }
        json j;
        auto fit = [&](const char* name, const std::vector<double>& ys) {
            try {
                j[name] = json::parse(slope_fit_json(fit_loglog(n, ys)));
            } catch (const InvalidArgument& e) {
                j[name] = nullptr;
                std::cerr << "warning: no " << name << " fit: " << e.what() << '\n';
            }
        };
        fit("kqi_vs_n", k);
        fit("edges_vs_n", m);
        fit("sarnoff_vs_n", sarnoff);
        write_output(a.fit, j.dump(2) + "\n");
    }
    if (!a.plot.empty()) write_output(a.plot, law_series_svg(s));
}

// ---- layout ----

struct LayoutArgs {
    GraphInput input;
    std::string mode = "community";
    std::uint64_t seed = default_seed;
    LayoutConfig config;
    bool no_finetune = false;
    std::string positions = "-";
    std::string svg;
    std::string timings;
    std::string quality;
};

double attribute_coverage(const CitationGraph& g, const std::string& key) {
    if (g.node_count() == 0) return 1.0;
    std::size_t have = 0;
    for (const auto& r : g.records()) {
        if (key == "venue_id" || key == "venue")
            have += !r.venue_id.empty();
        else if (key == "affiliation_id" || key == "affiliation")
            have += !r.affiliation_id.empty();
        else if (key == "country")
            have += !r.country.empty();
        else if (key == "first_author")
            have += !r.author_ids.empty();
        else if (key == "year")
            have += r.date.known();
    }
    return static_cast<double>(have) / static_cast<double>(g.node_count());
}

LayoutConfig resolve_layout_config(const LayoutArgs& a) {
    LayoutConfig c = a.config;
    c.seed = a.seed;
    c.finetune_enabled = !a.no_finetune;
    if (a.mode == "community") {
        c.segmentation = SegmentationMode::community;
    } else if (a.mode.starts_with("attribute:") && a.mode.size() > 10) {
        c.segmentation = SegmentationMode::attribute;
        c.attribute_key = a.mode.substr(10);
    } else {
        throw CLI::ValidationError("--mode", "expected community or attribute:<key>");
    }
    try {
        c.validate();
        const std::set<std::string> keys = {"venue_id", "venue", "affiliation_id", "affiliation",
                                            "country", "first_author", "year"};
        if (c.segmentation == SegmentationMode::attribute && !keys.contains(c.attribute_key))
            throw InvalidArgument("unknown attribute key '" + c.attribute_key + "'");
    } catch (const InvalidArgument& e) {
        throw CLI::ValidationError("layout", e.what());
    }
    return c;
}

void run_layout(const LayoutArgs& a) {
    const auto config = resolve_layout_config(a);
    const auto g = a.input.load().graph;
    if (config.segmentation == SegmentationMode::attribute) {
        const double coverage = attribute_coverage(g, config.attribute_key);
        if (coverage < 0.99)
            std::cerr << "warning: only " << format_double(coverage * 100.0) << "% of papers carry "
                      << config.attribute_key << "; the rest share one block\n";
    }
    const auto result = vsan_pipeline(g, config);
    std::ostringstream jsonl;
    export_positions_jsonl(g, result.positions, result.partition, jsonl);
    write_output(a.positions, jsonl.str());
    const auto ug = UndirectedGraph::from_citations(g);
    if (!a.svg.empty()) write_output(a.svg, layout_svg(ug, result.positions, result.partition));
    if (!a.timings.empty()) write_output(a.timings, stage_timings_json(result.timings) + "\n");
    if (!a.quality.empty()) {
        const auto q = layout_quality(ug, result.positions, &result.partition);
        json j;
        j["normalized_stress"] = q.normalized_stress;
        j["neighborhood_preservation"] = q.neighborhood_preservation;
        j["silhouette"] = q.silhouette;
        j["blocks"] = result.blocks.blocks.size();
        j["min_block_gap"] = result.blocks.blocks.size() > 1 ? json(min_block_gap(result.blocks)) : json(nullptr);
        write_output(a.quality, j.dump(2) + "\n");
    }
}

// ---- topictree ----

struct TopicArgs {
    std::string corpus;
    std::string dictionary;
    std::size_t min_doc_freq = 1;
    std::size_t min_pair_count = 1;
    int max_levels = 4;
    std::size_t top_k = 5;
    std::uint64_t seed = default_seed;
    std::string json_out = "-";
    std::string csv_out;
};

void run_topictree(const TopicArgs& a) {
    require_file(a.corpus, "corpus");
    std::ifstream in(a.corpus);
    const auto corpus = ConceptCorpus::read_jsonl(in);
    std::vector<std::string> dictionary;
    if (!a.dictionary.empty()) {
        require_file(a.dictionary, "dictionary");
        std::ifstream d(a.dictionary);
        std::string line;
        while (std::getline(d, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos) dictionary.push_back(line);
        }
    }
    if (corpus.documents().empty()) throw DataError("corpus has no documents");
    const auto coocc = build_cooccurrence(corpus, a.min_doc_freq, a.min_pair_count);
    if (coocc.tokens.empty()) throw DataError("no concept reaches the document-frequency threshold");
    auto tree = build_topic_tree(coocc, a.max_levels, a.seed);
    label_topics(tree, corpus, dictionary, a.top_k);
    write_output(a.json_out, topic_tree_json(tree) + "\n");
    if (!a.csv_out.empty()) {
        std::ostringstream csv;
        export_topic_tree_csv(tree, csv);
        write_output(a.csv_out, csv.str());
    }
}

// ---- stats ----

struct StatsArgs {
    GraphInput input;
    std::string out = "-";
};

void run_stats(const StatsArgs& a) {
    const auto g = a.input.load().graph;
    std::ostringstream csv;
    csv << "year,papers\n";
    for (const auto& c : annual_counts(g)) csv << c.year << ',' << c.papers << '\n';
    write_output(a.out, csv.str());
}

std::string find_subcommand(int argc, char** argv, const CLI::App& app) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (app.get_subcommand_no_throw(arg)) return arg;
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Citation-network analytics: KQI, growth laws, VSAN layouts and topic trees"};
    app.require_subcommand(1);
    app.fallthrough();
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.set_config("--config", "", "JSON config file; command-line flags take precedence");
    auto config_reader = std::make_shared<JsonConfig>(&app);
    app.config_formatter(config_reader);

    IngestCheckArgs ingest_args;
    auto* ingest_cmd = app.add_subcommand("ingest-check", "Validate input tables and report dropped or suspicious edges");
    ingest_args.input.add(ingest_cmd);
    ingest_cmd->add_option("--out", ingest_args.out, "Report JSON path ('-' for stdout)")->capture_default_str();

    KqiArgs kqi_args;
    auto* kqi_cmd = app.add_subcommand("kqi", "Entropy report and per-paper KQI scores");
    kqi_args.input.add(kqi_cmd);
    add_strategy(kqi_cmd, kqi_args.strategy);
    kqi_cmd->add_option("--seed", kqi_args.seed, "Seed for community trees")->capture_default_str();
    kqi_cmd->add_option("--report", kqi_args.report, "Entropy report JSON path ('-' for stdout)")->capture_default_str();
    kqi_cmd->add_option("--scores", kqi_args.scores, "Per-paper TSV path (omit to skip)");

    RankArgs rank_args;
    auto* rank_cmd = app.add_subcommand("rank", "Rank authors, affiliations or countries by summed KQI");
    rank_args.input.add(rank_cmd);
    add_strategy(rank_cmd, rank_args.strategy);
    rank_cmd->add_option("--by", rank_args.by, "Grouping key")
        ->capture_default_str()
        ->check(CLI::IsMember({"first_author", "affiliation", "country"}));
    rank_cmd->add_option("--top-k", rank_args.top_k, "Keep the best k entities (0 = all)")->capture_default_str();
    rank_cmd->add_option("--seed", rank_args.seed, "Seed for community trees")->capture_default_str();
    rank_cmd->add_option("--out", rank_args.out, "Ranking TSV path ('-' for stdout)")->capture_default_str();

    LawsArgs laws_args;
    auto* laws_cmd = app.add_subcommand("laws", "Yearly growth series with Sarnoff, Metcalfe, Reed and KQI values");
    laws_args.input.add(laws_cmd);
    add_strategy(laws_cmd, laws_args.strategy);
    laws_cmd->add_option("--years", laws_args.years, "Snapshot years (default: every year in the data)")
        ->delimiter(',');
    laws_cmd->add_option("--seed", laws_args.seed, "Seed for community trees")->capture_default_str();
    laws_cmd->add_option("--series", laws_args.series, "Series CSV path ('-' for stdout)")->capture_default_str();
    laws_cmd->add_option("--fit", laws_args.fit, "Log-log slope fits JSON path (omit to skip)");
    laws_cmd->add_option("--plot", laws_args.plot, "Log-log SVG plot path (omit to skip)");

    LayoutArgs layout_args;
    auto* layout_cmd = app.add_subcommand("layout", "VSAN layout: segment, place blocks, lay out, stitch, fine-tune");
    layout_args.input.add(layout_cmd);
    auto& lc = layout_args.config;
    layout_cmd->add_option("--mode", layout_args.mode, "Segmentation: community or attribute:<key> "
                                                       "(venue_id, affiliation_id, country, first_author, year)")
        ->capture_default_str();
    layout_cmd->add_option("--seed", layout_args.seed, "Layout seed")->capture_default_str();
    layout_cmd->add_option("--iterations-block", lc.iterations_block, "Block placement iterations")->capture_default_str();
    layout_cmd->add_option("--iterations-sub", lc.iterations_sub, "Per-block layout iterations")->capture_default_str();
    layout_cmd->add_option("--iterations-finetune", lc.iterations_finetune, "Fine-tune iterations")->capture_default_str();
    layout_cmd->add_option("--attraction", lc.attraction_scale, "Attraction scale")->capture_default_str();
    layout_cmd->add_option("--repulsion", lc.repulsion_scale, "Repulsion scale")->capture_default_str();
    layout_cmd->add_option("--gravity", lc.gravity, "Gravity toward the origin")->capture_default_str();
    layout_cmd->add_option("--theta", lc.theta, "Barnes-Hut opening angle in (0, 1]")->capture_default_str();
    layout_cmd->add_option("--epsilon", lc.convergence_epsilon, "Convergence threshold on mean displacement")
        ->capture_default_str();
    layout_cmd->add_option("--block-radius-scale", lc.block_radius_scale, "Block radius per sqrt(member)")
        ->capture_default_str();
    layout_cmd->add_flag("--no-finetune", layout_args.no_finetune, "Skip the fine-tuning stage");
    layout_cmd->add_option("--positions", layout_args.positions, "Positions JSONL path ('-' for stdout)")
        ->capture_default_str();
    layout_cmd->add_option("--svg", layout_args.svg, "SVG drawing path (omit to skip)");
    layout_cmd->add_option("--timings", layout_args.timings, "Stage timings JSON path (omit to skip)");
    layout_cmd->add_option("--quality", layout_args.quality, "Layout quality JSON path (omit to skip)");

    TopicArgs topic_args;
    auto* topic_cmd = app.add_subcommand("topictree", "Topic hierarchy from concept co-occurrence");
    topic_cmd->add_option("--corpus", topic_args.corpus, "Corpus JSONL {doc_id, concepts}")->required();
    topic_cmd->add_option("--dictionary", topic_args.dictionary, "Entity names, one per line");
    topic_cmd->add_option("--min-doc-freq", topic_args.min_doc_freq, "Drop rarer concepts")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    topic_cmd->add_option("--min-pair-count", topic_args.min_pair_count, "Drop rarer co-occurrences")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    topic_cmd->add_option("--max-levels", topic_args.max_levels, "Levels above the concepts, root included")
        ->capture_default_str()
        ->check(CLI::Range(2, 64));
    topic_cmd->add_option("--top-k", topic_args.top_k, "Labels kept per topic")->capture_default_str();
    topic_cmd->add_option("--seed", topic_args.seed, "Partitioning seed")->capture_default_str();
    topic_cmd->add_option("--json", topic_args.json_out, "Tree JSON path ('-' for stdout)")->capture_default_str();
    topic_cmd->add_option("--csv", topic_args.csv_out, "Flat CSV path (omit to skip)");

    StatsArgs stats_args;
    auto* stats_cmd = app.add_subcommand("stats", "Papers per year");
    stats_args.input.add(stats_cmd);
    stats_cmd->add_option("--out", stats_args.out, "CSV path ('-' for stdout)")->capture_default_str();

    config_reader->set_active(find_subcommand(argc, argv, app));

    try {
        app.parse(argc, argv);
    } catch (const CLI::FileError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e, std::cerr, std::cerr);
        return 1;
    }

    try {
        if (*ingest_cmd) run_ingest_check(ingest_args);
        if (*kqi_cmd) run_kqi(kqi_args);
        if (*rank_cmd) run_rank(rank_args);
        if (*laws_cmd) run_laws(laws_args);
        if (*layout_cmd) run_layout(layout_args);
        if (*topic_cmd) run_topictree(topic_args);
        if (*stats_cmd) run_stats(stats_args);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
