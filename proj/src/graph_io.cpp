#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "citemap/csv.hpp"
#include "citemap/graph.hpp"

namespace citemap {

namespace {

using nlohmann::json;

std::string normalize_country(std::string code, std::size_t line) {
    if (code.empty()) return code;
    if (code.size() != 2 || !std::isalpha(static_cast<unsigned char>(code[0])) ||
        !std::isalpha(static_cast<unsigned char>(code[1])))
        throw DataError("country must be an ISO-3166 alpha-2 code, got '" + code + "'", line);
    for (char& c : code) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return code;
}

struct Row {
    PaperRecord record;
    std::size_t line;
};

std::vector<Row> read_nodes_csv(std::istream& in) {
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) return {};
    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < fields.size(); ++i) col.emplace(fields[i], i);
    if (!col.contains("paper_id")) throw DataError("nodes header lacks 'paper_id'", reader.line());
    const std::size_t width = fields.size();
    auto get = [&](const std::vector<std::string>& f, const char* name) -> std::string {
        const auto it = col.find(name);
        return it == col.end() ? std::string{} : f[it->second];
    };

    std::vector<Row> rows;
    while (reader.next(fields)) {
        const std::size_t line = reader.line();
        if (fields.size() != width)
            throw DataError("expected " + std::to_string(width) + " columns, got " + std::to_string(fields.size()),
                            line);
        try {
            PaperRecord r;
            r.paper_id = get(fields, "paper_id");
            r.date = Date::parse(get(fields, "date"));
            r.author_ids = csv::split_list(get(fields, "author_ids"));
            r.affiliation_id = get(fields, "affiliation_id");
            r.country = normalize_country(get(fields, "country"), line);
            r.venue_id = get(fields, "venue_id");
            r.field_ids = csv::split_list(get(fields, "field_ids"));
            if (r.paper_id.empty()) throw DataError("empty paper_id");
            rows.push_back({std::move(r), line});
        } catch (const DataError& e) {
            if (e.line()) throw;
            throw DataError(e.what(), line);
        }
    }
    return rows;
}

std::vector<std::string> json_list(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (it->is_string()) return csv::split_list(it->get<std::string>());
    if (!it->is_array()) throw DataError(std::string("'") + key + "' must be an array or pipe-separated string");
    std::vector<std::string> out;
    for (const auto& x : *it) {
        if (!x.is_string()) throw DataError(std::string("'") + key + "' entries must be strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

std::string json_string(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (it->is_number_integer() && std::string_view(key) == "date") return std::to_string(it->get<long long>());
    if (!it->is_string()) throw DataError(std::string("'") + key + "' must be a string");
    return it->get<std::string>();
}

std::vector<Row> read_nodes_jsonl(std::istream& in) {
    std::vector<Row> rows;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json obj = json::parse(text);
            if (!obj.is_object()) throw DataError("expected a JSON object");
            PaperRecord r;
            r.paper_id = json_string(obj, "paper_id");
            r.date = Date::parse(json_string(obj, "date"));
            r.author_ids = json_list(obj, "author_ids");
            r.affiliation_id = json_string(obj, "affiliation_id");
            r.country = normalize_country(json_string(obj, "country"), line);
            r.venue_id = json_string(obj, "venue_id");
            r.field_ids = json_list(obj, "field_ids");
            if (r.paper_id.empty()) throw DataError("missing paper_id");
            rows.push_back({std::move(r), line});
        } catch (const json::exception& e) {
            throw DataError(std::string("malformed JSON: ") + e.what(), line);
        } catch (const DataError& e) {
            if (e.line()) throw;
            throw DataError(e.what(), line);
        }
    }
    return rows;
}

}  // namespace

IngestResult ingest(std::istream& nodes, TableFormat nodes_format, std::istream& edges,
                    const IngestOptions& options) {
    auto rows = nodes_format == TableFormat::csv ? read_nodes_csv(nodes) : read_nodes_jsonl(nodes);

    std::vector<PaperRecord> records;
    records.reserve(rows.size());
    std::unordered_map<std::string, NodeIndex> index;
    index.reserve(rows.size());
    for (auto& row : rows) {
        const auto id = static_cast<NodeIndex>(records.size());
        if (!index.emplace(row.record.paper_id, id).second)
            throw DataError("duplicate paper_id '" + row.record.paper_id + "'", row.line);
        auto& authors = row.record.author_ids;
        for (std::size_t i = 0; i < authors.size(); ++i)
            for (std::size_t j = i + 1; j < authors.size(); ++j)
                if (authors[i] == authors[j])
                    throw DataError("duplicate author id '" + authors[i] + "' in paper '" + row.record.paper_id + "'",
                                    row.line);
        records.push_back(std::move(row.record));
    }

    IngestReport report;
    csv::Reader reader(edges);
    std::vector<std::string> fields;
    std::vector<Citation> citations;
    if (reader.next(fields)) {
        if (fields.size() < 2 || fields[0] != "citing_id" || fields[1] != "cited_id")
            throw DataError("edges header must be 'citing_id,cited_id'", reader.line());
        auto resolve = [&](const std::string& id, std::size_t line) -> NodeIndex {
            if (id.empty()) throw DataError("empty paper id in edge", line);
            if (const auto it = index.find(id); it != index.end()) return it->second;
            if (options.dangling == DanglingPolicy::reject)
                throw DataError("edge references unknown paper '" + id + "'", line);
            const auto v = static_cast<NodeIndex>(records.size());
            PaperRecord stub;
            stub.paper_id = id;
            records.push_back(std::move(stub));
            index.emplace(id, v);
            ++report.stubs_created;
            return v;
        };
        while (reader.next(fields)) {
            const std::size_t line = reader.line();
            if (fields.size() < 2) throw DataError("expected citing_id,cited_id", line);
            if (fields[0] == fields[1]) {
                ++report.self_loops_dropped;
                continue;
            }
            const NodeIndex a = resolve(fields[0], line);
            const NodeIndex b = resolve(fields[1], line);
            citations.push_back({a, b});
        }
    }
    std::sort(citations.begin(), citations.end());
    const auto unique_end = std::unique(citations.begin(), citations.end());
    report.duplicate_edges_dropped = static_cast<std::size_t>(citations.end() - unique_end);
    citations.erase(unique_end, citations.end());

    report.nodes = records.size();
    report.edges = citations.size();
    return {CitationGraph::build(std::move(records), std::move(citations)), report};
}

TableFormat format_for_path(std::string_view path) {
    auto ends_with = [&](std::string_view suffix) {
        return path.size() >= suffix.size() && path.substr(path.size() - suffix.size()) == suffix;
    };
    return ends_with(".jsonl") || ends_with(".json") ? TableFormat::jsonl : TableFormat::csv;
}

IngestResult ingest_files(const std::string& nodes_path, const std::string& edges_path,
                          const IngestOptions& options) {
    std::ifstream nodes(nodes_path);
    if (!nodes) throw DataError("cannot open nodes file '" + nodes_path + "'");
    std::ifstream edges(edges_path);
    if (!edges) throw DataError("cannot open edges file '" + edges_path + "'");
    return ingest(nodes, format_for_path(nodes_path), edges, options);
}

void export_nodes(const CitationGraph& g, std::ostream& out, TableFormat format) {
    if (format == TableFormat::csv) {
        out << "paper_id,date,author_ids,affiliation_id,country,venue_id,field_ids\n";
        for (const auto& r : g.records()) {
            out << csv::escape(r.paper_id) << ',' << r.date.to_string() << ','
                << csv::escape(csv::join_list(r.author_ids)) << ',' << csv::escape(r.affiliation_id) << ','
                << r.country << ',' << csv::escape(r.venue_id) << ',' << csv::escape(csv::join_list(r.field_ids))
                << '\n';
        }
        return;
    }
    for (const auto& r : g.records()) {
        // ordered_json keeps the column order stable
        nlohmann::ordered_json obj;
        obj["paper_id"] = r.paper_id;
        obj["date"] = r.date.to_string();
        obj["author_ids"] = r.author_ids;
        obj["affiliation_id"] = r.affiliation_id;
        obj["country"] = r.country;
        obj["venue_id"] = r.venue_id;
        obj["field_ids"] = r.field_ids;
        out << obj.dump() << '\n';
    }
}

void export_edges(const CitationGraph& g, std::ostream& out) {
    out << "citing_id,cited_id\n";
    for (const auto& e : g.edges())
        out << csv::escape(g.record(e.citing).paper_id) << ',' << csv::escape(g.record(e.cited).paper_id) << '\n';
}

}  // namespace citemap
