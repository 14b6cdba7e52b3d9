#include "citemap/csv.hpp"

#include <istream>

#include "citemap/common.hpp"

namespace citemap::csv {

std::vector<std::string> split(std::string_view line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string field;
    std::size_t i = 0;
    for (;;) {
        field.clear();
        if (i < line.size() && line[i] == '"') {
            ++i;
            for (;;) {
                if (i >= line.size()) throw DataError("unterminated quoted field", line_no);
                if (line[i] == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                field.push_back(line[i++]);
            }
            if (i < line.size() && line[i] != ',') throw DataError("text after closing quote", line_no);
        } else {
            while (i < line.size() && line[i] != ',') field.push_back(line[i++]);
        }
        out.push_back(field);
        if (i >= line.size()) break;
        ++i;  // comma
    }
    return out;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

bool Reader::next(std::vector<std::string>& fields) {
    while (std::getline(in_, buffer_)) {
        ++line_;
        if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
        if (buffer_.empty()) continue;
        fields = split(buffer_, line_);
        return true;
    }
    return false;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    if (text.empty()) return out;
    std::size_t start = 0;
    for (;;) {
        const auto bar = text.find('|', start);
        out.emplace_back(text.substr(start, bar - start));
        if (bar == std::string_view::npos) break;
        start = bar + 1;
    }
    return out;
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out.push_back('|');
        out += items[i];
    }
    return out;
}

}  // namespace citemap::csv
