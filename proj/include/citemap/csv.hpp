#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace citemap::csv {

/// Splits one RFC 4180 record. Quoted fields may contain commas and doubled
/// quotes but not line breaks. Throws DataError on an unterminated quote.
std::vector<std::string> split(std::string_view line, std::size_t line_no = 0);

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

/// Reads lines, strips a trailing '\r', skips blank lines and tracks 1-based line numbers.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    bool next(std::vector<std::string>& fields);
    std::size_t line() const noexcept { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
    std::string buffer_;
};

/// Splits on '|', returning an empty list for an empty string.
std::vector<std::string> split_list(std::string_view text);
std::string join_list(const std::vector<std::string>& items);

}  // namespace citemap::csv
