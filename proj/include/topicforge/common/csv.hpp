#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace topicforge::csv {

struct Record {
    std::size_t line = 0;  // 1-based line where the record starts
    std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields may hold commas, doubled quotes and
/// newlines. CRLF and LF line endings are both accepted. A UTF-8 BOM at the
/// start of the input is skipped.
std::vector<Record> parse(std::string_view text);

std::string read_file(const std::filesystem::path& path);
std::vector<Record> read(const std::filesystem::path& path);

/// Column lookup over a header record.
class Header {
public:
    explicit Header(const Record& header);
    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t require(std::string_view name) const;  // throws InputError
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
};

std::string quote(std::string_view field);
std::string join(const std::vector<std::string>& fields);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace topicforge::csv
