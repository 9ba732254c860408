#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "topicforge/common/dates.hpp"

namespace topicforge::ingest {

struct CommentRecord {
    std::string id;  // index column when present, otherwise the 0-based data row
    Timestamp date;
    std::string text;
    std::string stock_name;
    std::string company_name;

    friend bool operator==(const CommentRecord&, const CommentRecord&) = default;
};

struct Bar {
    Date date;
    double open = 0, high = 0, low = 0, close = 0, adj_close = 0;
    long long volume = 0;
    std::string stock_name;

    friend bool operator==(const Bar&, const Bar&) = default;
};

/// One malformed input row. `row` is the 1-based line number in the file.
struct RowError {
    std::size_t row = 0;
    std::string column;
    std::string message;
};

struct CommentParse {
    std::vector<CommentRecord> records;
    std::vector<RowError> errors;
    std::size_t data_rows = 0;
};

/// Bars grouped per ticker, ascending by date.
struct BarSeries {
    std::map<std::string, std::vector<Bar>> by_ticker;

    const std::vector<Bar>& ticker(const std::string& symbol) const;  // throws InputError if absent
    bool contains(const std::string& symbol) const { return by_ticker.count(symbol) != 0; }
    std::size_t size() const;
};

struct BarParse {
    BarSeries series;
    std::vector<RowError> errors;
};

CommentParse parse_comments(const std::filesystem::path& path);
CommentParse parse_comments_text(std::string_view text);

BarParse parse_bars(const std::filesystem::path& path);
BarParse parse_bars_text(std::string_view text);

/// Strips URLs and @mentions, turns `$NIO` into `NIO` and collapses runs of
/// whitespace. Casing and punctuation are kept.
std::string clean_text(std::string_view raw);

struct AlignedComment {
    std::string id;
    Timestamp posted;
    std::string text;  // cleaned
};

struct TradingDay {
    Date date;
    std::vector<AlignedComment> comments;
};

struct AlignedCorpus {
    std::string ticker;
    std::vector<TradingDay> days;  // only days that received comments, ascending
    std::vector<Bar> bars;
    std::size_t assigned = 0;
    std::size_t dropped_after_last_bar = 0;
    std::size_t dropped_empty = 0;  // empty after cleaning

    /// Comments in day order as records stamped at the start of their
    /// trading day; re-aligning them reproduces the same buckets.
    std::vector<CommentRecord> flatten(std::string_view company = "") const;
    std::size_t comment_count() const;
};

/// Assigns every comment of `ticker` to the bar with the same UTC calendar
/// date, or to the next trading day when that date has no bar.
AlignedCorpus align(const std::vector<CommentRecord>& comments, const BarSeries& bars, const std::string& ticker);

std::string write_comments_csv(const std::vector<CommentRecord>& records);
std::string write_bars_csv(const BarSeries& bars);
std::string write_errors_csv(const std::vector<RowError>& errors);

}  // namespace topicforge::ingest
