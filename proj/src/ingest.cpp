#include "topicforge/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/error.hpp"

namespace topicforge::ingest {

namespace {

bool valid_ticker(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) || std::isupper(c); });
}

std::string trimmed(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::optional<std::size_t> index_column(const csv::Header& h) {
    for (const char* name : {"", "id", "index", "Unnamed: 0"})
        if (auto i = h.find(name)) return i;
    return std::nullopt;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    return true;
}

}  // namespace

const std::vector<Bar>& BarSeries::ticker(const std::string& symbol) const {
    auto it = by_ticker.find(symbol);
    if (it == by_ticker.end()) throw InputError("ticker '" + symbol + "' not present in bar data");
    return it->second;
}

std::size_t BarSeries::size() const {
    std::size_t n = 0;
    for (const auto& [_, v] : by_ticker) n += v.size();
    return n;
}

CommentParse parse_comments(const std::filesystem::path& path) { return parse_comments_text(csv::read_file(path)); }

CommentParse parse_comments_text(std::string_view text) {
    auto rows = csv::parse(text);
    if (rows.empty()) throw InputError("comments file has no header row");
    csv::Header h(rows.front());
    const auto c_date = h.require("Date");
    const auto c_text = h.require("Tweet");
    const auto c_stock = h.require("Stock Name");
    const auto c_company = h.require("Company Name");
    const auto c_id = index_column(h);

    CommentParse out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        ++out.data_rows;
        if (row.fields.size() != h.size()) {
            out.errors.push_back({row.line, "", "expected " + std::to_string(h.size()) + " fields, got " +
                                                    std::to_string(row.fields.size())});
            continue;
        }
        auto ts = Timestamp::parse(row.fields[c_date]);
        if (!ts) {
            out.errors.push_back({row.line, "Date", "unparseable timestamp '" + row.fields[c_date] + "'"});
            continue;
        }
        std::string stock = trimmed(row.fields[c_stock]);
        if (!valid_ticker(stock)) {
            out.errors.push_back({row.line, "Stock Name", "invalid ticker '" + stock + "'"});
            continue;
        }
        CommentRecord rec;
        rec.id = c_id ? trimmed(row.fields[*c_id]) : std::to_string(out.data_rows - 1);
        if (rec.id.empty()) rec.id = std::to_string(out.data_rows - 1);
        rec.date = *ts;
        rec.text = row.fields[c_text];
        rec.stock_name = std::move(stock);
        rec.company_name = row.fields[c_company];
        out.records.push_back(std::move(rec));
    }
    return out;
}

BarParse parse_bars(const std::filesystem::path& path) { return parse_bars_text(csv::read_file(path)); }

BarParse parse_bars_text(std::string_view text) {
    auto rows = csv::parse(text);
    if (rows.empty()) throw InputError("bars file has no header row");
    csv::Header h(rows.front());
    const std::size_t c_date = h.require("Date");
    const std::size_t c_open = h.require("Open");
    const std::size_t c_high = h.require("High");
    const std::size_t c_low = h.require("Low");
    const std::size_t c_close = h.require("Close");
    const std::size_t c_adj = h.require("Adj Close");
    const std::size_t c_vol = h.require("Volume");
    const std::size_t c_stock = h.require("Stock Name");

    BarParse out;
    std::map<std::string, std::map<Date, std::size_t>> seen;  // ticker -> date -> first row
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        auto fail = [&](std::string column, std::string msg) {
            out.errors.push_back({row.line, std::move(column), std::move(msg)});
        };
        if (row.fields.size() != h.size()) {
            fail("", "expected " + std::to_string(h.size()) + " fields, got " + std::to_string(row.fields.size()));
            continue;
        }
        Bar bar;
        auto date = Date::parse(trimmed(row.fields[c_date]));
        if (!date) {
            fail("Date", "unparseable date '" + row.fields[c_date] + "'");
            continue;
        }
        bar.date = *date;
        bool ok = true;
        const std::pair<std::size_t, double*> prices[] = {
            {c_open, &bar.open}, {c_high, &bar.high}, {c_low, &bar.low}, {c_close, &bar.close}, {c_adj, &bar.adj_close}};
        for (auto [col, dst] : prices) {
            auto v = csv::parse_double(row.fields[col]);
            if (!v || !std::isfinite(*v)) {
                fail(h.size() > col ? rows.front().fields[col] : "", "non-numeric price '" + row.fields[col] + "'");
                ok = false;
                break;
            }
            *dst = *v;
        }
        if (!ok) continue;
        auto vol = csv::parse_int(row.fields[c_vol]);
        if (!vol) {
            auto vd = csv::parse_double(row.fields[c_vol]);
            if (vd && std::isfinite(*vd) && *vd == std::floor(*vd)) vol = static_cast<long long>(*vd);
        }
        if (!vol || *vol < 0) {
            fail("Volume", "volume must be a non-negative integer, got '" + row.fields[c_vol] + "'");
            continue;
        }
        bar.volume = *vol;
        bar.stock_name = trimmed(row.fields[c_stock]);
        if (!valid_ticker(bar.stock_name)) {
            fail("Stock Name", "invalid ticker '" + bar.stock_name + "'");
            continue;
        }
        if (bar.high < bar.low) {
            fail("High", "high < low");
            continue;
        }
        if (bar.low > std::min(bar.open, bar.close) || bar.high < std::max(bar.open, bar.close)) {
            fail("Low", "open/close outside the [low, high] range");
            continue;
        }
        auto& dates = seen[bar.stock_name];
        if (auto it = dates.find(bar.date); it != dates.end()) {
            fail("Date", "duplicate bar for " + bar.stock_name + " on " + bar.date.str() + " (first at line " +
                             std::to_string(it->second) + ")");
            continue;
        }
        dates.emplace(bar.date, row.line);
        out.series.by_ticker[bar.stock_name].push_back(std::move(bar));
    }
    for (auto& [_, bars] : out.series.by_ticker)
        std::sort(bars.begin(), bars.end(), [](const Bar& a, const Bar& b) { return a.date < b.date; });
    return out;
}

std::string clean_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    auto emit = [&](char c) {
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    };

    std::size_t i = 0;
    while (i < raw.size()) {
        const char c = raw[i];
        if (is_space(c)) {
            pending_space = true;
            ++i;
            continue;
        }
        const bool at_word_start = i == 0 || !is_word(raw[i - 1]);
        std::string_view rest = raw.substr(i);
        if (at_word_start &&
            (starts_with_ci(rest, "http://") || starts_with_ci(rest, "https://") || starts_with_ci(rest, "www."))) {
            while (i < raw.size() && !is_space(raw[i])) ++i;
            pending_space = true;
            continue;
        }
        if (c == '@' && at_word_start && i + 1 < raw.size() && is_word(raw[i + 1])) {
            ++i;
            while (i < raw.size() && is_word(raw[i])) ++i;
            pending_space = true;
            continue;
        }
        if (c == '$' && i + 1 < raw.size() && std::isalpha(static_cast<unsigned char>(raw[i + 1]))) {
            ++i;  // keep the bare symbol
            continue;
        }
        emit(c);
        ++i;
    }
    return out;
}

AlignedCorpus align(const std::vector<CommentRecord>& comments, const BarSeries& bars, const std::string& ticker) {
    AlignedCorpus out;
    out.ticker = ticker;
    out.bars = bars.ticker(ticker);
    if (out.bars.empty()) throw InputError("no bars for ticker '" + ticker + "'");

    bool any = false;
    std::vector<std::vector<AlignedComment>> buckets(out.bars.size());
    for (const auto& c : comments) {
        if (c.stock_name != ticker) continue;
        any = true;
        std::string text = clean_text(c.text);
        if (text.empty()) {
            ++out.dropped_empty;
            continue;
        }
        const Date day = c.date.date();
        auto it = std::lower_bound(out.bars.begin(), out.bars.end(), day,
                                   [](const Bar& b, const Date& d) { return b.date < d; });
        if (it == out.bars.end()) {
            ++out.dropped_after_last_bar;
            continue;
        }
        buckets[static_cast<std::size_t>(it - out.bars.begin())].push_back({c.id, c.date, std::move(text)});
        ++out.assigned;
    }
    if (!comments.empty() && !any) throw InputError("ticker '" + ticker + "' not present in comment data");

    for (std::size_t i = 0; i < buckets.size(); ++i) {
        if (buckets[i].empty()) continue;
        std::stable_sort(buckets[i].begin(), buckets[i].end(),
                         [](const AlignedComment& a, const AlignedComment& b) { return a.posted < b.posted; });
        out.days.push_back({out.bars[i].date, std::move(buckets[i])});
    }
    return out;
}

std::vector<CommentRecord> AlignedCorpus::flatten(std::string_view company) const {
    std::vector<CommentRecord> out;
    for (const auto& day : days) {
        for (const auto& c : day.comments) {
            out.push_back({c.id, Timestamp{static_cast<std::int64_t>(day.date.days) * 86400}, c.text, ticker,
                           std::string(company)});
        }
    }
    return out;
}

std::size_t AlignedCorpus::comment_count() const {
    std::size_t n = 0;
    for (const auto& d : days) n += d.comments.size();
    return n;
}

std::string write_comments_csv(const std::vector<CommentRecord>& records) {
    std::string out = "id,Date,Tweet,Stock Name,Company Name\n";
    for (const auto& r : records)
        out += csv::join({r.id, r.date.str(), r.text, r.stock_name, r.company_name}) + "\n";
    return out;
}

std::string write_bars_csv(const BarSeries& bars) {
    std::string out = "Date,Open,High,Low,Close,Adj Close,Volume,Stock Name\n";
    for (const auto& [ticker, series] : bars.by_ticker) {
        for (const auto& b : series) {
            out += csv::join({b.date.str(), csv::format_double(b.open), csv::format_double(b.high),
                              csv::format_double(b.low), csv::format_double(b.close),
                              csv::format_double(b.adj_close), std::to_string(b.volume), ticker}) +
                   "\n";
        }
    }
    return out;
}

std::string write_errors_csv(const std::vector<RowError>& errors) {
    std::string out = "row,column,message\n";
    for (const auto& e : errors) out += csv::join({std::to_string(e.row), e.column, e.message}) + "\n";
    return out;
}

}  // namespace topicforge::ingest
