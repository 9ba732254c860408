#include "topicforge/common/dates.hpp"

#include <chrono>
#include <cstdio>

namespace topicforge {

namespace {

bool digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
    if (pos + n > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

}  // namespace

std::optional<Date> Date::parse(std::string_view s) {
    int y = 0, m = 0, d = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!digits(s, 0, 4, y) || !digits(s, 5, 2, m) || !digits(s, 8, 2, d)) return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    return Date{static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

std::string Date::str() const {
    std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

int Date::weekday() const {
    // 1970-01-01 was a Thursday
    int w = static_cast<int>((static_cast<std::int64_t>(days) + 3) % 7);
    return w < 0 ? w + 7 : w;
}

std::optional<Timestamp> Timestamp::parse(std::string_view s) {
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    if (s.size() < 19) return std::nullopt;
    auto date = Date::parse(s.substr(0, 10));
    if (!date || (s[10] != ' ' && s[10] != 'T') || s[13] != ':' || s[16] != ':') return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (!digits(s, 11, 2, hh) || !digits(s, 14, 2, mm) || !digits(s, 17, 2, ss)) return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    std::int64_t offset = 0;
    std::string_view tz = s.substr(19);
    if (tz == "Z" || tz.empty()) {
        offset = 0;
    } else if (tz.size() == 6 && (tz[0] == '+' || tz[0] == '-') && tz[3] == ':') {
        int oh = 0, om = 0;
        if (!digits(tz, 1, 2, oh) || !digits(tz, 4, 2, om)) return std::nullopt;
        offset = (oh * 3600 + om * 60) * (tz[0] == '-' ? -1 : 1);
    } else {
        return std::nullopt;
    }
    std::int64_t secs = static_cast<std::int64_t>(date->days) * 86400 + hh * 3600 + mm * 60 + ss - offset;
    return Timestamp{secs};
}

Date Timestamp::date() const {
    std::int64_t d = seconds / 86400;
    if (seconds % 86400 < 0) --d;
    return Date{static_cast<std::int32_t>(d)};
}

std::string Timestamp::str() const {
    Date d = date();
    std::int64_t rem = seconds - static_cast<std::int64_t>(d.days) * 86400;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s %02d:%02d:%02d+00:00", d.str().c_str(), static_cast<int>(rem / 3600),
                  static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
    return buf;
}

}  // namespace topicforge
