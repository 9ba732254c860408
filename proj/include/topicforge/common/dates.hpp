#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace topicforge {

/// Calendar date as days since 1970-01-01.
struct Date {
    std::int32_t days = 0;

    static std::optional<Date> parse(std::string_view ymd);  // YYYY-MM-DD
    static Date from_ymd(int year, unsigned month, unsigned day);
    std::string str() const;
    int weekday() const;  // 0 = Monday .. 6 = Sunday

    friend auto operator<=>(const Date&, const Date&) = default;
};

/// UTC instant at second resolution.
struct Timestamp {
    std::int64_t seconds = 0;

    /// Accepts `YYYY-MM-DD HH:MM:SS+00:00` (also `Z`, a `T` separator, or any
    /// `+HH:MM` / `-HH:MM` offset, normalized to UTC).
    static std::optional<Timestamp> parse(std::string_view text);
    std::string str() const;  // canonical `YYYY-MM-DD HH:MM:SS+00:00`
    Date date() const;

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

}  // namespace topicforge
