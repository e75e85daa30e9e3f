#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace ehr {

// Calendar date at day resolution, stored as days since 1970-01-01.
struct Date {
    int days = 0;

    auto operator<=>(const Date&) const = default;

    Date plus_days(int n) const { return Date{days + n}; }
    int operator-(const Date& o) const { return days - o.days; }

    std::string to_string() const;  // "YYYY-MM-DD"

    static std::optional<Date> from_ymd(int year, int month, int day);
    // Parses "YYYY-MM-DD"; rejects malformed strings and invalid calendar dates.
    static std::optional<Date> parse(std::string_view s);
};

// Completed years between birth and d (negative if d precedes birth).
int age_in_years(Date birth, Date d);

}  // namespace ehr
