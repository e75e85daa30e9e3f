#include "ehrvec/date.hpp"

#include <chrono>
#include <cstdio>

namespace ehr {

namespace chr = std::chrono;

std::optional<Date> Date::from_ymd(int year, int month, int day) {
    chr::year_month_day ymd{chr::year{year}, chr::month{unsigned(month)},
                            chr::day{unsigned(day)}};
    if (!ymd.ok()) return std::nullopt;
    auto sd = chr::sys_days{ymd};
    return Date{int(sd.time_since_epoch().count())};
}

std::optional<Date> Date::parse(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    for (size_t i = 0; i < 10; ++i) {
        if (i == 4 || i == 7) continue;
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
    }
    auto num = [&](size_t pos, size_t len) {
        int v = 0;
        for (size_t i = 0; i < len; ++i) v = v * 10 + (s[pos + i] - '0');
        return v;
    };
    return from_ymd(num(0, 4), num(5, 2), num(8, 2));
}

std::string Date::to_string() const {
    auto sd = chr::sys_days{chr::days{days}};
    chr::year_month_day ymd{sd};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
    return buf;
}

int age_in_years(Date birth, Date d) {
    auto b = chr::year_month_day{chr::sys_days{chr::days{birth.days}}};
    auto t = chr::year_month_day{chr::sys_days{chr::days{d.days}}};
    int age = int(t.year()) - int(b.year());
    if (t.month() < b.month() ||
        (t.month() == b.month() && t.day() < b.day()))
        --age;
    return age;
}

}  // namespace ehr
