#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sentistock {

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
// Small and trivially ordered; all I/O is ISO-8601 (YYYY-MM-DD).
class Date {
public:
    Date() = default;

    static Date from_ymd(int year, int month, int day);
    static Date parse(std::string_view iso);  // throws ValidationError

    std::string to_string() const;

    Date plus_days(int n) const { return Date(days_ + n); }
    int days_since_epoch() const { return days_; }

    friend auto operator<=>(const Date&, const Date&) = default;

private:
    explicit Date(std::int32_t days) : days_(days) {}
    std::int32_t days_ = 0;
};

inline int operator-(const Date& a, const Date& b) {
    return a.days_since_epoch() - b.days_since_epoch();
}

}  // namespace sentistock
