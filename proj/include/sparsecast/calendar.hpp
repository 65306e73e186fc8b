#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace sparsecast {

/// Calendar month, stored as a flat count so arithmetic is plain integer math.
class Month {
public:
    Month() = default;
    Month(int year, int month) : index_(year * 12 + (month - 1)) {
        if (month < 1 || month > 12) throw std::invalid_argument("month out of range: " + std::to_string(month));
    }

    int year() const { return index_ >= 0 ? index_ / 12 : (index_ - 11) / 12; }
    int month() const { return index_ - year() * 12 + 1; }  // 1..12

    Month operator+(int m) const { Month r; r.index_ = index_ + m; return r; }
    Month operator-(int m) const { return *this + (-m); }
    int operator-(Month other) const { return index_ - other.index_; }
    Month& operator++() { ++index_; return *this; }
    auto operator<=>(const Month&) const = default;

    /// "YYYY-MM"
    std::string str() const;
    static Month parse(const std::string& s);

private:
    int index_ = 0;
};

/// Calendar quarter with the same flat-count layout.
class Quarter {
public:
    Quarter() = default;
    Quarter(int year, int quarter) : index_(year * 4 + (quarter - 1)) {
        if (quarter < 1 || quarter > 4) throw std::invalid_argument("quarter out of range: " + std::to_string(quarter));
    }

    int year() const { return index_ >= 0 ? index_ / 4 : (index_ - 3) / 4; }
    int quarter() const { return index_ - year() * 4 + 1; }  // 1..4

    Quarter operator+(int q) const { Quarter r; r.index_ = index_ + q; return r; }
    Quarter operator-(int q) const { return *this + (-q); }
    int operator-(Quarter other) const { return index_ - other.index_; }
    Quarter& operator++() { ++index_; return *this; }
    auto operator<=>(const Quarter&) const = default;

    Month first_month() const { return Month(year(), (quarter() - 1) * 3 + 1); }
    Month last_month() const { return first_month() + 2; }

    /// "YYYY-Qn"
    std::string str() const;
    static Quarter parse(const std::string& s);

private:
    int index_ = 0;
};

inline Quarter quarter_of(Month m) { return Quarter(m.year(), (m.month() - 1) / 3 + 1); }

/// Position of a month inside its quarter, 1..3.
inline int month_of_quarter(Month m) { return (m.month() - 1) % 3 + 1; }

}  // namespace sparsecast
