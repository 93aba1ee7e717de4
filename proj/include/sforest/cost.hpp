#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sforest {

using Length = std::int64_t;

// Nonnegative integer length with a distinct infinity value.
class Cost {
public:
    constexpr Cost() = default;
    constexpr Cost(Length v) : value_(v) {}  // NOLINT(implicit)

    static constexpr Cost infinity() {
        Cost c;
        c.infinite_ = true;
        return c;
    }

    constexpr bool is_infinite() const { return infinite_; }
    constexpr bool is_finite() const { return !infinite_; }

    Length value() const {
        if (infinite_) throw std::logic_error("value() on infinite cost");
        return value_;
    }

    constexpr Cost operator+(Cost o) const {
        if (infinite_ || o.infinite_) return infinity();
        return Cost(value_ + o.value_);
    }
    constexpr Cost& operator+=(Cost o) { return *this = *this + o; }

    constexpr bool operator==(const Cost& o) const {
        if (infinite_ || o.infinite_) return infinite_ == o.infinite_;
        return value_ == o.value_;
    }
    constexpr std::strong_ordering operator<=>(const Cost& o) const {
        if (infinite_ && o.infinite_) return std::strong_ordering::equal;
        if (infinite_) return std::strong_ordering::greater;
        if (o.infinite_) return std::strong_ordering::less;
        return value_ <=> o.value_;
    }

    std::string to_string() const { return infinite_ ? "inf" : std::to_string(value_); }

private:
    Length value_ = 0;
    bool infinite_ = false;
};

inline Cost min(Cost a, Cost b) { return b < a ? b : a; }

inline std::ostream& operator<<(std::ostream& os, const Cost& c) { return os << c.to_string(); }

}  // namespace sforest
