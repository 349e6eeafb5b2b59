#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

namespace perclab {

// Nonnegative rational num/den kept in lowest terms.
class Ratio {
public:
    constexpr Ratio() = default;
    Ratio(std::int64_t num, std::int64_t den);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool is_zero() const { return num_ == 0; }

    Ratio times(std::int64_t m) const { return Ratio(num_ * m, den_); }

    std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }
    static Ratio parse(const std::string& text);

    friend bool operator==(const Ratio& a, const Ratio& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
        const auto lhs = static_cast<__int128>(a.num_) * b.den_;
        const auto rhs = static_cast<__int128>(b.num_) * a.den_;
        return lhs <=> rhs;
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace perclab
