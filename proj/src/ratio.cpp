#include "perclab/ratio.hpp"

#include "perclab/errors.hpp"

namespace perclab {

Ratio::Ratio(std::int64_t num, std::int64_t den) {
    if (den <= 0 || num < 0) throw DomainError("ratio needs num >= 0 and den > 0");
    const std::int64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

Ratio Ratio::parse(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Ratio(std::stoll(text), 1);
        return Ratio(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    } catch (const std::logic_error&) {
        throw ConfigError("malformed ratio '" + text + "'");
    }
}

}  // namespace perclab
