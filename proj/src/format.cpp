#include "ppscan/format.hpp"

#include <cmath>
#include <cstdio>

namespace ppscan {

std::int64_t to_cents(double value) {
    return static_cast<std::int64_t>(std::floor(value * 100.0 + 0.5));
}

std::string cents_to_string(std::int64_t cents) {
    bool neg = cents < 0;
    std::int64_t a = neg ? -cents : cents;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", neg ? "-" : "",
                  static_cast<long long>(a / 100), static_cast<long long>(a % 100));
    return buf;
}

std::string format_2dp(double value) { return cents_to_string(to_cents(value)); }

std::string format_delta(std::int64_t delta_cents) {
    if (delta_cents > 0) return "+" + cents_to_string(delta_cents);
    return cents_to_string(delta_cents);
}

std::string format_fixed(double value, int decimals) {
    if (decimals <= 0) {
        auto v = static_cast<std::int64_t>(std::floor(value + 0.5));
        return std::to_string(v);
    }
    double scale = 1.0;
    for (int i = 0; i < decimals; ++i) scale *= 10.0;
    bool neg = value < 0;
    auto scaled = static_cast<std::int64_t>(std::floor((neg ? -value : value) * scale + 0.5));
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s%lld.%0*lld", neg && scaled != 0 ? "-" : "",
                  static_cast<long long>(scaled / static_cast<std::int64_t>(scale)), decimals,
                  static_cast<long long>(scaled % static_cast<std::int64_t>(scale)));
    return buf;
}

std::string with_thousands(const std::string& number) {
    std::size_t start = number.empty() || (number[0] != '-' && number[0] != '+') ? 0 : 1;
    std::size_t end = number.find('.');
    if (end == std::string::npos) end = number.size();
    std::string out = number.substr(0, start);
    std::size_t digits = end - start;
    for (std::size_t i = start; i < end; ++i) {
        out += number[i];
        std::size_t remaining = digits - (i - start) - 1;
        if (remaining > 0 && remaining % 3 == 0) out += ',';
    }
    out += number.substr(end);
    return out;
}

std::string csv_escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace ppscan
