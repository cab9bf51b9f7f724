#include "canonical_json.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ins::detail {

std::string format_decimal(double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("cannot serialize a non-finite number");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", value);
    std::string s = buf;
    while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
    if (s == "-0.0") s = "0.0";
    return s;
}

namespace {

void dump(const nlohmann::json& v, int indent, bool exact, int depth, std::string& out) {
    const bool pretty = indent >= 0;
    auto newline = [&](int d) {
        if (!pretty) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };

    switch (v.type()) {
        case nlohmann::json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            // nlohmann::json objects are std::map backed, hence key-sorted.
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += nlohmann::json(it.key()).dump();
                out += pretty ? ": " : ":";
                dump(it.value(), indent, exact, depth + 1, out);
            }
            newline(depth);
            out += '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const auto& item : v) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                dump(item, indent, exact, depth + 1, out);
            }
            newline(depth);
            out += ']';
            return;
        }
        case nlohmann::json::value_t::number_float:
            out += exact ? v.dump() : format_decimal(v.get<double>());
            return;
        default:
            out += v.dump();
            return;
    }
}

}  // namespace

std::string canonical_dump(const nlohmann::json& value, int indent, bool exact) {
    std::string out;
    dump(value, indent, exact, 0, out);
    return out;
}

}  // namespace ins::detail
