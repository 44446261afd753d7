#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mgl/errors.hpp"

namespace mgl {

/// Report documents use insertion-ordered JSON.
using Report = nlohmann::ordered_json;

namespace detail {

inline std::string format_double(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void dump_json_17(const Report& j, std::ostream& os, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            std::size_t k = 0;
            for (auto it = j.begin(); it != j.end(); ++it, ++k) {
                os << pad_in << nlohmann::json(it.key()).dump() << ": ";
                dump_json_17(it.value(), os, indent, depth + 1);
                os << (k + 1 < j.size() ? ",\n" : "\n");
            }
            os << pad << "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            for (std::size_t k = 0; k < j.size(); ++k) {
                os << pad_in;
                dump_json_17(j[k], os, indent, depth + 1);
                os << (k + 1 < j.size() ? ",\n" : "\n");
            }
            os << pad << "]";
            return;
        }
        case nlohmann::json::value_t::number_float:
            os << format_double(j.get<double>());
            return;
        default:
            os << j.dump();
            return;
    }
}

}  // namespace detail

/// Serializes a report with floating-point values printed to 17
/// significant digits, so reloading reproduces the exact doubles and
/// repeated runs are byte-identical.
inline void write_report(const Report& rep, std::ostream& os, int indent = 2) {
    detail::dump_json_17(rep, os, indent, 0);
    os << "\n";
}

inline std::string report_string(const Report& rep, int indent = 2) {
    std::ostringstream ss;
    write_report(rep, ss, indent);
    return ss.str();
}

}  // namespace mgl
