#include "conjlab/jsontext.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace conjlab::jsontext {

std::string format_double(double v) {
    if (!std::isfinite(v)) {
        throw std::logic_error("non-finite number is not representable in JSON");
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void append_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

void write(std::string& out, const nlohmann::ordered_json& v) {
    using value_t = nlohmann::ordered_json::value_t;
    switch (v.type()) {
        case value_t::null: out += "null"; break;
        case value_t::boolean: out += v.get<bool>() ? "true" : "false"; break;
        case value_t::number_integer: out += std::to_string(v.get<std::int64_t>()); break;
        case value_t::number_unsigned: out += std::to_string(v.get<std::uint64_t>()); break;
        case value_t::number_float: out += format_double(v.get<double>()); break;
        case value_t::string: append_escaped(out, v.get_ref<const std::string&>()); break;
        case value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& item : v) {
                if (!first) out += ',';
                first = false;
                write(out, item);
            }
            out += ']';
            break;
        }
        case value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ',';
                first = false;
                append_escaped(out, it.key());
                out += ':';
                write(out, it.value());
            }
            out += '}';
            break;
        }
        default:
            throw std::logic_error("unsupported JSON value type");
    }
}

}  // namespace

std::string dump(const nlohmann::ordered_json& value) {
    std::string out;
    write(out, value);
    return out;
}

}  // namespace conjlab::jsontext
