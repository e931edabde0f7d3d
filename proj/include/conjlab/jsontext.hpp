#pragma once

#include <string>

#include "json.hpp"

namespace conjlab::jsontext {

// Serializes a JSON value to a single line. Doubles are printed with
// "%.17g" (17 significant digits, round-trip exact); nlohmann's own dump
// would use shortest-representation formatting instead, which the on-disk
// record formats here do not use. Object key order is preserved, so output
// bytes are stable across runs.
std::string dump(const nlohmann::ordered_json& value);

// "%.17g" rendering of one double. Throws on NaN/infinity.
std::string format_double(double v);

}  // namespace conjlab::jsontext
