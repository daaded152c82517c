/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EMSCOPE_JSON_UTIL_HPP
#define EMSCOPE_JSON_UTIL_HPP

#include <cstdint>
#include <string>

#include "json.hpp"

#include "emscope/error.hpp"

namespace emscope::detail {

// Seeds travel as decimal strings; plain JSON integers would silently lose
// bits above 2^53 in other tooling.
inline std::uint64_t parse_seed(const nlohmann::json& v, const char* field) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        try {
            std::size_t pos = 0;
            const std::uint64_t out = std::stoull(s, &pos, 10);
            if (pos == s.size()) return out;
        } catch (...) {
        }
        throw Error("InvalidConfig", std::string(field) + " is not a decimal 64-bit integer");
    }
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw Error("InvalidConfig", std::string(field) + " must be a decimal string");
}

}  // namespace emscope::detail

#endif
