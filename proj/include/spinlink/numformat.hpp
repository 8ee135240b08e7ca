#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace spinlink {

// All numeric text output goes through here: locale-independent, fixed at
// 12 significant digits, so identical inputs give byte-identical files.
inline std::string format_sig12(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v,
                             std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

inline std::string format_u64(std::uint64_t v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace spinlink
