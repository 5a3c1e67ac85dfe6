#pragma once

#include <cstdio>
#include <cstring>
#include <string>

namespace chordlift {

// Every number in every output table goes through this: six decimals, and
// negative zero collapsed so reruns can be compared byte for byte.
inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    if (std::strcmp(buf, "-0.000000") == 0) return "0.000000";
    return buf;
}

}  // namespace chordlift
