#pragma once

#include <cstdio>
#include <string>

namespace anaflow {

/// Fixed 17-significant-digit formatting; the one float format used in
/// printed expressions, JSON reports, and CSV tables.
inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace anaflow
