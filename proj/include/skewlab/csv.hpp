#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace skewlab {

/// Shortest round-trip decimal rendering; used everywhere a double reaches
/// an output file so reruns are byte-identical.
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    // trim to the shortest representation that still round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof probe, "%.*g", prec, x);
        double back = 0.0;
        std::sscanf(probe, "%lf", &back);
        if (back == x) return probe;
    }
    return buf;
}

inline std::string fmt(int x) { return std::to_string(x); }
inline std::string fmt(long long x) { return std::to_string(x); }

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace skewlab
