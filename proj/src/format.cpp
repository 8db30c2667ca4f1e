#include "magicsim/format.hpp"

#include <cmath>
#include <cstdio>

namespace magicsim {

std::string spice_number(double value) {
    if (value == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::string pwl_number(double value) {
    std::string s = spice_number(value);
    if (s.find_first_of(".eEin") == std::string::npos) s += ".0";
    return s;
}

std::string scaled_number(double value) {
    struct Scale {
        double factor;
        const char* suffix;
    };
    static constexpr Scale scales[] = {{1e12, "T"}, {1e9, "G"}, {1e6, "M"}, {1e3, "K"}};
    const double mag = std::fabs(value);
    for (const auto& s : scales) {
        if (mag >= s.factor) return spice_number(value / s.factor) + s.suffix;
    }
    return pwl_number(value);
}

}  // namespace magicsim
