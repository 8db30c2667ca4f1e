#pragma once

#include <string>

namespace magicsim {

// Shortest "%g"-style rendering with up to 12 significant digits:
// 2 -> "2", 2.4e-08 -> "2.4e-08", 1e-12 -> "1e-12".
std::string spice_number(double value);

// Like spice_number but integral mantissas keep a trailing ".0"
// (0 -> "0.0", 2 -> "2.0"), the form used in PWL files.
std::string pwl_number(double value);

// Spectre scale-suffix form for resistances: 1e12 -> "1T", 1e6 -> "1M",
// 1.0 -> "1.0". Values below 1k fall back to pwl_number.
std::string scaled_number(double value);

}  // namespace magicsim
