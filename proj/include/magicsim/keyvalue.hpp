#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace magicsim {

// One `name = value` assignment from a TOML-like document. Sections are
// introduced by `[name]` lines; `#` and `;` start comments.
struct KeyValue {
    std::string section;
    std::string key;
    std::string value;
    std::size_t line = 0;
};

std::vector<KeyValue> parse_key_values(std::string_view text, std::string_view origin = "config");

// Strict numeric conversion; throws ConfigError naming origin and line.
double to_double(const KeyValue& kv, std::string_view origin = "config");

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace magicsim
