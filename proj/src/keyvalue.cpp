#include "magicsim/keyvalue.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "magicsim/error.hpp"

namespace magicsim {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::string_view text, std::string_view origin) {
    std::vector<KeyValue> out;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": expected 'name = value'");
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty())
            throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
        out.push_back({section, std::string(key), std::string(value), line_no});
        if (end == text.size()) break;
    }
    return out;
}

double to_double(const KeyValue& kv, std::string_view origin) {
    const char* begin = kv.value.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (kv.value.empty() || end != begin + kv.value.size())
        throw ConfigError(std::string(origin) + ":" + std::to_string(kv.line) + ": '" + kv.key +
                          "' expects a number, got '" + kv.value + "'");
    return v;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError(path, "write failed");
}

}  // namespace magicsim
