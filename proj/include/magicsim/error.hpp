#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace magicsim {

// Base for every failure the toolkit reports. Each subclass corresponds to
// one pipeline stage so the CLI can map it to a distinct exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed JSON; offset is the byte position reported by the reader.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Micro-op text that does not match the Init / inv1 / nor2 productions.
class GrammarError : public Error {
public:
    GrammarError(std::string label, std::string fragment, const std::string& msg)
        : Error((label.empty() ? std::string() : label + ": ") + msg + " near '" + fragment + "'"),
          label_(std::move(label)), fragment_(std::move(fragment)) {}
    const std::string& label() const noexcept { return label_; }
    const std::string& fragment() const noexcept { return fragment_; }

private:
    std::string label_;
    std::string fragment_;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class SimError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& msg)
        : Error(path + ": " + msg), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace magicsim
