#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kbqa {

// Base for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data: KB files, JSONL datasets, configs.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

// S-expression syntax error; offset is a byte position into the input.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Runtime failure while evaluating a logical form.
class ExecError : public Error {
public:
    enum class Kind { TypeError, Capacity };

    ExecError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// Command-line misuse; maps to exit code 1.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(what) {}
};

}  // namespace kbqa
