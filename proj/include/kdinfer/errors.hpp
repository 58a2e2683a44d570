#pragma once

#include <stdexcept>
#include <string>

namespace kdinfer {

/// Malformed input file: bad token, wrong column count, unknown keyword.
/// Messages carry file coordinates (line/column) where available.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Structurally well-formed input that violates a dataset contract
/// (duplicate ids, id mismatch between files, missing knockdown target, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem-level failure (missing file, unwritable sink).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace kdinfer
