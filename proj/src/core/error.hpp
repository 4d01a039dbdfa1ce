#pragma once

#include <stdexcept>
#include <string>

namespace selflearn {

// Base error for everything the toolkit can throw.
class SlfError : public std::runtime_error {
public:
    explicit SlfError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: config keys, file formats, argument combinations.
// Maps to exit code 1 at the CLI; everything else maps to 2.
class ValidationError : public SlfError {
public:
    explicit ValidationError(const std::string& msg) : SlfError(msg) {}
};

} // namespace selflearn
