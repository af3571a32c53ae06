#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace arcfit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Geometry that admits no unique answer (collinear points, coincident points, ...).
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

class DegenerateFit : public Error {
public:
    using Error::Error;
};

/// The algebraic solution describes a line or an imaginary circle.
class DegenerateCircle : public DegenerateFit {
public:
    using DegenerateFit::DegenerateFit;
};

class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class InvalidSpec : public Error {
public:
    explicit InvalidSpec(const std::string& what) : Error("invalid-spec: " + what) {}
};

class EmptyScore : public Error {
public:
    using Error::Error;
};

}  // namespace arcfit
