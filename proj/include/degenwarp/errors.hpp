#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace degenwarp {

// Base of everything the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(const std::string& name, std::size_t offset)
        : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset)),
          name_(name), offset_(offset) {}
    const std::string& name() const noexcept { return name_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string name_;
    std::size_t offset_;
};

// Division by an exact zero during evaluation.
class DomainError : public Error {
public:
    using Error::Error;
};

// A covector has a component outside the radical-annihilator, so the
// covariant contraction is undefined.
class NotInAnnihilator : public Error {
public:
    explicit NotInAnnihilator(double residual)
        : Error("covector not in the radical-annihilator (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class DegenerateNoExtension : public Error {
public:
    DegenerateNoExtension()
        : Error("metric is degenerate here and neither diagonal roots nor a probe direction were given") {}
};

class DegeneratePlane : public Error {
public:
    DegeneratePlane() : Error("coordinate plane is degenerate") {}
};

class DegenerateMetric : public Error {
public:
    DegenerateMetric() : Error("operation requires a non-degenerate metric") {}
};

class NameClash : public Error {
public:
    explicit NameClash(const std::string& name) : Error("coordinate name clash: '" + name + "'") {}
};

class ParityError : public Error {
public:
    using Error::Error;
};

class ModelError : public Error {
public:
    using Error::Error;
};

// Malformed metric spec document; `path` is a JSON pointer to the offending key.
class SpecError : public Error {
public:
    SpecError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace degenwarp
