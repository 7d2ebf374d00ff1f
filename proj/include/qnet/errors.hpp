#pragma once

#include <stdexcept>
#include <string>

namespace qnet {

// Base class for all qnet errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- topology / path errors ---------------------------------------------

class EmptyTopology : public Error {
public:
    EmptyTopology() : Error("topology: column list is empty") {}
};

class InvalidColumnSize : public Error {
public:
    explicit InvalidColumnSize(const std::string& what) : Error(what) {}
};

class OverflowError : public Error {
public:
    explicit OverflowError(const std::string& what) : Error(what) {}
};

class PathTopologyMismatch : public Error {
public:
    explicit PathTopologyMismatch(const std::string& what) : Error(what) {}
};

class TopologyMismatch : public Error {
public:
    explicit TopologyMismatch(const std::string& what) : Error(what) {}
};

// --- model errors ---------------------------------------------------------

class ModelSpecError : public Error {
public:
    explicit ModelSpecError(const std::string& what) : Error(what) {}
};

// --- estimate / inference errors -------------------------------------------

// Node index outside the column (a structural placeholder or out of range).
class NodeAbsent : public Error {
public:
    explicit NodeAbsent(const std::string& what) : Error(what) {}
};

// Node exists but no observation passed through it; its 0 entry is a
// placeholder, not an estimate, so comparisons refuse it.
class NodeUnvisited : public Error {
public:
    explicit NodeUnvisited(const std::string& what) : Error(what) {}
};

class InsufficientData : public Error {
public:
    explicit InsufficientData(const std::string& what) : Error(what) {}
};

class DegenerateVariance : public Error {
public:
    explicit DegenerateVariance(const std::string& what) : Error(what) {}
};

class InvalidPValue : public Error {
public:
    explicit InvalidPValue(const std::string& what) : Error(what) {}
};

class InvalidAlpha : public Error {
public:
    explicit InvalidAlpha(const std::string& what) : Error(what) {}
};

// --- I/O errors -------------------------------------------------------------

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class IndexOutOfRange : public Error {
public:
    explicit IndexOutOfRange(const std::string& what) : Error(what) {}
};

class NonFiniteQuality : public Error {
public:
    explicit NonFiniteQuality(const std::string& what) : Error(what) {}
};

class EmptyDataset : public Error {
public:
    EmptyDataset() : Error("dataset has no observation rows") {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace qnet
