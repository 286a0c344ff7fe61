#pragma once

#include <stdexcept>
#include <string>

namespace evl {

enum class ErrorKind {
    PrecisionExhausted,
    CapExceeded,
    LevelOutOfRange,
    NoSolution,
    GuardExhausted,
    DegenerateSample,
    Undefined,
    BadConfig,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::GuardExhausted: return "GuardExhausted";
    case ErrorKind::DegenerateSample: return "DegenerateSample";
    case ErrorKind::Undefined: return "Undefined";
    case ErrorKind::BadConfig: return "BadConfig";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Thrown when a comparison of enclosures stays inconclusive at the current depth.
struct PrecisionExhausted : Error {
    explicit PrecisionExhausted(const std::string& what) : Error(ErrorKind::PrecisionExhausted, what) {}
};

struct CapExceeded : Error {
    explicit CapExceeded(const std::string& what) : Error(ErrorKind::CapExceeded, what) {}
};

struct LevelOutOfRange : Error {
    explicit LevelOutOfRange(const std::string& what) : Error(ErrorKind::LevelOutOfRange, what) {}
};

struct NoSolution : Error {
    explicit NoSolution(const std::string& what) : Error(ErrorKind::NoSolution, what) {}
};

struct GuardExhausted : Error {
    explicit GuardExhausted(const std::string& what) : Error(ErrorKind::GuardExhausted, what) {}
};

struct DegenerateSample : Error {
    explicit DegenerateSample(const std::string& what) : Error(ErrorKind::DegenerateSample, what) {}
};

struct Undefined : Error {
    explicit Undefined(const std::string& what) : Error(ErrorKind::Undefined, what) {}
};

struct BadConfig : Error {
    explicit BadConfig(const std::string& what) : Error(ErrorKind::BadConfig, what) {}
};

} // namespace evl
