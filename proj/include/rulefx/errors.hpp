#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rulefx {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MissingFile : public Error {
public:
    explicit MissingFile(const std::string& path) : Error("missing file: " + path) {}
};

class MalformedRow : public Error {
public:
    MalformedRow(long line, const std::string& detail)
        : Error("line " + std::to_string(line) + ": malformed row: " + detail), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class NonMonotonicTimestamp : public Error {
public:
    explicit NonMonotonicTimestamp(long line)
        : Error("line " + std::to_string(line) + ": timestamp not increasing"), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class InvariantViolation : public Error {
public:
    InvariantViolation(long line, const std::string& detail)
        : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class SeriesTooShort : public Error {
public:
    explicit SeriesTooShort(const std::string& what = "series too short") : Error(what) {}
};

class WindowExceedsSeries : public Error {
public:
    WindowExceedsSeries(std::ptrdiff_t window, std::ptrdiff_t length)
        : Error("window " + std::to_string(window) + " exceeds series length " +
                std::to_string(length)) {}
};

class InvalidWindowOrder : public Error {
public:
    explicit InvalidWindowOrder(const std::string& what) : Error(what) {}
};

class LengthMismatch : public Error {
public:
    LengthMismatch(std::ptrdiff_t a, std::ptrdiff_t b)
        : Error("series lengths differ: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class ThresholdOrderViolation : public Error {
public:
    ThresholdOrderViolation(double hi, double lo)
        : Error("threshold_hi " + std::to_string(hi) + " must exceed threshold_lo " +
                std::to_string(lo)) {}
};

class BandOrderViolation : public Error {
public:
    explicit BandOrderViolation(std::ptrdiff_t index)
        : Error("upper band below lower band at index " + std::to_string(index)),
          index_(index) {}
    std::ptrdiff_t index() const { return index_; }

private:
    std::ptrdiff_t index_;
};

class EmptyGrid : public Error {
public:
    explicit EmptyGrid(const std::string& rule_id) : Error("empty parameter grid for rule " + rule_id) {}
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::ptrdiff_t weights, std::ptrdiff_t columns)
        : Error("weight length " + std::to_string(weights) + " does not match " +
                std::to_string(columns) + " feature columns") {}
};

class BadPopulationSize : public Error {
public:
    BadPopulationSize(std::ptrdiff_t got, std::ptrdiff_t want)
        : Error("population size " + std::to_string(got) + " does not match configured " +
                std::to_string(want)) {}
};

class TooFewDays : public Error {
public:
    explicit TooFewDays(std::ptrdiff_t days)
        : Error("need at least 2 calendar days, got " + std::to_string(days)) {}
};

class ZeroVolatility : public Error {
public:
    ZeroVolatility() : Error("daily return volatility is zero") {}
};

class AccountBlown : public Error {
public:
    explicit AccountBlown(std::ptrdiff_t halt_index)
        : Error("balance wiped out at bar " + std::to_string(halt_index)), halt_index_(halt_index) {}
    std::ptrdiff_t halt_index() const { return halt_index_; }

private:
    std::ptrdiff_t halt_index_;
};

class MissingArtifacts : public Error {
public:
    explicit MissingArtifacts(const std::string& path)
        : Error("missing optimization artifact: " + path) {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace rulefx
