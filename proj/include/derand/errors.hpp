#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace derand {

// Out-of-range or inconsistent parameters (n, d, eps, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A seed whose length or split does not match the generator.
class SeedError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An exhaustive computation would exceed the enumeration cap.
class CapExceeded : public std::runtime_error {
public:
    CapExceeded(const std::string& what, double estimated_size, uint64_t cap)
        : std::runtime_error(what + " (needs ~" + std::to_string(estimated_size) + " items, cap " +
                             std::to_string(cap) + ")"),
          estimated_size_(estimated_size), cap_(cap) {}

    double estimated_size() const noexcept { return estimated_size_; }
    uint64_t cap() const noexcept { return cap_; }

private:
    double estimated_size_;
    uint64_t cap_;
};

// Numerical construction failed a hard invariant (e.g. a Gram matrix that is not PSD).
class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace derand
