#pragma once

#include <cstdint>

namespace derand {

// Upper bound on the number of items any exhaustive enumeration may visit.
// Defaults to 2^24; the DERAND_CAP environment variable overrides it at first use.
uint64_t enumeration_cap();

// Test hook; 0 restores the environment/default value.
void set_enumeration_cap(uint64_t cap);

// Throws CapExceeded when `count` exceeds the cap.
void require_within_cap(double count, const char* what);

}  // namespace derand
