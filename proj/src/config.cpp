#include "derand/config.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "derand/errors.hpp"

namespace derand {

namespace {

constexpr uint64_t kDefaultCap = uint64_t{1} << 24;

std::atomic<uint64_t> g_override{0};

uint64_t env_cap() {
    static const uint64_t cap = [] {
        const char* env = std::getenv("DERAND_CAP");
        if (env == nullptr || *env == '\0') return kDefaultCap;
        try {
            const unsigned long long v = std::stoull(env);
            return v == 0 ? kDefaultCap : static_cast<uint64_t>(v);
        } catch (const std::exception&) {
            return kDefaultCap;
        }
    }();
    return cap;
}

}  // namespace

uint64_t enumeration_cap() {
    const uint64_t o = g_override.load(std::memory_order_relaxed);
    return o != 0 ? o : env_cap();
}

void set_enumeration_cap(uint64_t cap) { g_override.store(cap, std::memory_order_relaxed); }

void require_within_cap(double count, const char* what) {
    const uint64_t cap = enumeration_cap();
    if (count > static_cast<double>(cap)) throw CapExceeded(what, count, cap);
}

}  // namespace derand
