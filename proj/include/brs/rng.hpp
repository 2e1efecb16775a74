#pragma once

#include <cstdint>

namespace brs {

// Splittable counter-based generator (splitmix64 finalizer). Children derived
// by key never share streams with the parent, so independent draws can be
// issued in parallel and still replay identically for a fixed seed.
struct SplitRng {
    uint64_t key = 0;
    uint64_t counter = 0;

    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    explicit SplitRng(uint64_t seed = 0) : key(mix(seed ^ 0x6a09e667f3bcc908ULL)) {}

    SplitRng child(uint64_t tag) const {
        SplitRng r;
        r.key = mix(key ^ mix(tag ^ 0xbb67ae8584caa73bULL));
        return r;
    }

    uint64_t next() { return mix(key ^ mix(++counter)); }

    // Uniform in [0, n).
    uint64_t below(uint64_t n) {
        if (n == 0) return 0;
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

    bool bit() { return next() & 1; }
    int sign() { return bit() ? 1 : -1; }
    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }
};

}  // namespace brs
