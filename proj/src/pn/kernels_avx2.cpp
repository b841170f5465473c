#include <immintrin.h>

#include "wfctl/pn/kernels.hpp"

namespace wfctl::pn::kernels::avx2 {

namespace {
constexpr std::size_t kLanes = 8;

inline __m256i load(const Count* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }
}  // namespace

bool covers(const Count* m, const Count* need, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256i short_of = _mm256_cmpgt_epi32(load(need + i), load(m + i));
        if (!_mm256_testz_si256(short_of, short_of)) return false;
    }
    return scalar::covers(m + i, need + i, n - i);
}

bool strictly_covers(const Count* a, const Count* b, std::size_t n) {
    __m256i greater = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256i va = load(a + i);
        const __m256i vb = load(b + i);
        const __m256i less = _mm256_cmpgt_epi32(vb, va);
        if (!_mm256_testz_si256(less, less)) return false;
        greater = _mm256_or_si256(greater, _mm256_cmpgt_epi32(va, vb));
    }
    const bool head_greater = !_mm256_testz_si256(greater, greater);
    if (!scalar::covers(a + i, b + i, n - i)) return false;
    return head_greater || scalar::strictly_covers(a + i, b + i, n - i);
}

void add(const Count* m, const Count* delta, Count* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                            _mm256_add_epi32(load(m + i), load(delta + i)));
    }
    scalar::add(m + i, delta + i, out + i, n - i);
}

bool any_negative(const Count* v, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        // sign bits of each 32-bit lane
        if (_mm256_movemask_ps(_mm256_castsi256_ps(load(v + i))) != 0) return true;
    }
    return scalar::any_negative(v + i, n - i);
}

}  // namespace wfctl::pn::kernels::avx2
