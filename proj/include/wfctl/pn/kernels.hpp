#pragma once

// Dense marking kernels used by the net semantics and the state-space
// explorer. Every kernel has a scalar reference and, on x86-64, an AVX2
// variant; the variant is picked once at startup from cpuid and can be
// overridden for testing.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace wfctl::pn::kernels {

using Count = std::int32_t;

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
    // all(m[i] >= need[i])
    bool (*covers)(const Count* m, const Count* need, std::size_t n);
    // covers(a, b) and a != b
    bool (*strictly_covers)(const Count* a, const Count* b, std::size_t n);
    // out[i] = m[i] + delta[i]
    void (*add)(const Count* m, const Count* delta, Count* out, std::size_t n);
    // any(v[i] < 0)
    bool (*any_negative)(const Count* v, std::size_t n);
};

bool supported(Isa isa);
const KernelTable& table(Isa isa);

Isa active_isa();
// Throws std::invalid_argument when the CPU lacks the instruction set.
void select(Isa isa);

const KernelTable& active();

inline bool covers(std::span<const Count> m, std::span<const Count> need) {
    return active().covers(m.data(), need.data(), m.size());
}
inline bool strictly_covers(std::span<const Count> a, std::span<const Count> b) {
    return active().strictly_covers(a.data(), b.data(), a.size());
}
inline void add(std::span<const Count> m, std::span<const Count> delta, std::span<Count> out) {
    active().add(m.data(), delta.data(), out.data(), m.size());
}
inline bool any_negative(std::span<const Count> v) {
    return active().any_negative(v.data(), v.size());
}

namespace scalar {
bool covers(const Count* m, const Count* need, std::size_t n);
bool strictly_covers(const Count* a, const Count* b, std::size_t n);
void add(const Count* m, const Count* delta, Count* out, std::size_t n);
bool any_negative(const Count* v, std::size_t n);
}  // namespace scalar

#if defined(WFCTL_HAVE_AVX2)
namespace avx2 {
bool covers(const Count* m, const Count* need, std::size_t n);
bool strictly_covers(const Count* a, const Count* b, std::size_t n);
void add(const Count* m, const Count* delta, Count* out, std::size_t n);
bool any_negative(const Count* v, std::size_t n);
}  // namespace avx2
#endif

}  // namespace wfctl::pn::kernels
