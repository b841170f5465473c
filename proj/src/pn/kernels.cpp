#include "wfctl/pn/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace wfctl::pn::kernels {

namespace scalar {

bool covers(const Count* m, const Count* need, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i] < need[i]) return false;
    }
    return true;
}

bool strictly_covers(const Count* a, const Count* b, std::size_t n) {
    bool greater = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] < b[i]) return false;
        greater = greater || a[i] > b[i];
    }
    return greater;
}

void add(const Count* m, const Count* delta, Count* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = m[i] + delta[i];
}

bool any_negative(const Count* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] < 0) return true;
    }
    return false;
}

}  // namespace scalar

namespace {

constexpr KernelTable kScalar{scalar::covers, scalar::strictly_covers, scalar::add,
                              scalar::any_negative};
#if defined(WFCTL_HAVE_AVX2)
constexpr KernelTable kAvx2{avx2::covers, avx2::strictly_covers, avx2::add, avx2::any_negative};
#endif

bool cpu_has_avx2() {
#if defined(WFCTL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa detect() { return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar; }

std::atomic<Isa>& active_slot() {
    static std::atomic<Isa> slot{detect()};
    return slot;
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool supported(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2: return cpu_has_avx2();
    }
    return false;
}

const KernelTable& table(Isa isa) {
    if (!supported(isa)) {
        throw std::invalid_argument("instruction set not supported: " + std::string(to_string(isa)));
    }
#if defined(WFCTL_HAVE_AVX2)
    if (isa == Isa::Avx2) return kAvx2;
#endif
    return kScalar;
}

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

void select(Isa isa) {
    table(isa);
    active_slot().store(isa, std::memory_order_relaxed);
}

const KernelTable& active() { return table(active_isa()); }

}  // namespace wfctl::pn::kernels
