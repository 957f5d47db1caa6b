// Copyright The shiftrecycle Authors.
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "shiftrecycle/common.hpp"

namespace shiftrecycle::kernels {

namespace {

#define SHIFTRECYCLE_TABLE(ns, tag) \
    Table { tag, ns::dot, ns::axpy, ns::axpby, ns::waxpby, ns::scal, ns::sqweight, ns::gemv_t, ns::gemv_n, ns::band_conv }

const Table kScalar = SHIFTRECYCLE_TABLE(scalar, Backend::Scalar);
#if defined(SHIFTRECYCLE_HAVE_AVX2)
const Table kAvx2 = SHIFTRECYCLE_TABLE(avx2, Backend::Avx2);
#endif
#if defined(SHIFTRECYCLE_HAVE_NEON)
const Table kNeon = SHIFTRECYCLE_TABLE(neon, Backend::Neon);
#endif

bool cpu_has_avx2()
{
#if defined(SHIFTRECYCLE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Table* detect()
{
    const char* forced = std::getenv("SHIFTRECYCLE_SIMD");
    if (forced != nullptr) {
        const std::string f = forced;
        if (f == "scalar") return &kScalar;
        if (f == "avx2" && avx2_table() != nullptr) return avx2_table();
        if (f == "neon" && neon_table() != nullptr) return neon_table();
        warn("SHIFTRECYCLE_SIMD=" + f + " not available here; using automatic selection");
    }
    if (const Table* t = neon_table()) return t;
    if (const Table* t = avx2_table()) return t;
    return &kScalar;
}

std::atomic<const Table*>& current()
{
    static std::atomic<const Table*> table{detect()};
    return table;
}

} // namespace

const Table& scalar_table() { return kScalar; }

const Table* avx2_table()
{
#if defined(SHIFTRECYCLE_HAVE_AVX2)
    static const bool ok = cpu_has_avx2();
    return ok ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const Table* neon_table()
{
#if defined(SHIFTRECYCLE_HAVE_NEON)
    return &kNeon;
#else
    return nullptr;
#endif
}

const Table& active() { return *current().load(std::memory_order_relaxed); }

void select(Backend backend)
{
    const Table* t = nullptr;
    switch (backend) {
    case Backend::Scalar: t = &kScalar; break;
    case Backend::Avx2: t = avx2_table(); break;
    case Backend::Neon: t = neon_table(); break;
    }
    if (t == nullptr) throw Error("kernel backend '" + std::string(name(backend)) + "' is not available on this CPU");
    current().store(t, std::memory_order_relaxed);
}

std::string_view name(Backend backend)
{
    switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
    }
    return "unknown";
}

} // namespace shiftrecycle::kernels
