#include "clustervol/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string_view>

namespace clustervol::kernels {

#ifndef CLUSTERVOL_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

bool cpu_supports(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if defined(CLUSTERVOL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return avx2_table() != nullptr && __builtin_cpu_supports("avx2") &&
                   __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

namespace {

const KernelTable* table_for(Isa isa) {
    return isa == Isa::Avx2 ? avx2_table() : &scalar_table();
}

const KernelTable* initial_table() {
    if (const char* env = std::getenv("CLUSTERVOL_ISA"); env != nullptr) {
        if (std::string_view(env) == "scalar") return &scalar_table();
    }
    return cpu_supports(Isa::Avx2) ? avx2_table() : &scalar_table();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

Isa active_isa() { return active().isa; }

bool select(Isa isa) {
    if (!cpu_supports(isa)) return false;
    current().store(table_for(isa), std::memory_order_release);
    return true;
}

std::string_view name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

CrossMoments centered_cross(std::span<const double> x, double xbar, std::span<const double> y,
                            double ybar) {
    assert(x.size() == y.size());
    return active().centered_cross(x.data(), xbar, y.data(), ybar, x.size());
}

void affine_residual(std::span<const double> cur, std::span<const double> lag, double shift,
                     double slope, std::span<double> out) {
    assert(cur.size() == lag.size() && cur.size() == out.size());
    active().affine_residual(cur.data(), lag.data(), shift, slope, out.data(), out.size());
}

void square(std::span<const double> x, std::span<double> out) {
    assert(x.size() == out.size());
    active().square(x.data(), out.data(), out.size());
}

void arch_variance(std::span<const double> lag_sq, double a0, double a1, double floor,
                   std::span<double> out) {
    assert(lag_sq.size() == out.size());
    active().arch_variance(lag_sq.data(), a0, a1, floor, out.data(), out.size());
}

double ratio_sum(std::span<const double> num, std::span<const double> den) {
    assert(num.size() == den.size());
    return active().ratio_sum(num.data(), den.data(), num.size());
}

}  // namespace clustervol::kernels
