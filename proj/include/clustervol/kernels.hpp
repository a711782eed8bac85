#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace clustervol::kernels {

// Instruction set used by the dispatched kernels below. The scalar kernels are
// the reference; the vector variants must agree with them to rounding.
enum class Isa { Scalar, Avx2 };

struct CrossMoments {
    double sxx = 0.0;  // sum (x - xbar)^2
    double sxy = 0.0;  // sum (x - xbar)(y - ybar)
};

struct KernelTable {
    Isa isa;
    double (*sum)(const double* x, std::size_t n);
    CrossMoments (*centered_cross)(const double* x, double xbar, const double* y, double ybar,
                                   std::size_t n);
    // out[t] = cur[t] - shift - slope * lag[t]
    void (*affine_residual)(const double* cur, const double* lag, double shift, double slope,
                            double* out, std::size_t n);
    void (*square)(const double* x, double* out, std::size_t n);
    // out[t] = max(a0 + a1 * lag_sq[t], floor)
    void (*arch_variance)(const double* lag_sq, double a0, double a1, double floor, double* out,
                          std::size_t n);
    // sum num[t] / den[t]
    double (*ratio_sum)(const double* num, const double* den, std::size_t n);
};

const KernelTable& scalar_table();
// Null when the build has no AVX2 variant.
const KernelTable* avx2_table();

bool cpu_supports(Isa isa);

// Active table. Chosen once from the CPU, overridable by CLUSTERVOL_ISA=scalar
// in the environment or by select().
const KernelTable& active();
Isa active_isa();
// Returns false (and changes nothing) when the ISA is unavailable.
bool select(Isa isa);

std::string_view name(Isa isa);

// Span conveniences over the active table.
double sum(std::span<const double> x);
CrossMoments centered_cross(std::span<const double> x, double xbar, std::span<const double> y,
                            double ybar);
void affine_residual(std::span<const double> cur, std::span<const double> lag, double shift,
                     double slope, std::span<double> out);
void square(std::span<const double> x, std::span<double> out);
void arch_variance(std::span<const double> lag_sq, double a0, double a1, double floor,
                   std::span<double> out);
double ratio_sum(std::span<const double> num, std::span<const double> den);

}  // namespace clustervol::kernels
