#include <algorithm>

#include "clustervol/kernels.hpp"

namespace clustervol::kernels {
namespace {

double sum_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

CrossMoments centered_cross_scalar(const double* x, double xbar, const double* y, double ybar,
                                   std::size_t n) {
    CrossMoments m;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - xbar;
        m.sxx += dx * dx;
        m.sxy += dx * (y[i] - ybar);
    }
    return m;
}

void affine_residual_scalar(const double* cur, const double* lag, double shift, double slope,
                            double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (cur[i] - shift) - slope * lag[i];
}

void square_scalar(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * x[i];
}

void arch_variance_scalar(const double* lag_sq, double a0, double a1, double floor, double* out,
                          std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(a0 + a1 * lag_sq[i], floor);
}

double ratio_sum_scalar(const double* num, const double* den, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += num[i] / den[i];
    return s;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Isa::Scalar,         sum_scalar,          centered_cross_scalar,
                                   affine_residual_scalar, square_scalar, arch_variance_scalar,
                                   ratio_sum_scalar};
    return table;
}

}  // namespace clustervol::kernels
