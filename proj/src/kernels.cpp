#include "fairmoo/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

#include "fairmoo/errors.hpp"

namespace fairmoo::kern {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void relu_scalar(double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_mask_scalar(const double* z, double* g, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) g[i] = z[i] > 0.0 ? g[i] : 0.0;
}

void clamp_scalar(double* x, double lo, double hi, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] < lo) x[i] = lo;
        if (x[i] > hi) x[i] = hi;
    }
}

const Kernels& resolve() {
    const char* forced = std::getenv("FAIRMOO_KERNELS");
    if (forced != nullptr) {
        const std::string choice(forced);
        if (choice == "scalar") return scalar_kernels();
#if defined(FAIRMOO_HAVE_AVX2)
        if (choice == "avx2") {
            if (!__builtin_cpu_supports("avx2")) {
                throw ConfigError("FAIRMOO_KERNELS=avx2 but CPU lacks AVX2");
            }
            return avx2_kernels();
        }
#endif
        if (choice != "auto") {
            throw ConfigError("unknown FAIRMOO_KERNELS value: " + choice);
        }
    }
#if defined(FAIRMOO_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2")) return avx2_kernels();
#endif
    return scalar_kernels();
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels table{
        "scalar", dot_scalar, sum_scalar, axpy_scalar, relu_scalar, relu_mask_scalar, clamp_scalar,
    };
    return table;
}

const Kernels& active() {
    static const Kernels& selected = resolve();
    return selected;
}

std::vector<const Kernels*> available() {
    std::vector<const Kernels*> out{&scalar_kernels()};
#if defined(FAIRMOO_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2")) out.push_back(&avx2_kernels());
#endif
    return out;
}

}  // namespace fairmoo::kern
