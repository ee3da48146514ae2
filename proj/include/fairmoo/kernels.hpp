#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fairmoo::kern {

/// Vector kernels behind the training/inference inner loops. Scalar reference
/// implementations are the semantic ground truth; SIMD variants must agree
/// with them within rounding (see tests/test_kernels.cpp).
struct Kernels {
    const char* name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);  // y += alpha * x
    void (*relu)(double* x, std::size_t n);                                 // x = max(x, 0)
    void (*relu_mask)(const double* z, double* g, std::size_t n);           // g = z > 0 ? g : 0
    void (*clamp)(double* x, double lo, double hi, std::size_t n);
};

const Kernels& scalar_kernels();

#if defined(FAIRMOO_HAVE_AVX2)
const Kernels& avx2_kernels();
#endif

/// Kernel table in use. Resolved once: FAIRMOO_KERNELS=scalar|avx2 forces a
/// variant, otherwise the best supported one is picked at runtime.
const Kernels& active();

/// All variants compiled into this binary (for equivalence tests).
std::vector<const Kernels*> available();

}  // namespace fairmoo::kern
