#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense double-precision kernels used by the clustering and regression
// inner loops. Each ISA variant keeps a fixed reduction order so a given
// variant is bit-reproducible run to run; variants agree with the scalar
// reference to within rounding.
namespace stereotax::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n) noexcept;
  double (*squared_distance)(const double* a, const double* b, std::size_t n) noexcept;
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n) noexcept;
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

/// Best available table, picked once per process. STEREOTAX_KERNELS=scalar
/// (or avx2/neon) in the environment pins a variant.
const KernelTable& active() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace stereotax::kernels
