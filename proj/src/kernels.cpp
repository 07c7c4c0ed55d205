#include "pfq/kernels.hpp"

#include <bit>
#include <cstdlib>
#include <cstring>

namespace pfq::kernels {

namespace {

inline double parity_sign(std::uint64_t v) { return (std::popcount(v) & 1) ? -1.0 : 1.0; }

// Inserts a zero bit at position h.
inline std::uint64_t insert_zero(std::uint64_t i, int h) {
  const std::uint64_t low = i & ((std::uint64_t{1} << h) - 1);
  return ((i >> h) << (h + 1)) | low;
}

}  // namespace

void mix_scalar(cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z, double c, cplx w) {
  if (x == 0) {
    const cplx plus = c + w, minus = c - w;
    for (std::size_t b = 0; b < dim; ++b) a[b] *= (std::popcount(b & z) & 1) ? minus : plus;
    return;
  }
  const int h = 63 - std::countl_zero(x);
  for (std::uint64_t i = 0; i < dim / 2; ++i) {
    const std::uint64_t b = insert_zero(i, h);
    const std::uint64_t p = b ^ x;
    const cplx ab = a[b], ap = a[p];
    a[b] = c * ab + w * (parity_sign(p & z) * ap);
    a[p] = c * ap + w * (parity_sign(b & z) * ab);
  }
}

cplx expect_scalar(const cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z) {
  double re = 0.0, im = 0.0;
  for (std::size_t b = 0; b < dim; ++b) {
    const std::uint64_t p = b ^ x;
    const cplx t = std::conj(a[b]) * a[p] * parity_sign(p & z);
    re += t.real();
    im += t.imag();
  }
  return {re, im};
}

bool avx2_available() {
#if defined(PFQ_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() {
  static const Backend chosen = [] {
    const char* env = std::getenv("PFQ_KERNELS");
    if (env && std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    return avx2_available() ? Backend::Avx2 : Backend::Scalar;
  }();
  return chosen;
}

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

void mix(cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z, double c, cplx w) {
#if defined(PFQ_HAVE_AVX2)
  if (active_backend() == Backend::Avx2) return mix_avx2(a, dim, x, z, c, w);
#endif
  mix_scalar(a, dim, x, z, c, w);
}

cplx expect(const cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z) {
#if defined(PFQ_HAVE_AVX2)
  if (active_backend() == Backend::Avx2) return expect_avx2(a, dim, x, z);
#endif
  return expect_scalar(a, dim, x, z);
}

}  // namespace pfq::kernels
