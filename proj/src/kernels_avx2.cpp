#include <immintrin.h>

#include <bit>

#include "pfq/kernels.hpp"

namespace pfq::kernels {

namespace {

inline double parity_sign(std::uint64_t v) { return (std::popcount(v) & 1) ? -1.0 : 1.0; }

inline std::uint64_t insert_zero(std::uint64_t i, int h) {
  const std::uint64_t low = i & ((std::uint64_t{1} << h) - 1);
  return ((i >> h) << (h + 1)) | low;
}

// Two complex numbers per register: [re0, im0, re1, im1].
inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }
inline __m256d swap_halves(__m256d v) { return _mm256_permute2f128_pd(v, v, 1); }
inline __m256d swap_reim(__m256d v) { return _mm256_permute_pd(v, 0b0101); }
inline __m256d signs(double lo, double hi) { return _mm256_set_pd(hi, hi, lo, lo); }

struct ComplexScale {
  __m256d re, im;
  explicit ComplexScale(cplx w) : re(_mm256_set1_pd(w.real())), im(_mm256_set1_pd(w.imag())) {}
  __m256d operator()(__m256d v) const { return _mm256_addsub_pd(_mm256_mul_pd(re, v), _mm256_mul_pd(im, swap_reim(v))); }
};

}  // namespace

void mix_avx2(cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z, double c, cplx w) {
  if (dim < 2) return mix_scalar(a, dim, x, z, c, w);
  const __m256d cv = _mm256_set1_pd(c);
  const ComplexScale mw(w);
  if (x == 0) {
    for (std::size_t b = 0; b < dim; b += 2) {
      const __m256d v = load2(a + b);
      const __m256d chi = signs(parity_sign(b & z), parity_sign((b + 1) & z));
      store2(a + b, _mm256_fmadd_pd(cv, v, mw(_mm256_mul_pd(chi, v))));
    }
    return;
  }
  if (x == 1) {
    for (std::size_t b = 0; b < dim; b += 2) {
      const __m256d v = load2(a + b);
      const __m256d chi = signs(parity_sign((b + 1) & z), parity_sign(b & z));
      store2(a + b, _mm256_fmadd_pd(cv, v, mw(_mm256_mul_pd(chi, swap_halves(v)))));
    }
    return;
  }
  const int h = 63 - std::countl_zero(x);
  const bool odd = x & 1;
  for (std::uint64_t i = 0; i < dim / 2; i += 2) {
    const std::uint64_t b = insert_zero(i, h);
    const std::uint64_t p = b ^ x, p1 = (b + 1) ^ x;
    const std::uint64_t q = p & ~std::uint64_t{1};
    const __m256d va = load2(a + b);
    __m256d vb = load2(a + q);
    if (odd) vb = swap_halves(vb);
    const __m256d chi_p = signs(parity_sign(p & z), parity_sign(p1 & z));
    const __m256d chi_b = signs(parity_sign(b & z), parity_sign((b + 1) & z));
    const __m256d na = _mm256_fmadd_pd(cv, va, mw(_mm256_mul_pd(chi_p, vb)));
    __m256d nb = _mm256_fmadd_pd(cv, vb, mw(_mm256_mul_pd(chi_b, va)));
    if (odd) nb = swap_halves(nb);
    store2(a + b, na);
    store2(a + q, nb);
  }
}

cplx expect_avx2(const cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z) {
  if (dim < 2) return expect_scalar(a, dim, x, z);
  const bool odd = x & 1;
  __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
  for (std::size_t b = 0; b < dim; b += 2) {
    const std::uint64_t p = b ^ x, p1 = (b + 1) ^ x;
    const __m256d u = load2(a + b);
    __m256d v = load2(a + (p & ~std::uint64_t{1}));
    if (odd) v = swap_halves(v);
    v = _mm256_mul_pd(signs(parity_sign(p & z), parity_sign(p1 & z)), v);
    acc_re = _mm256_fmadd_pd(u, v, acc_re);
    acc_im = _mm256_fmadd_pd(u, swap_reim(v), acc_im);
  }
  alignas(32) double r[4], m[4];
  _mm256_store_pd(r, acc_re);
  _mm256_store_pd(m, acc_im);
  return {r[0] + r[1] + r[2] + r[3], m[0] - m[1] + m[2] - m[3]};
}

}  // namespace pfq::kernels
