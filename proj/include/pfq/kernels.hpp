#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

// Statevector inner loops. For masks (x, z) let P'|b⟩ = (−1)^{popcount(b & z)} |b ⊕ x⟩.
// mix:    a ← c·a + w·P'a
// expect: returns ⟨a|P'|a⟩
// The scalar versions are the reference; the AVX2 versions must agree to rounding.
namespace pfq::kernels {

using cplx = std::complex<double>;

void mix_scalar(cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z, double c, cplx w);
cplx expect_scalar(const cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z);

#if defined(PFQ_HAVE_AVX2)
void mix_avx2(cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z, double c, cplx w);
cplx expect_avx2(const cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z);
#endif

enum class Backend { Scalar, Avx2 };

// Chosen once from CPU features; PFQ_KERNELS=scalar in the environment forces the reference path.
Backend active_backend();
bool avx2_available();
const char* backend_name(Backend b);

void mix(cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z, double c, cplx w);
cplx expect(const cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z);

}  // namespace pfq::kernels
