#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>

#include "kis/types.hpp"

namespace kis {

// Spin convention, fixed globally: bit b=0 at site i means s_i = +1,
// bit b=1 means s_i = -1 (eigenvalue of sigma^z).
inline int spin_at(std::size_t m, int site) {
  return ((m >> site) & 1u) ? -1 : +1;
}

struct SpinBasis {
  int L;
  std::size_t D;  // 2^L
  explicit SpinBasis(int sites);
};

// Index whose bit string is the reversal of m over L bits.
std::size_t reflect_index(std::size_t m, int L);

// perm[m] = reflect_index(m, L) for all m < 2^L.
std::vector<std::uint32_t> reflection_permutation(int L);

inline int hamming_distance(std::size_t m, std::size_t n) {
  return std::popcount(m ^ n);
}

// Range-checked variant used at API boundaries.
int hamming_distance_checked(std::size_t m, std::size_t n, int L);

// Symmetry-adapted basis vector with at most two nonzero amplitudes over
// the computational basis. Palindromes have b == a and amp_b == 0.
struct ParityVector {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  double amp_a = 1.0;
  double amp_b = 0.0;
};

struct ParityBasis {
  int L = 0;
  int parity = +1;  // +1 even, -1 odd
  std::size_t D = 0;
  std::vector<ParityVector> vectors;
  std::size_t dim() const { return vectors.size(); }
};

// Orthonormal sector basis from reflection orbits: palindromes go to the
// even sector with weight 1, two-element orbits {m, reflect(m)} give
// (|m> +- |reflect(m)>)/sqrt(2).
ParityBasis build_parity_basis(int L, int parity);

// Densify sector vector j into out (length D, zeroed first).
void parity_vector_dense(const ParityBasis& basis, std::size_t j, cplx* out);

}  // namespace kis
