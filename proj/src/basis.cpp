#include "kis/basis.hpp"

#include <cmath>

namespace kis {

SpinBasis::SpinBasis(int sites) : L(sites), D(std::size_t(1) << sites) {
  if (sites < 1 || sites > 30) throw std::invalid_argument("SpinBasis: L out of range");
}

std::size_t reflect_index(std::size_t m, int L) {
  if (L < 1) throw std::invalid_argument("reflect_index: L < 1");
  if (m >= (std::size_t(1) << L)) throw std::invalid_argument("reflect_index: index out of range");
  std::size_t r = 0;
  for (int i = 0; i < L; ++i) {
    r |= ((m >> i) & 1u) << (L - 1 - i);
  }
  return r;
}

std::vector<std::uint32_t> reflection_permutation(int L) {
  const std::size_t D = std::size_t(1) << L;
  std::vector<std::uint32_t> perm(D);
  for (std::size_t m = 0; m < D; ++m) perm[m] = std::uint32_t(reflect_index(m, L));
  return perm;
}

int hamming_distance_checked(std::size_t m, std::size_t n, int L) {
  const std::size_t D = std::size_t(1) << L;
  if (m >= D || n >= D) throw std::invalid_argument("hamming_distance: index out of range");
  return hamming_distance(m, n);
}

ParityBasis build_parity_basis(int L, int parity) {
  if (L < 2) throw std::invalid_argument("build_parity_basis: L < 2");
  if (parity != +1 && parity != -1) throw std::invalid_argument("build_parity_basis: parity must be +-1");
  const std::size_t D = std::size_t(1) << L;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  ParityBasis basis;
  basis.L = L;
  basis.parity = parity;
  basis.D = D;
  for (std::size_t m = 0; m < D; ++m) {
    const std::size_t r = reflect_index(m, L);
    if (r == m) {
      if (parity == +1) basis.vectors.push_back({std::uint32_t(m), std::uint32_t(m), 1.0, 0.0});
    } else if (m < r) {  // one representative per orbit
      basis.vectors.push_back({std::uint32_t(m), std::uint32_t(r), inv_sqrt2,
                               parity == +1 ? inv_sqrt2 : -inv_sqrt2});
    }
  }
  return basis;
}

void parity_vector_dense(const ParityBasis& basis, std::size_t j, cplx* out) {
  for (std::size_t k = 0; k < basis.D; ++k) out[k] = 0.0;
  const ParityVector& v = basis.vectors.at(j);
  out[v.a] += v.amp_a;
  if (v.b != v.a) out[v.b] += v.amp_b;
}

}  // namespace kis
