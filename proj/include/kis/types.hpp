#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace kis {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

// Numerical failure (eigensolver breakdown, tolerance violated on input).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested computation exceeds a configured dense cap.
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Largest dimension for which dense D x D unitaries are materialized.
inline constexpr std::size_t kDenseCap = 4096;

// Largest block dimension for dense superoperator construction.
inline constexpr std::size_t kDenseSuperCap = 4096;

}  // namespace kis
