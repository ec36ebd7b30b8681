#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wolbachia {

/// Thomas algorithm for a tridiagonal system
///   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i],
/// lower[0] and upper[n-1] ignored. Requires a matrix for which elimination
/// without pivoting is stable (diagonally dominant or SPD). Solution overwrites rhs.
class TridiagonalSolver {
 public:
  /// Eliminates the matrix once; solve_factored() then reuses it for any rhs.
  void factor(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper) {
    const std::size_t n = diag.size();
    lower_.assign(lower.begin(), lower.begin() + static_cast<std::ptrdiff_t>(n));
    ratio_.resize(n);
    inv_pivot_.resize(n);
    double pivot = diag[0];
    inv_pivot_[0] = 1.0 / pivot;
    for (std::size_t i = 1; i < n; ++i) {
      ratio_[i] = upper[i - 1] * inv_pivot_[i - 1];
      pivot = diag[i] - lower[i] * ratio_[i];
      inv_pivot_[i] = 1.0 / pivot;
    }
  }

  void solve_factored(std::span<double> rhs) const {
    const std::size_t n = inv_pivot_.size();
    rhs[0] *= inv_pivot_[0];
    for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_pivot_[i];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= ratio_[i + 1] * rhs[i + 1];
  }

  void solve(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper,
             std::span<double> rhs) {
    factor(lower, diag, upper);
    solve_factored(rhs);
  }

 private:
  std::vector<double> lower_;
  std::vector<double> ratio_;
  std::vector<double> inv_pivot_;
};

}  // namespace wolbachia
