#include <cstddef>

#include "wolbachia/kernels.hpp"

namespace wolbachia::kernels::scalar {

void u_reaction(std::span<const double> w, std::span<const double> v, std::span<const double> b1,
                double delta1, double dt, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double total = w[i] + v[i];
    const double rate = b1[i] - delta1 * total;
    out[i] = w[i] + dt * (w[i] * rate);
  }
}

void v_reaction(std::span<const double> v, std::span<const double> u, std::span<const double> b2,
                double delta2, double eps_div, double dt, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double total = u[i] + v[i];
    const double ratio = total > eps_div ? v[i] / total : 1.0;
    const double rate = b2[i] * ratio - delta2 * total;
    out[i] = v[i] + dt * (v[i] * rate);
  }
}

}  // namespace wolbachia::kernels::scalar
