#pragma once

// Per-node explicit reaction updates for the two species. Each kernel has a
// scalar reference implementation and, where the CPU supports it, an AVX2
// variant. Variants evaluate the same operations in the same order without
// fused multiply-adds, so their outputs are bitwise identical.

#include <span>
#include <string_view>

namespace wolbachia::kernels {

enum class Isa { scalar, avx2 };

std::string_view name(Isa isa);

/// out[i] = w[i] + dt * (w[i] * (b1[i] - delta1 * (w[i] + v[i])))
using UReactionFn = void (*)(std::span<const double> w, std::span<const double> v,
                             std::span<const double> b1, double delta1, double dt,
                             std::span<double> out);

/// out[i] = v[i] + dt * (v[i] * (b2[i] * r - delta2 * s)), s = u[i] + v[i],
/// r = v[i] / s when s > eps_div, else 1 (the CI factor tends to 1 as u -> 0).
using VReactionFn = void (*)(std::span<const double> v, std::span<const double> u,
                             std::span<const double> b2, double delta2, double eps_div, double dt,
                             std::span<double> out);

struct KernelTable {
  Isa isa;
  UReactionFn u_reaction;
  VReactionFn v_reaction;
};

bool available(Isa isa);

/// Table for a specific ISA; throws DomainError when the CPU lacks it.
const KernelTable& table(Isa isa);

/// Best table for the running CPU, detected once.
const KernelTable& active();

namespace scalar {
void u_reaction(std::span<const double> w, std::span<const double> v, std::span<const double> b1,
                double delta1, double dt, std::span<double> out);
void v_reaction(std::span<const double> v, std::span<const double> u, std::span<const double> b2,
                double delta2, double eps_div, double dt, std::span<double> out);
}  // namespace scalar

namespace avx2 {
void u_reaction(std::span<const double> w, std::span<const double> v, std::span<const double> b1,
                double delta1, double dt, std::span<double> out);
void v_reaction(std::span<const double> v, std::span<const double> u, std::span<const double> b2,
                double delta2, double eps_div, double dt, std::span<double> out);
}  // namespace avx2

}  // namespace wolbachia::kernels
