#include "wolbachia/errors.hpp"
#include "wolbachia/kernels.hpp"

namespace wolbachia::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &scalar::u_reaction, &scalar::v_reaction};

#if defined(WOLBACHIA_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, &avx2::u_reaction, &avx2::v_reaction};
#endif

}  // namespace

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(WOLBACHIA_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!available(isa)) throw DomainError("kernel ISA not available: " + std::string(name(isa)));
#if defined(WOLBACHIA_HAVE_AVX2)
  if (isa == Isa::avx2) return kAvx2;
#endif
  return kScalar;
}

const KernelTable& active() {
  static const KernelTable& chosen = table(available(Isa::avx2) ? Isa::avx2 : Isa::scalar);
  return chosen;
}

}  // namespace wolbachia::kernels
