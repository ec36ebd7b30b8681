#include <immintrin.h>

#include <cstddef>

#include "wolbachia/kernels.hpp"

namespace wolbachia::kernels::avx2 {

void u_reaction(std::span<const double> w, std::span<const double> v, std::span<const double> b1,
                double delta1, double dt, std::span<double> out) {
  const std::size_t n = out.size();
  const __m256d vdelta = _mm256_set1_pd(delta1);
  const __m256d vdt = _mm256_set1_pd(dt);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wi = _mm256_loadu_pd(w.data() + i);
    const __m256d vi = _mm256_loadu_pd(v.data() + i);
    const __m256d bi = _mm256_loadu_pd(b1.data() + i);
    const __m256d total = _mm256_add_pd(wi, vi);
    const __m256d rate = _mm256_sub_pd(bi, _mm256_mul_pd(vdelta, total));
    const __m256d next = _mm256_add_pd(wi, _mm256_mul_pd(vdt, _mm256_mul_pd(wi, rate)));
    _mm256_storeu_pd(out.data() + i, next);
  }
  if (i < n) scalar::u_reaction(w.subspan(i), v.subspan(i), b1.subspan(i), delta1, dt, out.subspan(i));
}

void v_reaction(std::span<const double> v, std::span<const double> u, std::span<const double> b2,
                double delta2, double eps_div, double dt, std::span<double> out) {
  const std::size_t n = out.size();
  const __m256d vdelta = _mm256_set1_pd(delta2);
  const __m256d vdt = _mm256_set1_pd(dt);
  const __m256d veps = _mm256_set1_pd(eps_div);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vi = _mm256_loadu_pd(v.data() + i);
    const __m256d ui = _mm256_loadu_pd(u.data() + i);
    const __m256d bi = _mm256_loadu_pd(b2.data() + i);
    const __m256d total = _mm256_add_pd(ui, vi);
    const __m256d above = _mm256_cmp_pd(total, veps, _CMP_GT_OQ);
    // Lanes at or below eps_div divide by one instead and are then replaced.
    const __m256d safe = _mm256_blendv_pd(one, total, above);
    const __m256d ratio = _mm256_blendv_pd(one, _mm256_div_pd(vi, safe), above);
    const __m256d rate = _mm256_sub_pd(_mm256_mul_pd(bi, ratio), _mm256_mul_pd(vdelta, total));
    const __m256d next = _mm256_add_pd(vi, _mm256_mul_pd(vdt, _mm256_mul_pd(vi, rate)));
    _mm256_storeu_pd(out.data() + i, next);
  }
  if (i < n) {
    scalar::v_reaction(v.subspan(i), u.subspan(i), b2.subspan(i), delta2, eps_div, dt, out.subspan(i));
  }
}

}  // namespace wolbachia::kernels::avx2
