// Compiled with -mavx2 (no FMA: products and sums must round exactly like the
// scalar reference).
#include <immintrin.h>

#include <cmath>

#include "smms/kernels.hpp"

namespace smms::kernels::detail {
namespace {

constexpr std::size_t kLanes = 4;

inline void neumaier(double& s, double& c, double x) {
  const double t = s + x;
  if (std::fabs(s) >= std::fabs(x))
    c += (s - t) + x;
  else
    c += (x - t) + s;
  s = t;
}

double dot_avx2(const double* v, const double* w, std::size_t n) {
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d s = _mm256_setzero_pd();
  __m256d c = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d x = _mm256_mul_pd(_mm256_loadu_pd(v + i), _mm256_loadu_pd(w + i));
    const __m256d t = _mm256_add_pd(s, x);
    const __m256d s_big = _mm256_cmp_pd(_mm256_and_pd(s, abs_mask), _mm256_and_pd(x, abs_mask), _CMP_GE_OQ);
    const __m256d from_s = _mm256_add_pd(_mm256_sub_pd(s, t), x);
    const __m256d from_x = _mm256_add_pd(_mm256_sub_pd(x, t), s);
    c = _mm256_add_pd(c, _mm256_blendv_pd(from_x, from_s, s_big));
    s = t;
  }
  alignas(32) double sl[kLanes];
  alignas(32) double cl[kLanes];
  _mm256_store_pd(sl, s);
  _mm256_store_pd(cl, c);
  for (; i < n; ++i) neumaier(sl[i % kLanes], cl[i % kLanes], v[i] * w[i]);
  double total = sl[0], comp = cl[0] + cl[1] + cl[2] + cl[3];
  for (std::size_t l = 1; l < kLanes; ++l) neumaier(total, comp, sl[l]);
  return total + comp;
}

ArgMax max_difference_avx2(const double* a, const double* b, std::size_t n) {
  const double ninf = -INFINITY;
  __m256d best = _mm256_set1_pd(ninf);
  __m256d best_idx = _mm256_set1_pd(-1.0);
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d step = _mm256_set1_pd(static_cast<double>(kLanes));
  const __m256d none = _mm256_set1_pd(-1.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d gt = _mm256_cmp_pd(d, best, _CMP_GT_OQ);
    const __m256d first = _mm256_and_pd(_mm256_cmp_pd(best_idx, none, _CMP_EQ_OQ),
                                        _mm256_cmp_pd(d, best, _CMP_EQ_OQ));
    const __m256d take = _mm256_or_pd(gt, first);
    best = _mm256_blendv_pd(best, d, take);
    best_idx = _mm256_blendv_pd(best_idx, idx, take);
    idx = _mm256_add_pd(idx, step);
  }
  alignas(32) double bl[kLanes];
  alignas(32) double il[kLanes];
  _mm256_store_pd(bl, best);
  _mm256_store_pd(il, best_idx);
  for (; i < n; ++i) {
    const std::size_t l = i % kLanes;
    const double d = a[i] - b[i];
    if (d > bl[l] || (il[l] < 0.0 && d == bl[l])) {
      bl[l] = d;
      il[l] = static_cast<double>(i);
    }
  }
  ArgMax out;
  for (std::size_t l = 0; l < kLanes; ++l) {
    if (il[l] < 0.0) continue;
    const auto li = static_cast<std::size_t>(il[l]);
    if (!out.found() || bl[l] > out.value || (bl[l] == out.value && li < out.index)) {
      out.value = bl[l];
      out.index = li;
    }
  }
  return out;
}

}  // namespace

const Table* avx2_table() {
  static const Table t{dot_avx2, max_difference_avx2};
  return &t;
}

}  // namespace smms::kernels::detail
