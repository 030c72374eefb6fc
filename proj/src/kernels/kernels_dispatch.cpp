#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "smms/kernels.hpp"

namespace smms::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(SMMS_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("SMMS_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && cpu_has_avx2()) return Backend::avx2;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

const detail::Table& table() {
#if defined(SMMS_HAVE_AVX2)
  if (current().load(std::memory_order_relaxed) == Backend::avx2) return *detail::avx2_table();
#endif
  return detail::scalar_table();
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernels: operand lengths differ");
}

}  // namespace

#if !defined(SMMS_HAVE_AVX2)
const detail::Table* detail::avx2_table() { return nullptr; }
#endif

double dot(std::span<const double> values, std::span<const double> weights) {
  check_sizes(values.size(), weights.size());
  return table().dot(values.data(), weights.data(), values.size());
}

double sum(std::span<const double> values) {
  // Multiplying by 1.0 is exact, so this shares the dot schedule.
  static thread_local std::vector<double> ones;
  if (ones.size() < values.size()) ones.assign(values.size(), 1.0);
  return table().dot(values.data(), ones.data(), values.size());
}

ArgMax max_difference(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return table().max_difference(a.data(), b.data(), a.size());
}

ArgMax max_value(std::span<const double> values) {
  static thread_local std::vector<double> zeros;
  if (zeros.size() < values.size()) zeros.assign(values.size(), 0.0);
  return table().max_difference(values.data(), zeros.data(), values.size());
}

ArgMax max_increase(std::span<const double> values) {
  if (values.size() < 2) return {};
  return table().max_difference(values.data() + 1, values.data(), values.size() - 1);
}

Backend active_backend() { return current().load(); }

bool backend_available(Backend b) { return b == Backend::scalar || cpu_has_avx2(); }

void set_backend(Backend b) {
  if (!backend_available(b)) throw std::invalid_argument("kernels: backend not available on this CPU");
  current().store(b);
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

}  // namespace smms::kernels
