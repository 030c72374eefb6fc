#pragma once

// Reduction kernels behind every quadrature sum and every verdict scan.
//
// Each kernel has a scalar reference and an AVX2 variant. The scalar
// reference runs the same four-lane schedule the vector code uses, so the two
// backends agree bit for bit; the active backend is picked once at startup
// from CPUID and can be pinned with SMMS_SIMD=scalar|avx2.

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>

namespace smms::kernels {

enum class Backend { scalar, avx2 };

struct ArgMax {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t index = npos;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  bool found() const { return index != npos; }
};

// sum_i values[i] * weights[i], compensated (Neumaier) per lane.
double dot(std::span<const double> values, std::span<const double> weights);
double sum(std::span<const double> values);

// max_i (a[i] - b[i]) with the lowest index winning ties. NaN entries never win.
ArgMax max_difference(std::span<const double> a, std::span<const double> b);
ArgMax max_value(std::span<const double> values);
// Largest forward difference values[i+1] - values[i]; index is i.
ArgMax max_increase(std::span<const double> values);

Backend active_backend();
bool backend_available(Backend b);
// Throws std::invalid_argument when the CPU lacks the requested backend.
void set_backend(Backend b);
std::string_view backend_name(Backend b);

namespace detail {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  ArgMax (*max_difference)(const double*, const double*, std::size_t);
};

const Table& scalar_table();
const Table* avx2_table();  // nullptr when not compiled in

}  // namespace detail

}  // namespace smms::kernels
