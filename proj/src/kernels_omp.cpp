#include <scenet/kernels.hpp>

#include <omp.h>

#include <mutex>

namespace scenet::kernels {

std::vector<ActiveSetSolution> solve_active_sets_omp(const Matrix& z, const Vector& alpha,
                                                     std::span<const AgentMask> candidates) {
  std::vector<ActiveSetSolution> out(candidates.size());
  const auto count = static_cast<std::ptrdiff_t>(candidates.size());
  // Subset sizes vary, so solve cost varies: dynamic schedule.
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    out[k] = solve_active_set(z, alpha, candidates[k]);
  }
  return out;
}

void for_each_index_omp(std::size_t count, void (*fn)(std::size_t, void*), void* ctx) {
  std::exception_ptr first;
  std::ptrdiff_t first_index = -1;
  std::mutex guard;
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i), ctx);
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (first_index < 0 || i < first_index) {
        first = std::current_exception();
        first_index = i;
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

int parallel_threads() { return omp_get_max_threads(); }

}  // namespace scenet::kernels
