#ifndef SCENET_KERNELS_HPP
#define SCENET_KERNELS_HPP

// Data-parallel kernels. Each has a serial reference loop and an OpenMP
// version; both fill result slots by index so the output is identical and
// independent of scheduling.

#include <scenet/types.hpp>

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

namespace scenet::kernels {

/// Solution of (I - Z_K) a_K = alpha_K scattered into a length-n vector.
struct ActiveSetSolution {
  AgentMask active = 0;
  bool singular = false;
  /// Only meaningful when singular: the system has (a continuum of) solutions.
  bool consistent = false;
  Vector actions;
};

std::vector<ActiveSetSolution> solve_active_sets_serial(const Matrix& z, const Vector& alpha,
                                                        std::span<const AgentMask> candidates);

std::vector<ActiveSetSolution> solve_active_sets_omp(const Matrix& z, const Vector& alpha,
                                                     std::span<const AgentMask> candidates);

inline std::vector<ActiveSetSolution> solve_active_sets(const Matrix& z, const Vector& alpha,
                                                        std::span<const AgentMask> candidates,
                                                        Execution exec) {
  return exec == Execution::parallel ? solve_active_sets_omp(z, alpha, candidates)
                                     : solve_active_sets_serial(z, alpha, candidates);
}

/// Single solve shared by both kernels.
ActiveSetSolution solve_active_set(const Matrix& z, const Vector& alpha, AgentMask active);

/// Runs fn(0..count-1); OpenMP when exec is parallel. If any index throws,
/// the exception from the lowest such index is rethrown after the loop.
void for_each_index_omp(std::size_t count, void (*fn)(std::size_t, void*), void* ctx);

template <class Fn>
void for_each_index(std::size_t count, Execution exec, Fn fn) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  for_each_index_omp(
      count, [](std::size_t i, void* ctx) { (*static_cast<Fn*>(ctx))(i); },
      static_cast<void*>(&fn));
}

/// Number of OpenMP threads the parallel kernels will use.
int parallel_threads();

}  // namespace scenet::kernels

#endif  // SCENET_KERNELS_HPP
