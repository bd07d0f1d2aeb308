#ifndef QZD_SWEEP_HPP
#define QZD_SWEEP_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "qzd/diagnostics.hpp"
#include "qzd/zeno.hpp"

namespace qzd {

/// Runs task(i) for i in [0, count) on up to `jobs` threads. The first
/// exception thrown by any task is rethrown after all workers join.
inline void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// One qzd_run per entry of `n_list` at the base horizon. When the base
/// config carries probes, the first one is used as the target for the
/// measured teleportation time.
template <Potential P>
std::vector<SweepRow<typename P::Scalar>> sweep_measurements(
    const Wavefunction<typename P::Scalar>& psi0, const P& v,
    const QzdConfig<typename P::Scalar>& base, const std::vector<std::size_t>& n_list,
    std::size_t jobs = 1) {
  using Scalar = typename P::Scalar;
  for (std::size_t n : n_list) {
    if (n == 0) throw PreconditionError("sweep_measurements: every N must be at least 1");
  }
  std::vector<SweepRow<Scalar>> rows(n_list.size());
  parallel_for(n_list.size(), jobs, [&](std::size_t i) {
    auto config = base;
    config.n_measurements = n_list[i];
    const auto rec = qzd_run(psi0, v, config);
    SweepRow<Scalar> row{n_list[i], rec.final_survival(), std::nullopt};
    if (!config.probes.empty()) {
      const auto measured = teleportation_time_measured(rec, config.probes.front());
      if (!measured.at_edge && measured.teleported) row.telep_time_measured = measured.time;
    }
    rows[i] = row;
  });
  return rows;
}

}  // namespace qzd

#endif  // QZD_SWEEP_HPP
