#include "hsg/parametric_map.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "hsg/errors.hpp"

namespace hsg {

namespace {
std::atomic<unsigned> g_threads{0};
}

std::vector<double> ParametricMap::operator()(std::span<const double> y) const {
  auto v = fn(y);
  if (v.size() != output_dim)
    throw EvaluationFailure("parametric map returned " + std::to_string(v.size()) +
                            " values, expected " + std::to_string(output_dim));
  return v;
}

ParametricMap ParametricMap::constant(std::vector<double> value) {
  ParametricMap m;
  m.output_dim = value.size();
  m.fn = [value = std::move(value)](std::span<const double>) { return value; };
  return m;
}

ParametricMap ParametricMap::scalar(std::function<double(std::span<const double>)> f,
                                    bool thread_safe) {
  ParametricMap m;
  m.output_dim = 1;
  m.fn = [f = std::move(f)](std::span<const double> y) { return std::vector<double>{f(y)}; };
  m.thread_safe = thread_safe;
  return m;
}

void set_evaluation_threads(unsigned n) { g_threads = n; }

unsigned evaluation_threads() {
  const unsigned n = g_threads.load();
  return n ? n : std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::vector<double>> evaluate_batch(const ParametricMap& u,
                                                const std::vector<std::vector<double>>& points) {
  std::vector<std::vector<double>> out(points.size());
  const unsigned nthreads =
      u.thread_safe ? std::min<unsigned>(evaluation_threads(), unsigned(points.size())) : 1u;
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = u(points[i]);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      try {
        out[i] = u(points[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = points.size();
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

} // namespace hsg
