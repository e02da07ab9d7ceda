#include "maldens/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "maldens/error.hpp"

namespace maldens {
namespace {

std::atomic<std::size_t> g_threads{0};

}  // namespace

std::size_t resolve_threads(std::optional<std::size_t> requested) {
  if (requested) {
    if (*requested == 0) throw ConfigError("thread count must be positive");
    return *requested;
  }
  if (const char* env = std::getenv("MALDENS_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v <= 0) throw ConfigError(std::string("bad MALDENS_THREADS value: ") + env);
    return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_threads(std::size_t n) { g_threads.store(std::max<std::size_t>(n, 1)); }

std::size_t default_threads() {
  std::size_t n = g_threads.load();
  if (n == 0) {
    n = resolve_threads(std::nullopt);
    g_threads.store(n);
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t threads) {
  if (n == 0) return;
  if (threads == 0) threads = default_threads();
  threads = std::min(threads, n);
  if (threads == 1) {
    body(0, n);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  auto run = [&](std::size_t t) {
    const std::size_t begin = n * t / threads, end = n * (t + 1) / threads;
    try {
      body(begin, end);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(run, t);
  run(0);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace maldens
