#include "slgeo/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>

namespace slgeo {

namespace {

std::atomic<int> g_threads{0};

int default_threads() {
  if (const char* env = std::getenv("SLGEO_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
      // fall through to the hardware count
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

void set_thread_count(int n) { g_threads.store(n > 0 ? n : 0); }

int thread_count() {
  const int n = g_threads.load();
  return n > 0 ? n : default_threads();
}

}  // namespace slgeo
