#include "wuigraph/error.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace wuigraph {
namespace {
std::atomic<std::size_t> g_warnings{0};
std::atomic<bool> g_silenced{false};
std::mutex g_stderr_mutex;
}  // namespace

void warn(const std::string& message) {
  ++g_warnings;
  if (g_silenced) return;
  std::lock_guard lock(g_stderr_mutex);
  std::cerr << "warning: " << message << '\n';
}

std::size_t warning_count() { return g_warnings; }

void set_warnings_silenced(bool silenced) { g_silenced = silenced; }

}  // namespace wuigraph
