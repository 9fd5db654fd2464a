#pragma once

#include <map>
#include <mutex>
#include <vector>

#include "kdvb/error.hpp"
#include "kdvb/waves.hpp"

// KdVBF branch for r = alpha = 1 at eps = 0.005, 0.01, 0.02, 0.04, computed
// once per grid size.
inline const std::vector<kdvb::WaveProfile>& unit_branch(int n) {
  static std::map<int, std::vector<kdvb::WaveProfile>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    const std::vector<double> eps{0.005, 0.01, 0.02, 0.04};
    it = cache.emplace(n, kdvb::continue_branch(1.0, 1.0, eps, n).profiles).first;
  }
  return it->second;
}

inline const kdvb::WaveProfile& unit_profile(int n, double eps) {
  for (const auto& w : unit_branch(n)) {
    if (w.eps == eps) return w;
  }
  throw kdvb::DomainError("no branch profile at that eps");
}
