#include "narep/connectivity.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace narep {

ConnectivityLists build_connectivity(const FlatModel& fm) {
  const auto start = std::chrono::steady_clock::now();
  ConnectivityLists cl;
  const auto& vars = fm.vars();
  cl.var_to_activities.resize(vars.size());
  for (const ActivityInstance& a : fm.activities()) {
    for (int v : a.reads) {
      if (!vars[static_cast<std::size_t>(v)].mutable_) continue;
      ++cl.check_count;
      // activities are visited in ascending order, so lists stay sorted
      cl.var_to_activities[static_cast<std::size_t>(v)].push_back(a.id);
    }
  }
  cl.build_time_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  return cl;
}

std::vector<int> affected_activities(const ConnectivityLists& cl, std::span<const int> changed) {
  std::vector<int> out;
  for (int v : changed) {
    const auto& list = cl.var_to_activities.at(static_cast<std::size_t>(v));
    out.insert(out.end(), list.begin(), list.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ConnectivityReport connectivity_report(const FlatModel& fm) {
  const ConnectivityLists cl = build_connectivity(fm);
  ConnectivityReport r;
  r.checks = cl.check_count;
  r.vars = static_cast<std::int64_t>(fm.vars().size());
  r.activities = static_cast<std::int64_t>(fm.activities().size());
  if (r.vars > 0 && r.activities > 0) {
    r.density = static_cast<double>(r.checks) / (static_cast<double>(r.vars) * static_cast<double>(r.activities));
  }
  r.build_ns = cl.build_time_ns;
  return r;
}

std::string format_connectivity(const FlatModel& fm, const ConnectivityLists& cl) {
  std::ostringstream os;
  const std::int64_t vars = static_cast<std::int64_t>(fm.vars().size());
  const std::int64_t acts = static_cast<std::int64_t>(fm.activities().size());
  os << "checks " << cl.check_count << '\n';
  os << "vars " << vars << '\n';
  os << "activities " << acts << '\n';
  os << "density " << (vars && acts ? static_cast<double>(cl.check_count) / (static_cast<double>(vars) * static_cast<double>(acts)) : 0.0)
     << '\n';
  for (std::size_t v = 0; v < cl.var_to_activities.size(); ++v) {
    const auto& list = cl.var_to_activities[v];
    if (list.empty()) continue;
    os << "var " << v << ' ' << fm.vars()[v].path << ':';
    for (int a : list) os << ' ' << a;
    os << '\n';
  }
  return os.str();
}

}  // namespace narep
