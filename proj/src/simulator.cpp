#include "narep/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace narep {

std::string_view to_string(SimStatus s) {
  switch (s) {
    case SimStatus::Running: return "running";
    case SimStatus::EventLimit: return "event-limit";
    case SimStatus::TimeLimit: return "time-limit";
    case SimStatus::Absorbed: return "absorbed";
  }
  return "?";
}

Simulator::Simulator(const FlatModel& fm, const ConnectivityLists& cl, SimConfig cfg)
    : fm_(fm), cl_(cl), cfg_(cfg), rng_(cfg.seed), marking_(fm.initial()) {
  if (!cfg_.stop_after_events && !cfg_.stop_at_time) {
    fail(Errc::InvalidArgument, "simulation needs a stop condition (events or time)");
  }
  if (cfg_.stop_at_time && !(*cfg_.stop_at_time >= 0)) fail(Errc::InvalidArgument, "negative stop time");
  if (cl_.var_to_activities.size() != fm_.vars().size()) {
    fail(Errc::InvalidArgument, "connectivity lists do not match the model");
  }
  const std::size_t n = fm_.activities().size();
  state_.resize(n);
  stamp_.assign(n, 0);
  traj_.initial = marking_;
  examine_all();
}

void Simulator::examine_all() {
  reexamined_.resize(fm_.activities().size());
  for (std::size_t a = 0; a < reexamined_.size(); ++a) reexamined_[a] = static_cast<int>(a);
  for (int a : reexamined_) examine(a);
}

void Simulator::examine(int a) {
  const ActivityInstance& inst = fm_.activities()[static_cast<std::size_t>(a)];
  const ActivityDecl& decl = fm_.decl(inst);
  const InstanceContext ctx(fm_, inst.leaf, marking_);
  ActState& s = state_[static_cast<std::size_t>(a)];
  const bool enabled = evaluate(decl.enabling, ctx).as_bool();

  if (!decl.timed()) {
    if (enabled != s.enabled) {
      if (enabled) {
        instant_.emplace(-decl.priority, a);
      } else {
        instant_.erase({-decl.priority, a});
      }
      s.enabled = enabled;
    }
    return;
  }

  s.enabled = enabled;
  if (!enabled) {
    if (s.scheduled) timed_.erase({s.time, a});
    s.scheduled = false;
    return;
  }
  const double r = evaluate(decl.rate, ctx).as_real();
  if (decl.timing == Timing::Exponential) {
    if (!(r > 0) || !std::isfinite(r)) {
      fail(Errc::InvalidRate, inst.path + " is enabled with rate " + format_double(r), decl.rate.pos());
    }
    if (!s.scheduled) {
      s.time = now_ + rng_.exponential(r);
      s.rate = r;
      s.scheduled = true;
      timed_.emplace(s.time, a);
    } else if (r != s.rate) {
      // memoryless: the residual time scales with the rate ratio
      timed_.erase({s.time, a});
      s.time = now_ + (s.time - now_) * (s.rate / r);
      s.rate = r;
      timed_.emplace(s.time, a);
    }
  } else if (!s.scheduled) {
    if (!(r >= 0) || !std::isfinite(r)) {
      fail(Errc::InvalidRate, inst.path + " is enabled with delay " + format_double(r), decl.rate.pos());
    }
    s.time = now_ + r;
    s.rate = r;
    s.scheduled = true;
    timed_.emplace(s.time, a);
  }
}

namespace {

std::size_t pick_weighted(const std::vector<double>& w, double u) {
  double total = 0;
  for (double x : w) total += x;
  const double target = u * total;
  double acc = 0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0) continue;
    acc += w[i];
    last = i;
    if (target < acc) return i;
  }
  return last;
}

double checked_total(const std::vector<double>& w, const std::string& what) {
  double total = 0;
  for (double x : w) {
    if (!(x >= 0) || !std::isfinite(x)) fail(Errc::InvalidRate, what + " has weight " + format_double(x));
    total += x;
  }
  if (!(total > 0)) fail(Errc::InvalidRate, what + " has weights summing to zero");
  return total;
}

}  // namespace

int Simulator::pick_instantaneous() {
  const int top = instant_.begin()->first;
  std::vector<int> candidates;
  for (auto it = instant_.begin(); it != instant_.end() && it->first == top; ++it) {
    candidates.push_back(it->second);
  }
  if (candidates.size() == 1) return candidates.front();
  std::vector<double> w;
  for (int a : candidates) {
    const ActivityInstance& inst = fm_.activities()[static_cast<std::size_t>(a)];
    const InstanceContext ctx(fm_, inst.leaf, marking_);
    w.push_back(evaluate(fm_.decl(inst).weight, ctx).as_real());
  }
  checked_total(w, "instantaneous choice at priority " + std::to_string(-top));
  return candidates[pick_weighted(w, rng_.uniform())];
}

void Simulator::fire(int a) {
  const ActivityInstance& inst = fm_.activities()[static_cast<std::size_t>(a)];
  const ActivityDecl& decl = fm_.decl(inst);
  const InstanceContext ctx(fm_, inst.leaf, marking_);

  std::size_t k = 0;
  if (decl.cases.size() > 1) {
    std::vector<double> w;
    w.reserve(decl.cases.size());
    for (const Case& c : decl.cases) w.push_back(evaluate(c.weight, ctx).as_real());
    checked_total(w, "cases of " + inst.path);
    k = pick_weighted(w, rng_.uniform());
  }

  ActState& s = state_[static_cast<std::size_t>(a)];
  if (decl.timed() && s.scheduled) {
    timed_.erase({s.time, a});
    s.scheduled = false;
  }

  touched_.clear();
  for (const UpdateStmt& u : decl.cases[k].updates) {
    const int var = ctx.target(u.target);
    const std::int64_t value = evaluate(u.value, ctx).as_int();
    auto& slot = marking_[static_cast<std::size_t>(var)];
    if (value < 0) {
      fail(Errc::NegativeMarking,
           inst.path + " drives " + fm_.vars()[static_cast<std::size_t>(var)].path + " to " + std::to_string(value),
           u.value.pos());
    }
    const bool seen = std::any_of(touched_.begin(), touched_.end(), [&](const auto& t) { return t.first == var; });
    if (!seen) touched_.emplace_back(var, slot);
    slot = value;
  }
  std::sort(touched_.begin(), touched_.end());

  Event ev;
  ev.time = now_;
  ev.activity = a;
  ev.case_index = static_cast<int>(k);
  ev.change_begin = static_cast<std::uint32_t>(traj_.changes.size());
  for (const auto& [var, old] : touched_) {
    const std::int64_t now_value = marking_[static_cast<std::size_t>(var)];
    if (now_value != old) traj_.changes.push_back({var, old, now_value});
  }
  ev.change_count = static_cast<std::uint32_t>(traj_.changes.size() - ev.change_begin);
  traj_.events.push_back(ev);

  if (cfg_.mode == SimMode::Oracle) {
    examine_all();
    return;
  }
  ++epoch_;
  reexamined_.clear();
  const auto add = [&](int b) {
    auto& st = stamp_[static_cast<std::size_t>(b)];
    if (st != epoch_) {
      st = epoch_;
      reexamined_.push_back(b);
    }
  };
  add(a);
  for (const VarChange& c : traj_.changes_of(ev)) {
    for (int b : cl_.var_to_activities[static_cast<std::size_t>(c.var)]) add(b);
  }
  std::sort(reexamined_.begin(), reexamined_.end());
  for (int b : reexamined_) examine(b);
}

void Simulator::finish(SimStatus s, double end) {
  traj_.status = s;
  traj_.end_time = end;
  traj_.final_marking = marking_;
  traj_.draws = rng_.draws();
}

bool Simulator::step() {
  if (traj_.status != SimStatus::Running) return false;
  if (cfg_.stop_after_events && static_cast<std::int64_t>(traj_.events.size()) >= *cfg_.stop_after_events) {
    finish(SimStatus::EventLimit, now_);
    return false;
  }
  if (!instant_.empty()) {
    if (++chain_ > cfg_.max_instantaneous_chain) {
      fail(Errc::LivelockError, "more than " + std::to_string(cfg_.max_instantaneous_chain) +
                                    " instantaneous firings at time " + format_double(now_));
    }
    fire(pick_instantaneous());
    return true;
  }
  chain_ = 0;
  if (timed_.empty()) {
    finish(SimStatus::Absorbed, now_);
    return false;
  }
  const auto [t, a] = *timed_.begin();
  if (cfg_.stop_at_time && t > *cfg_.stop_at_time) {
    now_ = *cfg_.stop_at_time;
    finish(SimStatus::TimeLimit, now_);
    return false;
  }
  now_ = t;
  fire(a);
  return true;
}

void Simulator::run() {
  while (step()) {
  }
}

Trajectory Simulator::take() {
  if (traj_.status == SimStatus::Running) finish(SimStatus::Running, now_);
  return std::move(traj_);
}

Trajectory simulate(const FlatModel& fm, const ConnectivityLists& cl, const SimConfig& cfg) {
  Simulator sim(fm, cl, cfg);
  sim.run();
  return sim.take();
}

std::optional<std::size_t> compare_trajectories(const Trajectory& a, const Trajectory& b) {
  const std::size_t n = std::min(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Event& x = a.events[i];
    const Event& y = b.events[i];
    if (x.time != y.time || x.activity != y.activity || x.case_index != y.case_index) return i;
    const auto cx = a.changes_of(x);
    const auto cy = b.changes_of(y);
    if (!std::equal(cx.begin(), cx.end(), cy.begin(), cy.end())) return i;
  }
  if (a.events.size() != b.events.size()) return n;
  return std::nullopt;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_trace(std::ostream& os, const Trajectory& t) {
  std::string line;
  for (const Event& e : t.events) {
    line = format_double(e.time);
    line += '\t';
    line += std::to_string(e.activity);
    line += '\t';
    line += std::to_string(e.case_index);
    line += '\t';
    bool first = true;
    for (const VarChange& c : t.changes_of(e)) {
      if (!first) line += ',';
      first = false;
      line += std::to_string(c.var) + ':' + std::to_string(c.old_value) + "->" + std::to_string(c.new_value);
    }
    line += '\n';
    os << line;
  }
}

}  // namespace narep
