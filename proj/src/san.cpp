#include "narep/san.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace narep {

Expr PlaceDecl::initial_for(std::int64_t entry) const {
  if (initial.empty()) return Expr::integer(0);
  if (initial.size() == 1) return initial.front();
  return initial.at(static_cast<std::size_t>(entry));
}

std::string_view to_string(Timing t) {
  switch (t) {
    case Timing::Exponential: return "exp";
    case Timing::Deterministic: return "det";
    case Timing::Instantaneous: return "instant";
  }
  return "?";
}

int AtomicModel::place_index(std::string_view name) const {
  for (std::size_t i = 0; i < places.size(); ++i) {
    if (places[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const PlaceDecl* AtomicModel::find_place(std::string_view name) const {
  const int i = place_index(name);
  return i < 0 ? nullptr : &places[static_cast<std::size_t>(i)];
}

namespace {

class Validator {
 public:
  explicit Validator(const AtomicModel& m) : m_(m) {}

  std::vector<Diagnostic> run() {
    std::set<std::string> seen;
    for (const PlaceDecl& p : m_.places) {
      if (!seen.insert(p.name).second) {
        report(p.pos, "DUPLICATE_PLACE", "place '" + p.name + "' declared twice");
      }
      if (p.length && *p.length < 1) {
        report(p.pos, "BAD_LENGTH", "array place '" + p.name + "' needs length >= 1");
      }
      const std::size_t count = p.initial.size();
      if (count > 1 && static_cast<std::int64_t>(count) != p.entries()) {
        report(p.pos, "BAD_INIT_COUNT",
               "place '" + p.name + "' has " + std::to_string(count) + " initial values for " +
                   std::to_string(p.entries()) + " entries");
      }
      for (const Expr& e : p.initial) {
        typed(e, ExprRole::Integer);
        if (reads_places(e)) {
          report(e.pos(), "INIT_READS_PLACE", "initial marking of '" + p.name + "' reads a place");
        }
      }
    }

    seen.clear();
    for (const ActivityDecl& a : m_.activities) {
      if (!seen.insert(a.name).second) {
        report(a.pos, "DUPLICATE_ACTIVITY", "activity '" + a.name + "' declared twice");
      }
      expression(a.enabling, ExprRole::Predicate);
      if (a.timing == Timing::Instantaneous) {
        expression(a.weight, ExprRole::Numeric);
        if (a.priority < 0) report(a.pos, "NEGATIVE_PRIORITY", "priority must be >= 0");
        non_negative(a.weight, "NEGATIVE_WEIGHT", "activity weight");
      } else {
        expression(a.rate, ExprRole::Numeric);
        if (const auto v = constant(a.rate)) {
          if (a.timing == Timing::Exponential && !(v->as_real() > 0)) {
            report(a.rate.pos(), "NONPOSITIVE_RATE",
                   "rate of '" + a.name + "' is " + pretty_print(a.rate));
          }
          if (a.timing == Timing::Deterministic && !(v->as_real() >= 0)) {
            report(a.rate.pos(), "NEGATIVE_DELAY",
                   "delay of '" + a.name + "' is " + pretty_print(a.rate));
          }
        }
      }
      if (a.cases.empty()) report(a.pos, "NO_CASES", "activity '" + a.name + "' has no cases");
      for (const Case& c : a.cases) {
        expression(c.weight, ExprRole::Numeric);
        non_negative(c.weight, "NEGATIVE_WEIGHT", "case weight");
        for (const UpdateStmt& u : c.updates) {
          const auto* t = u.target.as<ast::PlaceRead>();
          if (!t) {
            report(u.target.pos(), "BAD_TARGET", "update target must be a place");
          } else {
            place_read(*t, u.target.pos());
            for (const Expr& i : t->indices) expression(i, ExprRole::Integer);
          }
          expression(u.value, ExprRole::Integer);
        }
      }
    }

    std::sort(diags_.begin(), diags_.end(), [](const Diagnostic& a, const Diagnostic& b) {
      return std::tie(a.pos, a.rule, a.message) < std::tie(b.pos, b.rule, b.message);
    });
    return std::move(diags_);
  }

 private:
  void report(SourcePos pos, std::string rule, std::string message) {
    diags_.push_back({pos, std::move(rule), std::move(message)});
  }

  void typed(const Expr& e, ExprRole role) {
    try {
      check_type(e, role);
    } catch (const Error& err) {
      report(err.pos() == SourcePos{} ? e.pos() : err.pos(), "TYPE_ERROR", err.detail());
    }
  }

  void place_read(const ast::PlaceRead& r, SourcePos pos) {
    const PlaceDecl* p = m_.find_place(r.place);
    if (!p) {
      report(pos, "UNKNOWN_PLACE", "unknown place '" + r.place + "'");
      return;
    }
    // one optional replica bracket on top of the entry bracket
    const std::size_t base = p->is_array() ? 1 : 0;
    if (r.indices.size() != base && r.indices.size() != base + 1) {
      report(pos, "BAD_ARITY",
             "place '" + r.place + "' takes " + std::to_string(base) + " or " +
                 std::to_string(base + 1) + " indices, got " + std::to_string(r.indices.size()));
    }
  }

  void expression(const Expr& e, ExprRole role) {
    typed(e, role);
    for_each_subexpression(e, [&](const Expr& sub) {
      if (const auto* r = sub.as<ast::PlaceRead>()) place_read(*r, sub.pos());
      if (const auto* q = sub.as<ast::RepSharedQuery>()) {
        if (!m_.find_place(q->place)) {
          report(sub.pos(), "UNKNOWN_PLACE", "unknown place '" + q->place + "'");
        }
      }
    });
  }

  static std::optional<Value> constant(const Expr& e) {
    if (!e.cached_type() || reads_places(e) || uses_rep_index(e) || uses_size_n(e)) {
      return std::nullopt;
    }
    auto v = try_fold(e, 0, 1);
    if (v && v->is_bool()) return std::nullopt;
    return v;
  }

  void non_negative(const Expr& e, const char* rule, const char* what) {
    if (const auto v = constant(e)) {
      if (!(v->as_real() >= 0)) report(e.pos(), rule, std::string(what) + " is negative");
    }
  }

  const AtomicModel& m_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate(const AtomicModel& m) { return Validator(m).run(); }

void require_valid(const AtomicModel& m) {
  const auto diags = validate(m);
  if (!diags.empty()) {
    const Diagnostic& d = diags.front();
    fail(Errc::ValidationError, "model '" + m.name + "': " + d.message, d.pos, d.rule);
  }
}

}  // namespace narep
