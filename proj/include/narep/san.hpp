#pragma once

// Atomic SAN templates: places, activities with cases, and validation.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "narep/expr.hpp"

namespace narep {

struct PlaceDecl {
  std::string name;
  /// Array length for extended places; nullopt for scalar places.
  std::optional<std::int64_t> length;
  /// Empty: all zeros. One entry: applied to every array entry. Otherwise one
  /// expression per entry.
  std::vector<Expr> initial;
  SourcePos pos;

  bool is_array() const { return length.has_value(); }
  std::int64_t entries() const { return length.value_or(1); }
  /// Initial expression for one entry (0 for scalars).
  Expr initial_for(std::int64_t entry) const;
};

enum class Timing { Exponential, Deterministic, Instantaneous };

std::string_view to_string(Timing t);

struct Case {
  Expr weight = Expr::integer(1);
  std::vector<UpdateStmt> updates;
};

struct ActivityDecl {
  std::string name;
  Timing timing = Timing::Exponential;
  /// Rate for exponential activities, delay for deterministic ones.
  Expr rate = Expr::integer(1);
  /// Selection weight among enabled instantaneous activities of equal
  /// priority.
  Expr weight = Expr::integer(1);
  int priority = 0;
  Expr enabling = Expr::boolean(true);
  std::vector<Case> cases;
  SourcePos pos;

  bool timed() const { return timing != Timing::Instantaneous; }
};

struct AtomicModel {
  std::string name;
  std::vector<PlaceDecl> places;
  std::vector<ActivityDecl> activities;
  SourcePos pos;

  /// Index of the place called `name`, or -1.
  int place_index(std::string_view name) const;
  const PlaceDecl* find_place(std::string_view name) const;
};

struct Diagnostic {
  SourcePos pos;
  std::string rule;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// All rule violations of `m`, sorted by location, then rule id. Rules:
/// DUPLICATE_PLACE, DUPLICATE_ACTIVITY, BAD_LENGTH, BAD_INIT_COUNT,
/// INIT_READS_PLACE, UNKNOWN_PLACE, BAD_ARITY, TYPE_ERROR, NONPOSITIVE_RATE,
/// NEGATIVE_DELAY, NEGATIVE_WEIGHT, NEGATIVE_PRIORITY, NO_CASES,
/// BAD_TARGET.
std::vector<Diagnostic> validate(const AtomicModel& m);

/// Throws Error(ValidationError) carrying the first diagnostic, if any.
void require_valid(const AtomicModel& m);

/// Dense vector of marks indexed by canonical variable id.
using Marking = std::vector<std::int64_t>;

}  // namespace narep
