#pragma once

// Model files: atomic templates, one composition, reward variables. The
// grammar is documented in docs/grammar.md.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "narep/compose.hpp"
#include "narep/rewards.hpp"
#include "narep/san.hpp"

namespace narep {

struct ModelFile {
  std::vector<std::shared_ptr<const AtomicModel>> atomics;
  CompositionNode root;
  std::vector<RewardVar> rewards;

  const RewardVar* find_reward(std::string_view name) const;
};

/// Errors: SyntaxError, ValidationError (rule id of the violated rule).
ModelFile parse_model(std::string_view text);

/// Reads and parses a file. Errors: IoError, plus those of parse_model with
/// the file name prefixed to the message.
ModelFile load(const std::string& path);

}  // namespace narep
