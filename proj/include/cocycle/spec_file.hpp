#pragma once

// JSON cocycle description files.
//
//   {
//     "alphabet": 2,
//     "transition": [[1, 1], [1, 0]],      // optional, default full shift
//     "dim": 2,
//     "window": 1,                          // optional, default 1
//     "operators": {"0": [[1, 1], [0, 1]], "1": [[1, 0], [1, 1]]},
//     "alpha": 1.0                          // optional, default 1
//   }
//
// Instead of "operators", a file may carry
//   "compact_model": {"kind": "diagonal" | "weighted-shift",
//                     "family": "geometric" | "power",
//                     "params": {"c": 1, "q": 0.5} or {"c": 1, "p": 2},
//                     "rank": m}
// which expands to a one-symbol constant cocycle whose value is the rank-m
// truncation.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cocycle/compact.hpp"
#include "cocycle/dynamics.hpp"
#include "cocycle/errors.hpp"

namespace cocycle::io {

/// Malformed spec file; key() names the offending JSON key path.
class SpecError : public InvalidInput {
 public:
  SpecError(std::string key, const std::string& what)
      : InvalidInput(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct CompactSpec {
  CompactModel<double> model;
  int rank = 1;

  bool operator==(const CompactSpec&) const = default;
};

struct CocycleSpec {
  int alphabet = 1;
  Subshift::Transition transition;
  int dim = 1;
  int window = 1;
  std::map<Word, Operator<double>> operators;
  std::optional<CompactSpec> compact;
  double alpha = 1.0;

  Subshift subshift() const { return Subshift(transition); }
  WindowCocycle<double> cocycle() const { return WindowCocycle<double>(subshift(), window, operators, alpha); }

  bool operator==(const CocycleSpec& other) const;
};

CocycleSpec parse_spec(std::string_view json_text);
CocycleSpec load_spec(const std::filesystem::path& path);

/// Canonical JSON for a spec; parse_spec(emit_spec(x)) == x.
std::string emit_spec(const CocycleSpec& spec);

}  // namespace cocycle::io
