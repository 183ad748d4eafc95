#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "enverify/hcir.hpp"
#include "enverify/rational.hpp"

namespace enverify {

struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

enum class BoundSide { Lower, Upper };

// Instruction-level energy model: per leaf name/arity a [lower, upper]
// cost interval in the declared unit. Immutable after load.
class EnergyModel {
 public:
  struct Entry {
    Rat lower;
    Rat upper;
  };
  using Key = std::pair<std::string, size_t>;

  EnergyModel() = default;
  EnergyModel(std::string modelName, std::string unit,
              std::map<Key, Entry> entries);

  const std::string& modelName() const { return modelName_; }
  const std::string& unit() const { return unit_; }
  const std::map<Key, Entry>& entries() const { return entries_; }

  bool hasEntry(const std::string& name, size_t arity) const;
  bool hasName(const std::string& name) const;
  const Entry* find(const std::string& name, size_t arity) const;

 private:
  std::string modelName_;
  std::string unit_;
  std::map<Key, Entry> entries_;
};

// Parses and validates the JSON model format:
//   {"model_name": "...", "unit": "nJ",
//    "instructions": {"add/3": {"lower": 2, "upper": 2},
//                     "nop/0": {"cost": 1}}}
// `model_name` is optional; `unit` and `instructions` are required and no
// other top-level keys are accepted. Costs are exact: JSON integers or
// strings holding an integer, fraction ("5/2"), or decimal; binary floats
// are rejected. `cost` abbreviates lower = upper. Every entry needs
// 0 <= lower <= upper. Throws ModelError.
EnergyModel loadModel(const std::string& jsonText);

// Canonical form: loadModel(serializeModel(m)) reproduces m exactly, and
// serializing again yields the same text.
std::string serializeModel(const EnergyModel& m);

// Cost endpoint for a leaf literal. Builtins without an entry cost 0;
// a call without an entry throws ModelError (callers surface this as a
// validation diagnostic).
Rat lookup(const EnergyModel& m, const Literal& lit, BoundSide bound);

std::optional<Rat> tryLookup(const EnergyModel& m, const std::string& name,
                             size_t arity, BoundSide bound);

}  // namespace enverify
