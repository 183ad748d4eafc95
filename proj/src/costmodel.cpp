#include "enverify/costmodel.hpp"

#include <cctype>

#include <json.hpp>

namespace enverify {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

Rat parseCost(const json& v, const std::string& where) {
  if (v.is_number_integer() || v.is_number_unsigned()) {
    return Rat(Int(v.dump()));
  }
  if (v.is_string()) {
    try {
      return ratFromString(v.get<std::string>());
    } catch (const std::exception& e) {
      throw ModelError(where + ": " + e.what());
    }
  }
  if (v.is_number_float())
    throw ModelError(where +
                     ": binary floating-point cost rejected; use an integer "
                     "or a string like \"5/2\"");
  throw ModelError(where + ": cost must be an integer or a string");
}

EnergyModel::Key parseEntryKey(const std::string& key) {
  size_t slash = key.rfind('/');
  if (slash == std::string::npos || slash == 0 || slash + 1 == key.size())
    throw ModelError("instruction key '" + key +
                     "' is not of the form name/arity");
  const std::string name = key.substr(0, slash);
  const std::string arityText = key.substr(slash + 1);
  for (char c : arityText)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ModelError("instruction key '" + key + "' has a malformed arity");
  return {name, static_cast<size_t>(std::stoul(arityText))};
}

}  // namespace

EnergyModel::EnergyModel(std::string modelName, std::string unit,
                         std::map<Key, Entry> entries)
    : modelName_(std::move(modelName)),
      unit_(std::move(unit)),
      entries_(std::move(entries)) {
  for (const auto& [key, e] : entries_) {
    if (sgn(e.lower) < 0)
      throw ModelError("negative cost for " + key.first + "/" +
                       std::to_string(key.second));
    if (e.lower > e.upper)
      throw ModelError("lower bound exceeds upper bound for " + key.first +
                       "/" + std::to_string(key.second));
  }
}

bool EnergyModel::hasEntry(const std::string& name, size_t arity) const {
  return entries_.count({name, arity}) != 0;
}

bool EnergyModel::hasName(const std::string& name) const {
  auto it = entries_.lower_bound({name, 0});
  return it != entries_.end() && it->first.first == name;
}

const EnergyModel::Entry* EnergyModel::find(const std::string& name,
                                            size_t arity) const {
  auto it = entries_.find({name, arity});
  return it == entries_.end() ? nullptr : &it->second;
}

EnergyModel loadModel(const std::string& jsonText) {
  json doc;
  try {
    doc = json::parse(jsonText);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("model is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("model must be a JSON object");

  for (const auto& [key, value] : doc.items()) {
    if (key != "model_name" && key != "unit" && key != "instructions")
      throw ModelError("unknown top-level key '" + key + "'");
  }
  std::string modelName;
  if (doc.contains("model_name")) {
    if (!doc["model_name"].is_string())
      throw ModelError("model_name must be a string");
    modelName = doc["model_name"].get<std::string>();
  }
  if (!doc.contains("unit") || !doc["unit"].is_string())
    throw ModelError("missing or malformed 'unit'");
  std::string unit = doc["unit"].get<std::string>();
  if (!doc.contains("instructions") || !doc["instructions"].is_object())
    throw ModelError("missing or malformed 'instructions'");

  std::map<EnergyModel::Key, EnergyModel::Entry> entries;
  for (const auto& [key, value] : doc["instructions"].items()) {
    EnergyModel::Key k = parseEntryKey(key);
    if (!value.is_object())
      throw ModelError("entry '" + key + "' must be an object");
    bool hasCost = value.contains("cost");
    bool hasLower = value.contains("lower");
    bool hasUpper = value.contains("upper");
    for (const auto& [field, fv] : value.items())
      if (field != "cost" && field != "lower" && field != "upper")
        throw ModelError("entry '" + key + "' has unknown field '" + field +
                         "'");
    EnergyModel::Entry e;
    if (hasCost) {
      if (hasLower || hasUpper)
        throw ModelError("entry '" + key +
                         "' mixes 'cost' with 'lower'/'upper'");
      e.lower = e.upper = parseCost(value["cost"], "entry '" + key + "'");
    } else if (hasLower && hasUpper) {
      e.lower = parseCost(value["lower"], "entry '" + key + "'");
      e.upper = parseCost(value["upper"], "entry '" + key + "'");
    } else {
      throw ModelError("entry '" + key +
                       "' needs either 'cost' or both 'lower' and 'upper'");
    }
    entries.emplace(std::move(k), std::move(e));
  }
  return EnergyModel(std::move(modelName), std::move(unit),
                     std::move(entries));
}

std::string serializeModel(const EnergyModel& m) {
  ordered_json doc;
  doc["model_name"] = m.modelName();
  doc["unit"] = m.unit();
  ordered_json instr = ordered_json::object();
  for (const auto& [key, e] : m.entries()) {
    ordered_json entry;
    if (e.lower == e.upper) {
      entry["cost"] = ratToString(e.lower);
    } else {
      entry["lower"] = ratToString(e.lower);
      entry["upper"] = ratToString(e.upper);
    }
    instr[key.first + "/" + std::to_string(key.second)] = std::move(entry);
  }
  doc["instructions"] = std::move(instr);
  return doc.dump(2) + "\n";
}

Rat lookup(const EnergyModel& m, const Literal& lit, BoundSide bound) {
  if (const EnergyModel::Entry* e = m.find(lit.name, lit.args.size()))
    return bound == BoundSide::Lower ? e->lower : e->upper;
  if (lit.kind == LiteralKind::Builtin) return Rat(0);
  throw ModelError("no model entry for " + lit.name + "/" +
                   std::to_string(lit.args.size()));
}

std::optional<Rat> tryLookup(const EnergyModel& m, const std::string& name,
                             size_t arity, BoundSide bound) {
  if (const EnergyModel::Entry* e = m.find(name, arity))
    return bound == BoundSide::Lower ? e->lower : e->upper;
  return std::nullopt;
}

}  // namespace enverify
