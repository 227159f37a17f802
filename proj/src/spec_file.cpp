#include "cocycle/spec_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cocycle::io {

namespace {

using nlohmann::json;

std::string index_key(const std::string& key, std::size_t i) { return key + "[" + std::to_string(i) + "]"; }

int require_int(const json& node, const std::string& key, int min_value) {
  if (!node.is_number_integer() && !(node.is_number_float() && std::floor(node.get<double>()) == node.get<double>()))
    throw SpecError(key, "expected an integer");
  const double v = node.get<double>();
  if (v < min_value || v > 1e6) throw SpecError(key, "expected an integer >= " + std::to_string(min_value));
  return static_cast<int>(v);
}

double require_real(const json& node, const std::string& key) {
  if (!node.is_number()) throw SpecError(key, "expected a number");
  const double v = node.get<double>();
  if (!std::isfinite(v)) throw SpecError(key, "expected a finite number");
  return v;
}

Operator<double> parse_matrix(const json& node, const std::string& key, int rows, int cols) {
  if (!node.is_array() || static_cast<int>(node.size()) != rows)
    throw SpecError(key, "expected an array of " + std::to_string(rows) + " rows");
  Operator<double> m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto row_key = index_key(key, i);
    const json& row = node[i];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw SpecError(row_key, "expected a row of " + std::to_string(cols) + " numbers");
    for (int j = 0; j < cols; ++j) m(i, j) = require_real(row[j], index_key(row_key, j));
  }
  return m;
}

CompactSpec parse_compact(const json& node) {
  const std::string key = "compact_model";
  if (!node.is_object()) throw SpecError(key, "expected an object");
  CompactSpec spec;
  auto field = [&](const char* name) -> const json& {
    if (!node.contains(name)) throw SpecError(key + "." + name, "missing");
    return node.at(name);
  };
  const json& kind = field("kind");
  if (kind == "diagonal") {
    spec.model.kind = CompactKind::diagonal;
  } else if (kind == "weighted-shift") {
    spec.model.kind = CompactKind::weighted_shift;
  } else {
    throw SpecError(key + ".kind", "expected \"diagonal\" or \"weighted-shift\"");
  }
  const json& family = field("family");
  const char* exponent_name = nullptr;
  if (family == "geometric") {
    spec.model.family = CoefficientFamily::geometric;
    exponent_name = "q";
  } else if (family == "power") {
    spec.model.family = CoefficientFamily::power;
    exponent_name = "p";
  } else {
    throw SpecError(key + ".family", "expected \"geometric\" or \"power\"");
  }
  const json& params = field("params");
  const std::string params_key = key + ".params";
  if (!params.is_object()) throw SpecError(params_key, "expected an object");
  spec.model.scale = params.contains("c") ? require_real(params.at("c"), params_key + ".c") : 1.0;
  if (!params.contains(exponent_name)) throw SpecError(params_key + "." + exponent_name, "missing");
  spec.model.exponent = require_real(params.at(exponent_name), params_key + "." + exponent_name);
  try {
    spec.model.validate();
  } catch (const std::exception& e) {
    throw SpecError(params_key, e.what());
  }
  spec.rank = require_int(field("rank"), key + ".rank", 1);
  return spec;
}

void reject_unknown_keys(const json& doc) {
  static const char* known[] = {"alphabet", "transition", "dim", "window", "operators", "compact_model", "alpha"};
  for (const auto& item : doc.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw SpecError(item.key(), "unknown key");
  }
}

}  // namespace

bool CocycleSpec::operator==(const CocycleSpec& other) const {
  if (alphabet != other.alphabet || dim != other.dim || window != other.window || alpha != other.alpha ||
      compact != other.compact || transition != other.transition || operators.size() != other.operators.size())
    return false;
  for (const auto& [word, op] : operators) {
    const auto it = other.operators.find(word);
    if (it == other.operators.end() || it->second.rows() != op.rows() || it->second != op) return false;
  }
  return true;
}

CocycleSpec parse_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw SpecError("<document>", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SpecError("<document>", "expected a JSON object");
  reject_unknown_keys(doc);

  CocycleSpec spec;
  if (doc.contains("alpha")) {
    spec.alpha = require_real(doc.at("alpha"), "alpha");
    if (!(spec.alpha > 0)) throw SpecError("alpha", "expected a positive number");
  }

  if (doc.contains("compact_model")) {
    if (doc.contains("operators")) throw SpecError("operators", "not allowed together with compact_model");
    spec.compact = parse_compact(doc.at("compact_model"));
    spec.alphabet = 1;
    spec.dim = spec.compact->rank;
    spec.window = 1;
    if (doc.contains("alphabet") && require_int(doc.at("alphabet"), "alphabet", 1) != 1)
      throw SpecError("alphabet", "compact_model files have a single symbol");
    if (doc.contains("dim") && require_int(doc.at("dim"), "dim", 1) != spec.dim)
      throw SpecError("dim", "must equal compact_model.rank");
    if (doc.contains("window") && require_int(doc.at("window"), "window", 1) != 1)
      throw SpecError("window", "compact_model files use window 1");
    if (doc.contains("transition")) {
      const auto t = parse_matrix(doc.at("transition"), "transition", 1, 1);
      if (t(0, 0) != 1) throw SpecError("transition", "single-symbol shift needs transition [[1]]");
    }
    spec.transition = Subshift::Transition::Ones(1, 1);
    spec.operators.emplace(Word{{0}}, truncate(spec.compact->model, spec.compact->rank).matrix);
    return spec;
  }

  if (!doc.contains("alphabet")) throw SpecError("alphabet", "missing");
  spec.alphabet = require_int(doc.at("alphabet"), "alphabet", 1);
  if (spec.alphabet > kMaxAlphabet) throw SpecError("alphabet", "at most 36 symbols are supported");
  if (!doc.contains("dim")) throw SpecError("dim", "missing");
  spec.dim = require_int(doc.at("dim"), "dim", 1);
  if (doc.contains("window")) spec.window = require_int(doc.at("window"), "window", 1);

  if (doc.contains("transition")) {
    const auto t = parse_matrix(doc.at("transition"), "transition", spec.alphabet, spec.alphabet);
    spec.transition.resize(spec.alphabet, spec.alphabet);
    for (int a = 0; a < spec.alphabet; ++a)
      for (int b = 0; b < spec.alphabet; ++b) {
        if (t(a, b) != 0 && t(a, b) != 1)
          throw SpecError(index_key(index_key("transition", a), b), "expected 0 or 1");
        spec.transition(a, b) = static_cast<int>(t(a, b));
      }
  } else {
    spec.transition = Subshift::Transition::Ones(spec.alphabet, spec.alphabet);
  }
  std::optional<Subshift> shift;
  try {
    shift.emplace(spec.transition);
  } catch (const InvalidInput& e) {
    throw SpecError("transition", e.what());
  }

  if (!doc.contains("operators")) throw SpecError("operators", "missing");
  const json& ops = doc.at("operators");
  if (!ops.is_object()) throw SpecError("operators", "expected an object keyed by window words");
  for (const auto& item : ops.items()) {
    const std::string key = "operators[\"" + item.key() + "\"]";
    Word w;
    try {
      w = parse_word(item.key());
    } catch (const InvalidInput& e) {
      throw SpecError(key, e.what());
    }
    if (static_cast<int>(w.size()) != spec.window) throw SpecError(key, "key length differs from window");
    for (int a : w.symbols)
      if (a >= spec.alphabet) throw SpecError(key, "symbol outside the alphabet");
    if (!shift->admissible(w)) throw SpecError(key, "window word is not admissible");
    spec.operators.emplace(std::move(w), parse_matrix(item.value(), key, spec.dim, spec.dim));
  }
  for (const Word& w : admissible_words(*shift, spec.window))
    if (!spec.operators.count(w))
      throw SpecError("operators", "missing entry for admissible window \"" + to_string(w) + "\"");
  return spec;
}

CocycleSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("<file>", "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_spec(buffer.str());
}

std::string emit_spec(const CocycleSpec& spec) {
  json doc;
  doc["alpha"] = spec.alpha;
  if (spec.compact) {
    const auto& m = spec.compact->model;
    json params;
    params["c"] = m.scale;
    params[m.family == CoefficientFamily::geometric ? "q" : "p"] = m.exponent;
    doc["compact_model"] = {
        {"kind", m.kind == CompactKind::diagonal ? "diagonal" : "weighted-shift"},
        {"family", m.family == CoefficientFamily::geometric ? "geometric" : "power"},
        {"params", params},
        {"rank", spec.compact->rank},
    };
    return doc.dump(2) + "\n";
  }
  doc["alphabet"] = spec.alphabet;
  doc["dim"] = spec.dim;
  doc["window"] = spec.window;
  json transition = json::array();
  for (int a = 0; a < spec.transition.rows(); ++a) {
    json row = json::array();
    for (int b = 0; b < spec.transition.cols(); ++b) row.push_back(spec.transition(a, b));
    transition.push_back(row);
  }
  doc["transition"] = transition;
  json ops = json::object();
  for (const auto& [word, op] : spec.operators) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < op.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < op.cols(); ++j) row.push_back(op(i, j));
      rows.push_back(row);
    }
    ops[to_string(word)] = rows;
  }
  doc["operators"] = ops;
  return doc.dump(2) + "\n";
}

}  // namespace cocycle::io
