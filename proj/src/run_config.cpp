#include "rareips/run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rareips {

using nlohmann::json;

std::string to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kMc: return "mc";
    case AlgorithmKind::kIsIncrement: return "is_increment";
    case AlgorithmKind::kIsPosition: return "is_position";
    case AlgorithmKind::kIpsPotential: return "ips_potential";
    case AlgorithmKind::kIpsIncrement: return "ips_increment";
  }
  return "?";
}

std::string to_string(ModelChoice kind) {
  return kind == ModelChoice::kGaussian ? "gaussian" : "pmd";
}

std::string parameter_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kMc: return "";
    case AlgorithmKind::kIsIncrement:
    case AlgorithmKind::kIsPosition: return "lambda";
    case AlgorithmKind::kIpsPotential: return "beta";
    case AlgorithmKind::kIpsIncrement: return "alpha";
  }
  return "";
}

bool RunConfig::operator==(const RunConfig& o) const {
  return model == o.model && algorithm == o.algorithm &&
         population == o.population && bins.a_min == o.bins.a_min &&
         bins.a_max == o.bins.a_max && bins.delta_a == o.bins.delta_a &&
         min_hits == o.min_hits && replicates == o.replicates &&
         master_seed == o.master_seed && replicate_seeds == o.replicate_seeds &&
         output == o.output && record_snapshots == o.record_snapshots &&
         dump_history == o.dump_history && workers == o.workers;
}

namespace {

// Walks one JSON object, rejecting keys nobody asked about.
bool is_non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_, "an object");
  }

  [[noreturn]] static void fail(const std::string& key, const std::string& what) {
    throw ConfigError("config key '" + key + "' must be " + what);
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  const json& required(const std::string& key) {
    if (!has(key)) {
      throw ConfigError("config key '" + key_path(key) + "' is missing");
    }
    return obj_.at(key);
  }

  void forbid(const std::string& key, const std::string& reason) {
    if (obj_.contains(key)) {
      throw ConfigError("config key '" + key_path(key) + "' is not allowed " +
                        reason);
    }
  }

  std::string string(const std::string& key) {
    const json& v = required(key);
    if (!v.is_string()) fail(key_path(key), "a string");
    return v.get<std::string>();
  }

  double number(const std::string& key) {
    const json& v = required(key);
    if (!v.is_number()) fail(key_path(key), "a number");
    return v.get<double>();
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const json& v = required(key);
    if (!is_non_negative_integer(v)) fail(key_path(key), "a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key) {
    const json& v = required(key);
    if (!v.is_boolean()) fail(key_path(key), "true or false");
    return v.get<bool>();
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) {
        throw ConfigError("unknown config key '" + key_path(key) + "'");
      }
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

ModelConfig parse_model(const json& doc) {
  ObjectReader r(doc, "model");
  ModelConfig m;
  const std::string kind = r.string("kind");
  if (kind == "gaussian") {
    m.kind = ModelChoice::kGaussian;
    r.forbid("sigma", "for the gaussian model");
  } else if (kind == "pmd") {
    m.kind = ModelChoice::kPmd;
    m.sigma = r.number("sigma");
    if (!(*m.sigma > 0.0)) ObjectReader::fail("model.sigma", "> 0");
  } else {
    ObjectReader::fail("model.kind", "one of gaussian, pmd");
  }
  m.n = r.unsigned_integer("n");
  if (m.n == 0) ObjectReader::fail("model.n", ">= 1");
  r.finish();
  return m;
}

AlgorithmConfig parse_algorithm(const json& doc) {
  ObjectReader r(doc, "algorithm");
  AlgorithmConfig a;
  const std::string kind = r.string("kind");
  if (kind == "mc") a.kind = AlgorithmKind::kMc;
  else if (kind == "is_increment") a.kind = AlgorithmKind::kIsIncrement;
  else if (kind == "is_position") a.kind = AlgorithmKind::kIsPosition;
  else if (kind == "ips_potential") a.kind = AlgorithmKind::kIpsPotential;
  else if (kind == "ips_increment") a.kind = AlgorithmKind::kIpsIncrement;
  else {
    ObjectReader::fail("algorithm.kind",
                       "one of mc, is_increment, is_position, ips_potential, "
                       "ips_increment");
  }

  const std::string param = parameter_name(a.kind);
  for (const char* other : {"lambda", "alpha", "beta"}) {
    if (other != param) r.forbid(other, "for algorithm " + kind);
  }
  if (!param.empty()) {
    const json& v = r.required(param);
    const std::string key = "algorithm." + param;
    if (v.is_number()) {
      a.values.push_back(v.get<double>());
    } else if (v.is_array() && !v.empty()) {
      for (const auto& x : v) {
        if (!x.is_number()) ObjectReader::fail(key, "a number or a list of numbers");
        a.values.push_back(x.get<double>());
      }
    } else {
      ObjectReader::fail(key, "a number or a non-empty list of numbers");
    }
    for (double x : a.values) {
      if (!std::isfinite(x)) ObjectReader::fail(key, "finite");
      if (param != "lambda" && x < 0.0) ObjectReader::fail(key, ">= 0");
    }
  }

  const bool ips = a.kind == AlgorithmKind::kIpsPotential ||
                   a.kind == AlgorithmKind::kIpsIncrement;
  if (ips) {
    if (r.has("selection_period")) {
      a.selection_period = r.unsigned_integer("selection_period");
      if (a.selection_period == 0) {
        ObjectReader::fail("algorithm.selection_period", ">= 1");
      }
    }
    if (r.has("v0")) a.v0 = r.number("v0");
  } else {
    r.forbid("selection_period", "for algorithm " + kind);
    r.forbid("v0", "for algorithm " + kind);
  }
  r.finish();
  return a;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  ObjectReader r(doc, "");
  RunConfig c;
  c.model = parse_model(r.required("model"));
  c.algorithm = parse_algorithm(r.required("algorithm"));
  if ((c.algorithm.kind == AlgorithmKind::kIsIncrement ||
       c.algorithm.kind == AlgorithmKind::kIsPosition) &&
      c.model.kind != ModelChoice::kGaussian) {
    throw ConfigError("config key 'algorithm.kind': importance sampling "
                      "requires the gaussian model");
  }

  c.population = r.unsigned_integer("population");
  if (c.population < 2) ObjectReader::fail("population", ">= 2");

  {
    ObjectReader b(r.required("bins"), "bins");
    c.bins.a_min = b.number("a_min");
    c.bins.a_max = b.number("a_max");
    c.bins.delta_a = b.number("delta_a");
    if (b.has("min_hits")) c.min_hits = b.unsigned_integer("min_hits");
    b.finish();
    if (!(c.bins.delta_a > 0.0)) ObjectReader::fail("bins.delta_a", "> 0");
    if (!(c.bins.a_max > c.bins.a_min)) ObjectReader::fail("bins.a_max", "> bins.a_min");
  }

  if (r.has("replicates")) {
    c.replicates = r.unsigned_integer("replicates");
    if (c.replicates == 0) ObjectReader::fail("replicates", ">= 1");
  }
  c.master_seed = r.unsigned_integer("master_seed");
  if (r.has("replicate_seeds")) {
    const json& v = r.required("replicate_seeds");
    if (!v.is_array()) ObjectReader::fail("replicate_seeds", "a list of integers");
    for (const auto& s : v) {
      if (!is_non_negative_integer(s)) {
        ObjectReader::fail("replicate_seeds", "a list of non-negative integers");
      }
      c.replicate_seeds.push_back(s.get<std::uint64_t>());
    }
    if (c.replicate_seeds.size() != c.replicates) {
      ObjectReader::fail("replicate_seeds", "a list with one seed per replicate");
    }
  }
  c.output = r.string("output");
  if (r.has("genealogy")) {
    ObjectReader g(r.required("genealogy"), "genealogy");
    c.record_snapshots = g.boolean("record_snapshots");
    if (g.has("dump")) c.dump_history = g.boolean("dump");
    g.finish();
    if (c.dump_history && !c.record_snapshots) {
      ObjectReader::fail("genealogy.dump", "false unless record_snapshots is true");
    }
  }
  if (r.has("workers")) {
    c.workers = r.unsigned_integer("workers");
    if (c.workers == 0) ObjectReader::fail("workers", ">= 1");
  }
  r.finish();
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json serialize_config(const RunConfig& c) {
  json model = {{"kind", to_string(c.model.kind)}, {"n", c.model.n}};
  if (c.model.sigma) model["sigma"] = *c.model.sigma;

  json algorithm = {{"kind", to_string(c.algorithm.kind)}};
  const std::string param = parameter_name(c.algorithm.kind);
  if (!param.empty()) algorithm[param] = c.algorithm.values;
  if (c.algorithm.kind == AlgorithmKind::kIpsPotential ||
      c.algorithm.kind == AlgorithmKind::kIpsIncrement) {
    algorithm["selection_period"] = c.algorithm.selection_period;
    algorithm["v0"] = c.algorithm.v0;
  }

  json doc = {
      {"model", model},
      {"algorithm", algorithm},
      {"population", c.population},
      {"bins",
       {{"a_min", c.bins.a_min},
        {"a_max", c.bins.a_max},
        {"delta_a", c.bins.delta_a},
        {"min_hits", c.min_hits}}},
      {"replicates", c.replicates},
      {"master_seed", c.master_seed},
      {"output", c.output},
      {"genealogy",
       {{"record_snapshots", c.record_snapshots}, {"dump", c.dump_history}}},
      {"workers", c.workers},
  };
  if (!c.replicate_seeds.empty()) doc["replicate_seeds"] = c.replicate_seeds;
  return doc;
}

}  // namespace rareips
