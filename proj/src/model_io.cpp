#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vinecop/error.hpp"
#include "vinecop/vine.hpp"

namespace vinecop {

namespace {

using Json = nlohmann::ordered_json;

std::string_view weight_mode_name(WeightMode m) { return m == WeightMode::AbsTau ? "abs_tau" : "tau"; }

// Typed access with the JSON path in every error.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

  Reader at(const std::string& key) const {
    if (!j_.is_object()) fail("expected an object");
    const auto it = j_.find(key);
    if (it == j_.end()) throw SchemaError("model: missing field " + join(key));
    return Reader(*it, join(key));
  }
  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }
  Reader at(std::size_t i) const { return Reader(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }
  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }
  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  long long integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<long long>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  [[noreturn]] void fail(const std::string& why) const { throw SchemaError("model: " + path_ + ": " + why); }
  const std::string& path() const { return path_; }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const Json& j_;
  std::string path_;
};

std::size_t index_field(const Reader& r, std::size_t d) {
  const long long v = r.integer();
  if (v < 1 || static_cast<std::size_t>(v) > d) r.fail("index out of range 1.." + std::to_string(d));
  return static_cast<std::size_t>(v - 1);
}

}  // namespace

std::string model_to_json(const FittedVine& model) {
  Json root;
  root["d"] = model.dim();
  Json trees = Json::array();
  for (std::size_t t = 0; t < model.structure().trees.size(); ++t) {
    Json tree = Json::array();
    for (std::size_t i = 0; i < model.structure().trees[t].size(); ++i) {
      const VineEdge& e = model.structure().trees[t][i];
      const PairCopula& c = model.copulas()[t][i];
      Json cond = Json::array();
      for (const auto v : e.cond) cond.push_back(v + 1);
      Json copula;
      copula["family"] = std::string(family_name(c.family()));
      copula["rotation"] = static_cast<int>(c.rotation());
      copula["params"] = c.params();
      Json edge;
      edge["a"] = e.a + 1;
      edge["b"] = e.b + 1;
      edge["cond"] = cond;
      edge["copula"] = copula;
      tree.push_back(edge);
    }
    trees.push_back(tree);
  }
  root["trees"] = trees;
  Json marginals = Json::array();
  for (std::size_t j = 0; j < model.dim(); ++j) {
    Json m;
    m["name"] = model.names()[j];
    m["sorted"] = model.has_marginals() ? Json(model.marginals()[j].sorted()) : Json::array();
    marginals.push_back(m);
  }
  root["marginals"] = marginals;
  const VineFitInfo& info = model.info();
  Json meta;
  meta["n"] = info.n;
  meta["criterion"] = std::string(criterion_name(info.criterion));
  meta["loglik"] = info.loglik;
  meta["nparams"] = info.nparams;
  meta["aic"] = info.aic();
  meta["bic"] = info.bic();
  meta["truncation"] = info.truncation;
  meta["weights"] = std::string(weight_mode_name(info.weights));
  meta["warnings"] = info.warnings;
  root["meta"] = meta;
  return root.dump(2) + "\n";
}

FittedVine model_from_json(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model: invalid JSON: ") + e.what());
  }
  const Reader r(root, "");
  const long long d_raw = r.at("d").integer();
  if (d_raw < 2) r.at("d").fail("dimension must be at least 2");
  const auto d = static_cast<std::size_t>(d_raw);

  VineStructure structure;
  structure.dim = d;
  std::vector<std::vector<PairCopula>> copulas;
  const Reader trees = r.at("trees");
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const Reader tree = trees.at(t);
    std::vector<VineEdge> edges;
    std::vector<PairCopula> cops;
    for (std::size_t i = 0; i < tree.size(); ++i) {
      const Reader er = tree.at(i);
      VineEdge e;
      e.tree = t + 1;
      e.a = index_field(er.at("a"), d);
      e.b = index_field(er.at("b"), d);
      const Reader cond = er.at("cond");
      for (std::size_t k = 0; k < cond.size(); ++k) e.cond.push_back(index_field(cond.at(k), d));
      const std::string label = " (edge " + edge_label(e) + ")";
      const Reader cr = er.at("copula");
      Family family;
      try {
        family = family_from_name(cr.at("family").string());
      } catch (const ParseError& err) {
        throw SchemaError("model: " + cr.at("family").path() + label + ": " + err.what());
      }
      const long long rot = cr.at("rotation").integer();
      std::vector<double> params;
      const Reader pr = cr.at("params");
      for (std::size_t k = 0; k < pr.size(); ++k) params.push_back(pr.at(k).number());
      try {
        cops.emplace_back(family, rotation_from_degrees(static_cast<int>(rot)), std::move(params));
      } catch (const Error& err) {
        throw SchemaError("model: " + cr.path() + label + ": " + err.what());
      }
      edges.push_back(std::move(e));
    }
    structure.trees.push_back(std::move(edges));
    copulas.push_back(std::move(cops));
  }
  structure.validate();

  std::vector<std::string> names;
  std::vector<EmpiricalMarginal> marginals;
  const Reader mr = r.at("marginals");
  if (mr.size() != d) mr.fail("expected " + std::to_string(d) + " entries");
  std::size_t with_sample = 0;
  for (std::size_t j = 0; j < d; ++j) {
    const Reader m = mr.at(j);
    names.push_back(m.at("name").string());
    const Reader sr = m.at("sorted");
    std::vector<double> sorted;
    for (std::size_t k = 0; k < sr.size(); ++k) sorted.push_back(sr.at(k).number());
    if (sorted.empty()) continue;
    ++with_sample;
    try {
      marginals.push_back(EmpiricalMarginal::from_sorted(std::move(sorted), names.back()));
    } catch (const Error& err) {
      throw SchemaError("model: " + sr.path() + ": " + err.what());
    }
  }
  if (with_sample != 0 && with_sample != d) mr.fail("either every marginal or none has a sample");

  VineFitInfo info;
  if (r.has("meta")) {
    const Reader meta = r.at("meta");
    if (meta.has("n")) info.n = static_cast<std::size_t>(meta.at("n").integer());
    if (meta.has("criterion")) {
      try {
        info.criterion = criterion_from_name(meta.at("criterion").string());
      } catch (const ParseError& err) {
        meta.at("criterion").fail(err.what());
      }
    }
    if (meta.has("loglik")) info.loglik = meta.at("loglik").number();
    if (meta.has("nparams")) info.nparams = static_cast<int>(meta.at("nparams").integer());
    if (meta.has("truncation")) info.truncation = static_cast<std::size_t>(meta.at("truncation").integer());
    if (meta.has("weights")) {
      const std::string w = meta.at("weights").string();
      if (w == "abs_tau") {
        info.weights = WeightMode::AbsTau;
      } else if (w == "tau") {
        info.weights = WeightMode::Tau;
      } else {
        meta.at("weights").fail("expected \"abs_tau\" or \"tau\"");
      }
    }
    if (meta.has("warnings")) {
      const Reader wr = meta.at("warnings");
      for (std::size_t k = 0; k < wr.size(); ++k) info.warnings.push_back(wr.at(k).string());
    }
  }
  return FittedVine(std::move(structure), std::move(copulas), std::move(names), std::move(marginals),
                    std::move(info));
}

void save_model(const FittedVine& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << model_to_json(model);
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

FittedVine load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace vinecop
