#include "herm/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace herm::cli {
namespace {

using json = nlohmann::json;

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& what) const {
    std::ostringstream msg;
    msg << source_;
    if (node.IsDefined() && node.Mark().line >= 0) msg << ":" << node.Mark().line + 1;
    msg << ": " << (path.empty() ? "<root>" : path) << ": " << what;
    throw ConfigError(msg.str());
  }

  void expect_map(const YAML::Node& node, const std::string& path) const {
    if (!node.IsMap()) fail(node, path, "expected a mapping");
  }

  void only_keys(const YAML::Node& node, const std::string& path,
                 std::initializer_list<const char*> allowed) const {
    expect_map(node, path);
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                  [&](const char* a) { return key == a; });
      if (!ok) fail(kv.first, join(path, key), "unknown key");
    }
  }

  template <class T>
  T scalar(const YAML::Node& node, const std::string& path, const char* type) const {
    if (!node.IsScalar()) fail(node, path, std::string("expected ") + type);
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, path, std::string("expected ") + type);
    }
  }

  int integer(const YAML::Node& node, const std::string& path) const {
    return scalar<int>(node, path, "an integer");
  }
  double number(const YAML::Node& node, const std::string& path) const {
    return scalar<double>(node, path, "a number");
  }
  bool boolean(const YAML::Node& node, const std::string& path) const {
    return scalar<bool>(node, path, "true or false");
  }
  std::string string(const YAML::Node& node, const std::string& path) const {
    return scalar<std::string>(node, path, "a string");
  }
  std::uint64_t unsigned64(const YAML::Node& node, const std::string& path) const {
    return scalar<std::uint64_t>(node, path, "a non-negative integer");
  }

  cd complex(const YAML::Node& node, const std::string& path) const {
    if (node.IsScalar()) return {number(node, path), 0.0};
    if (node.IsSequence() && node.size() == 2) {
      return {number(node[0], path + "[0]"), number(node[1], path + "[1]")};
    }
    fail(node, path, "expected a number or a [re, im] pair");
  }

  std::vector<int> int_list(const YAML::Node& node, const std::string& path) const {
    if (!node.IsSequence()) fail(node, path, "expected a list of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(integer(node[i], index(path, i)));
    return out;
  }

  SmallMatrix matrix(const YAML::Node& node, const std::string& path, int size) const {
    if (!node.IsSequence() || static_cast<int>(node.size()) != size) {
      fail(node, path, "expected " + std::to_string(size) + " rows");
    }
    SmallMatrix m(size, size);
    for (int i = 0; i < size; ++i) {
      const YAML::Node row = node[i];
      const std::string rp = index(path, i);
      if (!row.IsSequence() || static_cast<int>(row.size()) != size) {
        fail(row, rp, "expected " + std::to_string(size) + " entries");
      }
      for (int j = 0; j < size; ++j) m(i, j) = complex(row[j], index(rp, j));
    }
    return m;
  }

  FourierTerm fourier(const YAML::Node& node, const std::string& path, int axes) const {
    FourierTerm t;
    if (!node["k"]) fail(node, path, "missing key 'k'");
    t.k = int_list(node["k"], path + ".k");
    if (static_cast<int>(t.k.size()) != axes) {
      fail(node["k"], path + ".k", "wave vector must have " + std::to_string(axes) + " entries");
    }
    if (!node["c"]) fail(node, path, "missing key 'c'");
    t.c = complex(node["c"], path + ".c");
    return t;
  }

  std::vector<MatrixTerm> matrix_terms(const YAML::Node& node, const std::string& path, int size,
                                       int axes) const {
    if (!node.IsSequence()) fail(node, path, "expected a list of terms");
    std::vector<MatrixTerm> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
      const YAML::Node t = node[i];
      const std::string tp = index(path, i);
      only_keys(t, tp, {"entry", "k", "c"});
      if (!t["entry"]) fail(t, tp, "missing key 'entry'");
      const std::vector<int> e = int_list(t["entry"], tp + ".entry");
      if (e.size() != 2 || e[0] < 1 || e[0] > size || e[1] < 1 || e[1] > size) {
        fail(t["entry"], tp + ".entry",
             "expected [row, col] with 1-based indices up to " + std::to_string(size));
      }
      out.push_back({e[0] - 1, e[1] - 1, fourier(t, tp, axes)});
    }
    return out;
  }

  RealSeries series(const YAML::Node& node, const std::string& path, int axes) const {
    only_keys(node, path, {"constant", "terms"});
    RealSeries s;
    if (node["constant"]) s.constant = number(node["constant"], path + ".constant");
    if (node["terms"]) {
      const YAML::Node terms = node["terms"];
      if (!terms.IsSequence()) fail(terms, path + ".terms", "expected a list of terms");
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string tp = index(path + ".terms", i);
        only_keys(terms[i], tp, {"k", "c"});
        s.terms.push_back(fourier(terms[i], tp, axes));
      }
    }
    return s;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
  static std::string index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
  }

 private:
  std::string source_;
};

int axis_from_name(const std::string& name, int n) {
  if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'y')) {
    int j = 0;
    try {
      j = std::stoi(name.substr(1));
    } catch (const std::exception&) {
      return -1;
    }
    if (j < 1 || j > n) return -1;
    return name[0] == 'x' ? j - 1 : n + j - 1;
  }
  return -1;
}

std::string axis_name(int axis, int n) {
  return (axis < n ? "x" : "y") + std::to_string(axis % n + 1);
}

json complex_json(cd c) { return json::array({c.real(), c.imag()}); }

json matrix_json(const SmallMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json terms_json(const std::vector<MatrixTerm>& terms) {
  json out = json::array();
  for (const auto& t : terms) {
    out.push_back({{"entry", {t.row + 1, t.col + 1}}, {"k", t.term.k}, {"c", complex_json(t.term.c)}});
  }
  return out;
}

json series_json(const RealSeries& s) {
  json terms = json::array();
  for (const auto& t : s.terms) terms.push_back({{"k", t.k}, {"c", complex_json(t.c)}});
  return {{"constant", s.constant}, {"terms", terms}};
}

}  // namespace

std::string to_string(FieldFormat f) { return f == FieldFormat::csv ? "csv" : "json"; }

RunConfig parse_config(const std::string& text, const std::string& source, bool check) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream msg;
    msg << source << ":" << e.mark.line + 1 << ": syntax error: " << e.msg;
    throw ConfigError(msg.str());
  }
  const Reader rd(source);
  rd.only_keys(root, "", {"version", "command", "grid", "metric", "bundle", "tolerances", "seeds",
                          "sampling", "output"});
  RunConfig cfg;
  if (!root["version"]) rd.fail(root, "version", "missing schema version");
  cfg.version = rd.integer(root["version"], "version");
  if (cfg.version != kSchemaVersion) {
    rd.fail(root["version"], "version", "unsupported schema version " + std::to_string(cfg.version));
  }
  if (root["command"]) cfg.command = rd.string(root["command"], "command");

  if (!root["grid"]) rd.fail(root, "grid", "missing grid section");
  const YAML::Node grid = root["grid"];
  rd.only_keys(grid, "grid", {"n", "N"});
  if (!grid["n"] || !grid["N"]) rd.fail(grid, "grid", "grid needs both n and N");
  cfg.n = rd.integer(grid["n"], "grid.n");
  cfg.N = rd.integer(grid["N"], "grid.N");
  if (cfg.n < 1 || cfg.n > kMaxComplexDim) rd.fail(grid["n"], "grid.n", "must be 1, 2 or 3");
  const int axes = 2 * cfg.n;

  cfg.metric = MetricSpec::identity(cfg.n);
  if (const YAML::Node m = root["metric"]) {
    rd.only_keys(m, "metric", {"base", "terms", "conformal"});
    if (m["base"]) cfg.metric.base = rd.matrix(m["base"], "metric.base", cfg.n);
    if (m["terms"]) cfg.metric.terms = rd.matrix_terms(m["terms"], "metric.terms", cfg.n, axes);
    if (m["conformal"]) cfg.metric.conformal = rd.series(m["conformal"], "metric.conformal", axes);
  }

  if (const YAML::Node b = root["bundle"]) {
    rd.only_keys(b, "bundle", {"canonical", "rank", "base", "terms", "weight", "background"});
    BundleConfig bc;
    if (b["canonical"]) {
      for (const char* other : {"rank", "base", "terms", "weight", "background"}) {
        if (b[other]) rd.fail(b[other], std::string("bundle.") + other, "not allowed with 'canonical'");
      }
      bc.canonical = rd.integer(b["canonical"], "bundle.canonical");
      if (*bc.canonical < 1) rd.fail(b["canonical"], "bundle.canonical", "must be a positive integer");
    } else {
      const int r = b["rank"] ? rd.integer(b["rank"], "bundle.rank") : 1;
      if (r < 1 || r > kMaxAxes) rd.fail(b["rank"], "bundle.rank", "must be between 1 and 6");
      bc.spec = BundleSpec::trivial(r);
      if (b["base"]) bc.spec.base = rd.matrix(b["base"], "bundle.base", r);
      if (b["terms"]) bc.spec.terms = rd.matrix_terms(b["terms"], "bundle.terms", r, axes);
      if (b["weight"]) bc.spec.weight = rd.series(b["weight"], "bundle.weight", axes);
      if (b["background"]) bc.spec.background = rd.matrix(b["background"], "bundle.background", cfg.n);
    }
    cfg.bundle = bc;
  }

  if (const YAML::Node t = root["tolerances"]) {
    rd.only_keys(t, "tolerances", {"gauduchon", "poisson", "berger", "berger_sigma", "curvature", "conformal",
                                   "structure", "idempotence", "flatness", "flatness_abs", "bundle",
                                   "weitzenbock", "identity"});
    auto set = [&](const char* key, double& field) {
      if (!t[key]) return;
      field = rd.number(t[key], std::string("tolerances.") + key);
      if (!(field > 0.0)) rd.fail(t[key], std::string("tolerances.") + key, "must be positive");
    };
    set("gauduchon", cfg.tol.gauduchon);
    set("poisson", cfg.tol.poisson);
    set("berger", cfg.tol.berger);
    set("berger_sigma", cfg.tol.berger_sigma);
    set("curvature", cfg.tol.curvature);
    set("conformal", cfg.tol.conformal);
    set("structure", cfg.tol.structure);
    set("idempotence", cfg.tol.idempotence);
    set("flatness", cfg.tol.flatness);
    set("flatness_abs", cfg.tol.flatness_abs);
    set("bundle", cfg.tol.bundle);
    set("weitzenbock", cfg.tol.weitzenbock);
    set("identity", cfg.tol.identity);
  }

  if (const YAML::Node s = root["seeds"]) {
    rd.only_keys(s, "seeds", {"berger", "hsc", "identities", "conformal"});
    if (s["berger"]) cfg.seeds.berger = rd.unsigned64(s["berger"], "seeds.berger");
    if (s["hsc"]) cfg.seeds.hsc = rd.unsigned64(s["hsc"], "seeds.hsc");
    if (s["identities"]) cfg.seeds.identities = rd.unsigned64(s["identities"], "seeds.identities");
    if (s["conformal"]) cfg.seeds.conformal = rd.unsigned64(s["conformal"], "seeds.conformal");
  }

  if (const YAML::Node s = root["sampling"]) {
    rd.only_keys(s, "sampling", {"berger_points", "berger_samples", "hsc_points", "hsc_directions",
                                 "hsc_refine", "random_functions", "weitzenbock_m",
                                 "estimate_spectrum"});
    auto count = [&](const char* key, auto& field, long long min) {
      if (!s[key]) return;
      const auto v = rd.scalar<long long>(s[key], std::string("sampling.") + key, "an integer");
      if (v < min) rd.fail(s[key], std::string("sampling.") + key, "must be at least " + std::to_string(min));
      field = static_cast<std::remove_reference_t<decltype(field)>>(v);
    };
    count("berger_points", cfg.sampling.berger_points, 1);
    count("berger_samples", cfg.sampling.berger_samples, 0);
    count("hsc_points", cfg.sampling.hsc_points, 1);
    count("hsc_directions", cfg.sampling.hsc_directions, 1);
    count("hsc_refine", cfg.sampling.hsc_refine, 0);
    count("random_functions", cfg.sampling.random_functions, 1);
    if (s["weitzenbock_m"]) {
      cfg.sampling.weitzenbock_m = rd.int_list(s["weitzenbock_m"], "sampling.weitzenbock_m");
      for (int m : cfg.sampling.weitzenbock_m) {
        if (m < 1) rd.fail(s["weitzenbock_m"], "sampling.weitzenbock_m", "entries must be positive");
      }
    }
    if (s["estimate_spectrum"]) {
      cfg.sampling.estimate_spectrum = rd.boolean(s["estimate_spectrum"], "sampling.estimate_spectrum");
    }
  }

  if (const YAML::Node o = root["output"]) {
    rd.only_keys(o, "output", {"dir", "emit_fields", "format", "slices"});
    if (o["dir"]) cfg.output.dir = rd.string(o["dir"], "output.dir");
    if (o["emit_fields"]) cfg.output.emit_fields = rd.boolean(o["emit_fields"], "output.emit_fields");
    if (o["format"]) {
      const std::string f = rd.string(o["format"], "output.format");
      if (f == "csv") {
        cfg.output.format = FieldFormat::csv;
      } else if (f == "json") {
        cfg.output.format = FieldFormat::json;
      } else {
        rd.fail(o["format"], "output.format", "must be csv or json");
      }
    }
    if (o["slices"]) {
      const YAML::Node sl = o["slices"];
      if (!sl.IsSequence()) rd.fail(sl, "output.slices", "expected a list of axis names");
      for (std::size_t i = 0; i < sl.size(); ++i) {
        const std::string name = rd.string(sl[i], Reader::index("output.slices", i));
        const int a = axis_from_name(name, cfg.n);
        if (a < 0) rd.fail(sl[i], Reader::index("output.slices", i), "unknown axis '" + name + "'");
        cfg.output.slice_axes.push_back(a);
      }
    }
  }

  if (!check) return cfg;
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path, bool check) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path, check);
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.command) cfg.command = *o.command;
  if (o.out_dir) cfg.output.dir = *o.out_dir;
  if (o.seed) {
    cfg.seeds.berger = *o.seed;
    cfg.seeds.hsc = *o.seed;
    cfg.seeds.identities = *o.seed;
    cfg.seeds.conformal = *o.seed;
  }
  if (o.tol) {
    if (!(*o.tol > 0.0)) throw ConfigError("--tol: must be positive");
    cfg.tol.gauduchon = *o.tol;
    cfg.tol.poisson = *o.tol;
  }
  if (o.grid) cfg.N = *o.grid;
  if (o.emit_fields) cfg.output.emit_fields = true;
  validate(cfg);
}

void validate(const RunConfig& cfg) {
  if (cfg.command.empty()) throw ConfigError("command: no command given (config key or --command)");
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), cfg.command) == names.end()) {
    throw ConfigError("command: unknown command '" + cfg.command + "'");
  }
  if (cfg.N < 8 || cfg.N % 2 != 0) throw ConfigError("grid.N: must be even and at least 8");
  if (cfg.command != "curvature" && cfg.n < 2) {
    throw ConfigError("grid.n: command '" + cfg.command + "' needs complex dimension n >= 2");
  }
  if (cfg.command == "bundle-cert" && !cfg.bundle) {
    throw ConfigError("bundle: command 'bundle-cert' needs a bundle section");
  }
  if (cfg.bundle && !cfg.bundle->canonical) {
    const BundleSpec& s = cfg.bundle->spec;
    if (s.background.size() != 0 && (s.background.rows() != cfg.n || s.background.cols() != cfg.n)) {
      throw ConfigError("bundle.background: must be n x n");
    }
  }
}

std::string canonical_json(const RunConfig& cfg) {
  json j;
  j["version"] = cfg.version;
  j["command"] = cfg.command;
  j["grid"] = {{"n", cfg.n}, {"N", cfg.N}};
  j["metric"] = {{"base", matrix_json(cfg.metric.base)},
                 {"terms", terms_json(cfg.metric.terms)},
                 {"conformal", series_json(cfg.metric.conformal)}};
  if (cfg.bundle) {
    if (cfg.bundle->canonical) {
      j["bundle"] = {{"canonical", *cfg.bundle->canonical}};
    } else {
      const BundleSpec& s = cfg.bundle->spec;
      j["bundle"] = {{"rank", s.rank},
                     {"base", matrix_json(s.base)},
                     {"terms", terms_json(s.terms)},
                     {"weight", series_json(s.weight)},
                     {"background", s.background.size() ? matrix_json(s.background) : json::array()}};
    }
  }
  const Tolerances& t = cfg.tol;
  j["tolerances"] = {{"gauduchon", t.gauduchon},   {"poisson", t.poisson},
                     {"berger", t.berger},         {"berger_sigma", t.berger_sigma},
                     {"curvature", t.curvature},   {"conformal", t.conformal},
                     {"structure", t.structure},
                     {"idempotence", t.idempotence}, {"flatness", t.flatness},
                     {"flatness_abs", t.flatness_abs}, {"bundle", t.bundle},
                     {"weitzenbock", t.weitzenbock}, {"identity", t.identity}};
  j["seeds"] = {{"berger", cfg.seeds.berger},
                {"hsc", cfg.seeds.hsc},
                {"identities", cfg.seeds.identities},
                {"conformal", cfg.seeds.conformal}};
  const Sampling& s = cfg.sampling;
  j["sampling"] = {{"berger_points", s.berger_points},   {"berger_samples", s.berger_samples},
                   {"hsc_points", s.hsc_points},         {"hsc_directions", s.hsc_directions},
                   {"hsc_refine", s.hsc_refine},         {"random_functions", s.random_functions},
                   {"weitzenbock_m", s.weitzenbock_m},   {"estimate_spectrum", s.estimate_spectrum}};
  json slices = json::array();
  for (int a : cfg.output.slice_axes) slices.push_back(axis_name(a, cfg.n));
  // the output directory does not change results and is left out of the digest input
  j["output"] = {{"emit_fields", cfg.output.emit_fields},
                 {"format", to_string(cfg.output.format)},
                 {"slices", slices}};
  return j.dump();
}

std::string config_digest(const RunConfig& cfg) {
  const std::string text = canonical_json(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace herm::cli
