#include "qpol/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

namespace qpol {

namespace {

// ---------------------------------------------------------------------------
// Value tree. Tables keep insertion order so diagnostics are deterministic.

struct Node;
using Array = std::vector<Node>;
using Table = std::vector<std::pair<std::string, Node>>;

struct Node {
  std::variant<long long, double, bool, std::string, Array, Table> value;
  int line = 0;
};

Node* find(Table& t, const std::string& key) {
  for (auto& [k, v] : t) {
    if (k == key) return &v;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Parser for the key-value grammar: '[dotted.section]' headers, 'key = value'
// pairs, '#' comments; values are numbers, booleans, quoted strings, arrays
// '[v, ...]' and inline tables '{ key = value, ... }', each on one line.

class Parser {
 public:
  Parser(const std::string& text, const std::string& origin)
      : text_(text), origin_(origin) {}

  Table parse() {
    Table root;
    Table* current = &root;
    std::istringstream in(text_);
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_;
      line_text_ = raw;
      pos_ = 0;
      skip_ws();
      if (done() || peek() == '#') continue;
      if (peek() == '[') {
        current = open_section(root);
        continue;
      }
      parse_keyvalue(*current);
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(origin_ + ":" + std::to_string(line_) + ": syntax error: " + msg);
  }

  bool done() const { return pos_ >= line_text_.size(); }
  char peek() const { return line_text_[pos_]; }
  void skip_ws() {
    while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }
  void expect(char c, const char* what) {
    skip_ws();
    if (done() || peek() != c) fail(std::string("expected '") + c + "' " + what);
    ++pos_;
  }
  void end_of_line(const char* what) {
    skip_ws();
    if (!done() && peek() != '#') fail(std::string("unexpected trailing text after ") + what);
  }

  static bool key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string parse_key() {
    skip_ws();
    std::size_t start = pos_;
    while (!done() && key_char(peek())) ++pos_;
    if (pos_ == start) fail("expected a key");
    return line_text_.substr(start, pos_ - start);
  }

  Table* open_section(Table& root) {
    ++pos_;  // '['
    std::vector<std::string> path;
    path.push_back(parse_key());
    skip_ws();
    while (!done() && peek() == '.') {
      ++pos_;
      path.push_back(parse_key());
      skip_ws();
    }
    expect(']', "to close the section header");
    end_of_line("section header");

    Table* t = &root;
    for (const auto& part : path) {
      Node* existing = find(*t, part);
      if (!existing) {
        t->emplace_back(part, Node{Table{}, line_});
        existing = &t->back().second;
      } else if (!std::holds_alternative<Table>(existing->value)) {
        fail("'" + part + "' is already a value, not a section");
      }
      t = &std::get<Table>(existing->value);
    }
    return t;
  }

  void parse_keyvalue(Table& t) {
    std::string key = parse_key();
    expect('=', "after key '" + key + "'");
    Node value = parse_value();
    end_of_line("value");
    if (find(t, key)) fail("duplicate key '" + key + "'");
    t.emplace_back(std::move(key), std::move(value));
  }

  void expect(char c, const std::string& what) {
    skip_ws();
    if (done() || peek() != c) fail(std::string("expected '") + c + "' " + what);
    ++pos_;
  }

  Node parse_value() {
    skip_ws();
    if (done()) fail("expected a value");
    const char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    return parse_scalar();
  }

  Node parse_string() {
    ++pos_;  // opening quote
    std::string out;
    while (!done() && peek() != '"') {
      char c = peek();
      if (c == '\\') {
        ++pos_;
        if (done()) fail("unterminated escape in string");
        switch (peek()) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail("unknown escape in string");
        }
      } else {
        out += c;
      }
      ++pos_;
    }
    if (done()) fail("unterminated string");
    ++pos_;  // closing quote
    return Node{out, line_};
  }

  Node parse_array() {
    ++pos_;  // '['
    Array arr;
    skip_ws();
    if (!done() && peek() == ']') {
      ++pos_;
      return Node{arr, line_};
    }
    while (true) {
      arr.push_back(parse_value());
      skip_ws();
      if (!done() && peek() == ',') {
        ++pos_;
        continue;
      }
      expect(']', "to close the array");
      break;
    }
    return Node{arr, line_};
  }

  Node parse_inline_table() {
    ++pos_;  // '{'
    Table t;
    skip_ws();
    if (!done() && peek() == '}') {
      ++pos_;
      return Node{t, line_};
    }
    while (true) {
      std::string key = parse_key();
      expect('=', "after key '" + key + "'");
      Node v = parse_value();
      if (find(t, key)) fail("duplicate key '" + key + "' in inline table");
      t.emplace_back(std::move(key), std::move(v));
      skip_ws();
      if (!done() && peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}', "to close the inline table");
      break;
    }
    return Node{t, line_};
  }

  Node parse_scalar() {
    std::size_t start = pos_;
    while (!done() && peek() != ',' && peek() != ']' && peek() != '}' && peek() != '#' &&
           peek() != ' ' && peek() != '\t' && peek() != '\r') {
      ++pos_;
    }
    std::string tok = line_text_.substr(start, pos_ - start);
    if (tok.empty()) fail("expected a value");
    if (tok == "true") return Node{true, line_};
    if (tok == "false") return Node{false, line_};

    // Integer first; anything with '.', 'e', 'inf' falls through to double.
    if (tok.find_first_of(".eEnN") == std::string::npos) {
      try {
        std::size_t used = 0;
        long long v = std::stoll(tok, &used);
        if (used == tok.size()) return Node{v, line_};
      } catch (...) {
      }
    }
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used == tok.size()) return Node{v, line_};
    } catch (...) {
    }
    fail("cannot parse value '" + tok + "'");
  }

  const std::string& text_;
  std::string origin_;
  std::string line_text_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

// ---------------------------------------------------------------------------
// Typed extraction with unknown-key detection and did-you-mean suggestions.

int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

class SectionReader {
 public:
  SectionReader(const std::string& origin, std::string section, Table* table)
      : origin_(origin), section_(std::move(section)), table_(table) {}

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + msg);
  }

  bool present() const { return table_ != nullptr; }

  Node* get(const std::string& key) {
    known_.push_back(key);
    if (!table_) return nullptr;
    return find(*table_, key);
  }

  double number(const std::string& key, Node& n) const {
    if (auto* d = std::get_if<double>(&n.value)) return *d;
    if (auto* i = std::get_if<long long>(&n.value)) return static_cast<double>(*i);
    fail(n.line, "key '" + key + "' in " + section_ + " must be a number");
  }

  long long integer(const std::string& key, Node& n) const {
    if (auto* i = std::get_if<long long>(&n.value)) return *i;
    fail(n.line, "key '" + key + "' in " + section_ + " must be an integer");
  }

  std::string str(const std::string& key, Node& n) const {
    if (auto* s = std::get_if<std::string>(&n.value)) return *s;
    fail(n.line, "key '" + key + "' in " + section_ + " must be a string");
  }

  bool boolean(const std::string& key, Node& n) const {
    if (auto* b = std::get_if<bool>(&n.value)) return *b;
    fail(n.line, "key '" + key + "' in " + section_ + " must be true or false");
  }

  std::vector<double> number_array(const std::string& key, Node& n) const {
    auto* arr = std::get_if<Array>(&n.value);
    if (!arr) fail(n.line, "key '" + key + "' in " + section_ + " must be an array of numbers");
    std::vector<double> out;
    for (auto& e : *arr) out.push_back(number(key, e));
    return out;
  }

  std::vector<long> integer_array(const std::string& key, Node& n) const {
    auto* arr = std::get_if<Array>(&n.value);
    if (!arr) fail(n.line, "key '" + key + "' in " + section_ + " must be an array of integers");
    std::vector<long> out;
    for (auto& e : *arr) out.push_back(static_cast<long>(integer(key, e)));
    return out;
  }

  std::vector<std::string> string_array(const std::string& key, Node& n) const {
    auto* arr = std::get_if<Array>(&n.value);
    if (!arr) fail(n.line, "key '" + key + "' in " + section_ + " must be an array of strings");
    std::vector<std::string> out;
    for (auto& e : *arr) out.push_back(str(key, e));
    return out;
  }

  // Call after all get()s: any remaining key is unknown.
  void finish(std::vector<std::string>* extra_known = nullptr) const {
    if (!table_) return;
    std::vector<std::string> known = known_;
    if (extra_known) known.insert(known.end(), extra_known->begin(), extra_known->end());
    for (const auto& [key, node] : *table_) {
      if (std::find(known.begin(), known.end(), key) != known.end()) continue;
      if (std::holds_alternative<Table>(node.value) && extra_known) continue;
      std::string best;
      int best_d = 3;
      for (const auto& k : known) {
        const int d = edit_distance(key, k);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      std::string msg = "unknown key '" + key + "' in " + section_;
      if (!best.empty()) msg += "; did you mean '" + best + "'?";
      fail(node.line, msg);
    }
  }

 private:
  const std::string& origin_;
  std::string section_;
  Table* table_;
  mutable std::vector<std::string> known_;
};

struct DefaultsLog {
  std::vector<std::string>* out;
  void note(const std::string& key, const std::string& value) {
    out->push_back(key + " = " + value + " (default)");
  }
  void note(const std::string& key, double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    note(key, std::string(buf));
  }
};

std::string available_systems() { return "additive_noise, bounded_drift, linear_tracking"; }

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  Parser parser(text, origin);
  Table root = parser.parse();

  ExperimentConfig cfg;
  cfg.origin = origin;
  cfg.config_hash = fnv1a64(text.data(), text.size());
  DefaultsLog log{&cfg.defaults_applied};

  auto section = [&](const std::string& name) -> Table* {
    Node* n = find(root, name);
    if (!n) return nullptr;
    if (!std::holds_alternative<Table>(n->value)) {
      throw ConfigError(origin + ":" + std::to_string(n->line) + ": '" + name +
                        "' must be a section");
    }
    return &std::get<Table>(n->value);
  };

  // --- [system] -------------------------------------------------------------
  Table* system_t = section("system");
  if (!system_t) throw ConfigError(origin + ": missing required [system] section");
  SectionReader sys(origin, "[system]", system_t);
  auto& S = cfg.system;
  if (Node* n = sys.get("kind")) S.kind = sys.str("kind", *n);
  else throw ConfigError(origin + ": [system] must declare 'kind'");
  if (S.kind != "linear_tracking" && S.kind != "bounded_drift" && S.kind != "additive_noise") {
    throw ConfigError(origin + ": unknown system '" + S.kind +
                      "'; available systems: " + available_systems());
  }
  if (Node* n = sys.get("dim")) S.dim = static_cast<int>(sys.integer("dim", *n));
  if (S.dim < 1) throw ConfigError(origin + ": [system] dim must be >= 1");
  if (S.kind == "bounded_drift" && S.dim != 1) {
    throw ConfigError(origin + ": bounded_drift systems are scalar (dim = 1)");
  }

  auto matrix_key = [&](const char* key, double scalar_default) {
    std::vector<double> M(static_cast<std::size_t>(S.dim) * S.dim, 0.0);
    double scalar = scalar_default;
    bool given = false;
    if (Node* n = sys.get(key)) {
      given = true;
      if (std::holds_alternative<Array>(n->value)) {
        auto flat = sys.number_array(key, *n);
        if (flat.size() != M.size()) {
          sys.fail(n->line, std::string("key '") + key + "' must have dim*dim = " +
                                std::to_string(M.size()) + " entries (row-major)");
        }
        return flat;
      }
      scalar = sys.number(key, *n);
    }
    for (int i = 0; i < S.dim; ++i) M[static_cast<std::size_t>(i) * S.dim + i] = scalar;
    if (!given) log.note(std::string("system.") + key, scalar_default);
    return M;
  };
  S.A = matrix_key("a", 1.0);
  S.B = matrix_key("b", -1.0);

  if (Node* n = sys.get("sigma")) S.sigma = sys.number("sigma", *n);
  else log.note("system.sigma", S.sigma);
  if (!(S.sigma > 0.0)) throw ConfigError(origin + ": [system] sigma must be positive");

  if (Node* n = sys.get("cost")) S.cost = sys.str("cost", *n);
  else log.note("system.cost", S.cost);
  if (S.cost != "tracking" && S.cost != "state_abs") {
    throw ConfigError(origin + ": unknown cost '" + S.cost +
                      "'; available costs: state_abs, tracking");
  }

  if (Node* n = sys.get("beta")) S.beta = sys.number("beta", *n);
  else log.note("system.beta", S.beta);
  if (!(S.beta > 0.0 && S.beta < 1.0)) {
    throw ConfigError(origin + ": [system] beta must lie in (0,1)");
  }

  if (Node* n = sys.get("cost_cap")) S.cost_cap = sys.number("cost_cap", *n);
  else {
    S.cost_cap = 20.0 * S.sigma * std::sqrt(static_cast<double>(S.dim));
    log.note("system.cost_cap", S.cost_cap);
  }
  if (!(S.cost_cap > 0.0)) throw ConfigError(origin + ": [system] cost_cap must be positive");

  if (Node* n = sys.get("action_box")) {
    auto range = sys.number_array("action_box", *n);
    if (range.size() != 2 || !(range[0] <= range[1])) {
      sys.fail(n->line, "action_box must be [lo, hi] with lo <= hi (applied per axis)");
    }
    S.action_box = Box::cube(range[0], range[1], S.dim);
  } else {
    S.action_box = Box::cube(-8.0 * S.sigma, 8.0 * S.sigma, S.dim);
    log.note("system.action_box", "[-8 sigma, 8 sigma]");
  }

  if (Node* n = sys.get("drift")) S.drift = sys.str("drift", *n);
  else if (S.kind != "linear_tracking") {
    if (S.kind == "additive_noise") S.drift = "linear";
    log.note("system.drift", S.drift);
  }
  if (S.kind == "bounded_drift" && S.drift != "tanh" && S.drift != "zero") {
    throw ConfigError(origin + ": bounded_drift drift must be 'tanh' or 'zero'");
  }
  if (S.kind == "additive_noise" && S.drift != "linear" && S.drift != "tanh") {
    throw ConfigError(origin + ": additive_noise drift must be 'linear' or 'tanh'");
  }

  if (Node* n = sys.get("l_drift")) S.l_drift = sys.number("l_drift", *n);
  else if (S.kind == "bounded_drift") log.note("system.l_drift", S.l_drift);
  if (Node* n = sys.get("x0")) S.x0 = sys.number("x0", *n);
  sys.finish();

  // --- [policy] and [policies.*] ---------------------------------------------
  SectionReader pol(origin, "[policy]", section("policy"));
  if (Node* n = pol.get("name")) cfg.policy.name = pol.str("name", *n);
  if (Node* n = pol.get("mixture")) {
    auto* mix = std::get_if<Table>(&n->value);
    if (!mix) pol.fail(n->line, "mixture must be an inline table { weights = [...], components = [...] }");
    SectionReader mixr(origin, "[policy] mixture", mix);
    if (Node* w = mixr.get("weights")) cfg.policy.mixture_weights = mixr.number_array("weights", *w);
    if (Node* c = mixr.get("components")) cfg.policy.mixture_components = mixr.string_array("components", *c);
    mixr.finish();
    if (cfg.policy.mixture_weights.empty() ||
        cfg.policy.mixture_weights.size() != cfg.policy.mixture_components.size()) {
      pol.fail(n->line, "mixture needs matching nonempty 'weights' and 'components'");
    }
  }
  pol.finish();

  if (Table* named = section("policies")) {
    for (auto& [name, node] : *named) {
      auto* t = std::get_if<Table>(&node.value);
      if (!t) {
        throw ConfigError(origin + ":" + std::to_string(node.line) +
                          ": [policies." + name + "] must be a section");
      }
      SectionReader pr(origin, "[policies." + name + "]", t);
      NamedPolicy np;
      if (Node* n = pr.get("kind")) np.kind = pr.str("kind", *n);
      if (np.kind != "linear") {
        throw ConfigError(origin + ":" + std::to_string(node.line) +
                          ": named policies support kind = \"linear\" only");
      }
      if (Node* n = pr.get("gain")) np.gain = pr.number("gain", *n);
      if (Node* n = pr.get("offset")) np.offset = pr.number("offset", *n);
      pr.finish();
      cfg.policy.named[name] = np;
    }
  }

  // --- [experiment] -----------------------------------------------------------
  SectionReader exp(origin, "[experiment]", section("experiment"));
  if (Node* n = exp.get("criterion")) cfg.criterion = criterion_from_string(exp.str("criterion", *n));
  else log.note("experiment.criterion", "discounted");
  if (Node* n = exp.get("codebook_schedule")) cfg.codebook_schedule = exp.integer_array("codebook_schedule", *n);
  else log.note("experiment.codebook_schedule", "[4, 8, 16, 32, 64, 128, 256]");
  if (cfg.codebook_schedule.empty()) throw ConfigError(origin + ": codebook_schedule must be nonempty");
  for (std::size_t i = 0; i < cfg.codebook_schedule.size(); ++i) {
    if (cfg.codebook_schedule[i] < 1 ||
        (i > 0 && cfg.codebook_schedule[i] <= cfg.codebook_schedule[i - 1])) {
      throw ConfigError(origin + ": codebook_schedule must be strictly increasing");
    }
  }
  if (Node* n = exp.get("seed")) cfg.seed = static_cast<std::uint64_t>(exp.integer("seed", *n));
  else log.note("experiment.seed", "1");
  if (Node* n = exp.get("replications")) cfg.replications = static_cast<int>(exp.integer("replications", *n));
  if (cfg.replications < 1) throw ConfigError(origin + ": replications must be >= 1");
  if (Node* n = exp.get("n_rollouts")) cfg.n_rollouts = exp.integer("n_rollouts", *n);
  else log.note("experiment.n_rollouts", "10000");
  if (cfg.n_rollouts < 2) throw ConfigError(origin + ": n_rollouts must be >= 2");
  if (Node* n = exp.get("tol")) cfg.tol = exp.number("tol", *n);
  else {
    cfg.tol = 1e-3 * S.cost_cap / (1.0 - S.beta);
    log.note("experiment.tol", cfg.tol);
  }
  if (!(cfg.tol > 0.0)) throw ConfigError(origin + ": tol must be positive");
  if (Node* n = exp.get("burn_in")) cfg.burn_in = exp.integer("burn_in", *n);
  if (cfg.burn_in < 0) throw ConfigError(origin + ": burn_in must be >= 0");
  if (Node* n = exp.get("n_steps")) cfg.n_steps = exp.integer("n_steps", *n);
  if (cfg.n_steps < 1) throw ConfigError(origin + ": n_steps must be >= 1");
  if (Node* n = exp.get("threads")) cfg.n_threads = static_cast<int>(exp.integer("threads", *n));
  if (cfg.n_threads < 1) throw ConfigError(origin + ": threads must be >= 1");
  exp.finish();

  // --- [binning] ----------------------------------------------------------------
  SectionReader bin(origin, "[binning]", section("binning"));
  if (Node* n = bin.get("box")) {
    auto range = bin.number_array("box", *n);
    if (range.size() != 2 || !(range[0] < range[1])) {
      bin.fail(n->line, "box must be [lo, hi] with lo < hi (applied per axis)");
    }
    cfg.bin_box = Box::cube(range[0], range[1], S.dim);
  } else {
    cfg.bin_box = Box::cube(-8.0 * S.sigma, 8.0 * S.sigma, S.dim);
    log.note("binning.box", "[-8 sigma, 8 sigma]");
  }
  if (Node* n = bin.get("bins")) cfg.bins = static_cast<int>(bin.integer("bins", *n));
  else log.note("binning.bins", "50");
  if (cfg.bins < 1) throw ConfigError(origin + ": bins must be >= 1");
  bin.finish();

  // --- [tvcheck] -----------------------------------------------------------------
  SectionReader tvc(origin, "[tvcheck]", section("tvcheck"));
  if (Node* n = tvc.get("n_list")) cfg.tv_n_list = tvc.integer_array("n_list", *n);
  for (long n : cfg.tv_n_list) {
    if (n < 1) throw ConfigError(origin + ": tvcheck n_list entries must be >= 1");
  }
  if (Node* n = tvc.get("samples")) cfg.tv_samples = tvc.integer("samples", *n);
  if (cfg.tv_samples < 1) throw ConfigError(origin + ": tvcheck samples must be >= 1");
  tvc.finish();

  // --- [ergodicity] ----------------------------------------------------------------
  SectionReader erg(origin, "[ergodicity]", section("ergodicity"));
  if (Node* n = erg.get("n_max")) cfg.erg_n_max = erg.integer("n_max", *n);
  if (cfg.erg_n_max < 2) throw ConfigError(origin + ": ergodicity n_max must be >= 2");
  if (Node* n = erg.get("per_n_samples")) cfg.erg_samples = erg.integer("per_n_samples", *n);
  if (cfg.erg_samples < 1) throw ConfigError(origin + ": ergodicity per_n_samples must be >= 1");
  if (Node* n = erg.get("x0")) cfg.erg_x0 = erg.number("x0", *n);
  erg.finish();

  // --- [slb] ------------------------------------------------------------------------
  SectionReader slb(origin, "[slb]", section("slb"));
  if (Node* n = slb.get("entropy_bits")) cfg.entropy_bits = slb.number("entropy_bits", *n);
  slb.finish();

  // --- [constants] overrides -----------------------------------------------------------
  SectionReader con(origin, "[constants]", section("constants"));
  if (Node* n = con.get("alpha")) cfg.ovr_alpha = con.number("alpha", *n);
  if (Node* n = con.get("K1")) cfg.ovr_K1 = con.number("K1", *n);
  if (Node* n = con.get("K2")) cfg.ovr_K2 = con.number("K2", *n);
  if (Node* n = con.get("M")) cfg.ovr_M = con.number("M", *n);
  if (Node* n = con.get("C")) cfg.ovr_C = con.number("C", *n);
  if (Node* n = con.get("kappa")) cfg.ovr_kappa = con.number("kappa", *n);
  con.finish();

  // --- [output] ----------------------------------------------------------------------
  SectionReader out(origin, "[output]", section("output"));
  if (Node* n = out.get("dir")) cfg.out_dir = out.str("dir", *n);
  if (Node* n = out.get("format")) cfg.format = out.str("format", *n);
  if (cfg.format != "csv" && cfg.format != "json") {
    throw ConfigError(origin + ": output format must be 'csv' or 'json'");
  }
  if (Node* n = out.get("dump_rollouts")) cfg.dump_rollouts = out.boolean("dump_rollouts", *n);
  out.finish();

  // Any unknown top-level section?
  static const std::vector<std::string> kSections = {
      "system", "policy", "policies", "experiment", "binning",
      "tvcheck", "ergodicity", "slb", "constants", "output"};
  for (const auto& [key, node] : root) {
    if (std::find(kSections.begin(), kSections.end(), key) != kSections.end()) continue;
    std::string best;
    int best_d = 3;
    for (const auto& k : kSections) {
      const int d = edit_distance(key, k);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    std::string msg = origin + ":" + std::to_string(node.line) + ": unknown section '" + key + "'";
    if (!best.empty()) msg += "; did you mean '" + best + "'?";
    throw ConfigError(msg);
  }

  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace qpol
