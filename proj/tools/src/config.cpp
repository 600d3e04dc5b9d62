#include "beamstab_cli/config.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "beamstab/errors.hpp"

namespace beamstab::cli {

using nlohmann::json;

namespace {

const json& need(const json& node, const char* key, const std::string& where) {
  if (!node.is_object() || !node.contains(key)) throw SpecError("missing field '" + where + "." + key + "'");
  return node.at(key);
}

double number(const json& node, const std::string& where) {
  if (!node.is_number()) throw SpecError("field '" + where + "' must be a number");
  return node.get<double>();
}

int integer(const json& node, const std::string& where) {
  if (!node.is_number_integer()) throw SpecError("field '" + where + "' must be an integer");
  return node.get<int>();
}

std::vector<double> numbers(const json& node, const std::string& where) {
  if (!node.is_array()) throw SpecError("field '" + where + "' must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(number(node[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

template <typename T>
void read_opt(const json& node, const char* key, T& target, const std::string& where) {
  if (!node.contains(key)) return;
  const json& v = node.at(key);
  std::string path = where + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw SpecError("field '" + path + "' must be a boolean");
    target = v.get<bool>();
  } else if constexpr (std::is_same_v<T, int>) {
    target = integer(v, path);
  } else if constexpr (std::is_same_v<T, double>) {
    target = number(v, path);
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw SpecError("field '" + path + "' must be a string");
    target = v.get<std::string>();
  }
}

void check_range(double lo, double hi, int points, const std::string& where) {
  if (!(lo > 0.0) || !(hi > lo)) throw SpecError("'" + where + "' range must be positive and ordered");
  if (points < 2) throw SpecError("'" + where + ".points' must be >= 2");
}

}  // namespace

MemoryKernel parse_kernel(const json& node, const std::string& where) {
  if (!node.is_object()) throw SpecError("field '" + where + "' must be an object");
  std::string type;
  read_opt(node, "type", type, where);
  if (type == "prony") {
    const json& terms = need(node, "terms", where);
    if (!terms.is_array() || terms.empty()) throw SpecError("'" + where + ".terms' must be a non-empty array");
    std::vector<PronyTerm> out;
    double min_rate = 1e300;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      std::string p = where + ".terms[" + std::to_string(i) + "]";
      if (!terms[i].is_array() || terms[i].size() != 2) throw SpecError("'" + p + "' must be a pair [a, theta]");
      out.push_back({number(terms[i][0], p), number(terms[i][1], p)});
      min_rate = std::min(min_rate, 1.0 / out.back().time);
    }
    double delta = node.contains("delta") ? number(node.at("delta"), where + ".delta") : min_rate;
    return MemoryKernel::prony(std::move(out), delta);
  }
  if (type == "tabulated") {
    auto s = numbers(need(node, "s", where), where + ".s");
    auto mu = numbers(need(node, "mu", where), where + ".mu");
    double tail = number(need(node, "delta_tail", where), where + ".delta_tail");
    double delta = node.contains("delta") ? number(node.at("delta"), where + ".delta") : tail;
    return MemoryKernel::tabulated(std::move(s), std::move(mu), tail, delta);
  }
  if (type == "exponential") {
    double varpi = number(need(node, "varpi", where), where + ".varpi");
    double sigma = number(need(node, "sigma", where), where + ".sigma");
    return exponential_kernel(varpi, sigma);
  }
  throw SpecError("field '" + where + ".type' must be prony, tabulated or exponential");
}

json kernel_to_json(const MemoryKernel& kernel) {
  json j;
  if (kernel.is_prony()) {
    j["type"] = "prony";
    json terms = json::array();
    for (const auto& t : kernel.terms()) terms.push_back({t.weight, t.time});
    j["terms"] = terms;
  } else {
    j["type"] = "tabulated";
    j["s"] = kernel.table().s;
    j["mu"] = kernel.table().mu;
    j["delta_tail"] = kernel.table().tail_rate;
  }
  j["delta"] = kernel.dafermos_delta();
  return j;
}

RunConfig parse_config(const json& root) {
  if (!root.is_object()) throw SpecError("config root must be an object");
  RunConfig rc;
  std::string model;
  read_opt(root, "model", model, "config");
  if (model.empty()) throw SpecError("missing field 'model'");
  rc.spec.model = parse_model_tag(model);

  const json& co = need(root, "coefficients", "config");
  auto& c = rc.spec.coeffs;
  const bool bresse = is_bresse(rc.spec.model);
  struct Field {
    const char* key;
    double* target;
    bool required;
  };
  Field fields[] = {{"rho1", &c.rho1, true},  {"rho2", &c.rho2, true},    {"rho3", &c.rho3, true},
                    {"k", &c.k, true},        {"k0", &c.k0, bresse},      {"b", &c.b, true},
                    {"varpi", &c.varpi, true}, {"gamma", &c.gamma, true}, {"l", &c.l, bresse},
                    {"ell", &c.ell, true}};
  for (const auto& f : fields) {
    if (co.contains(f.key)) *f.target = number(co.at(f.key), std::string("coefficients.") + f.key);
    else if (f.required) throw SpecError(std::string("missing field 'coefficients.") + f.key + "'");
  }
  if (co.contains("sigma")) c.sigma = number(co.at("sigma"), "coefficients.sigma");
  if (co.contains("tau")) c.tau = number(co.at("tau"), "coefficients.tau");
  if (root.contains("kernel_g")) rc.spec.kernel_g = parse_kernel(root.at("kernel_g"), "kernel_g");
  if (root.contains("kernel_h")) rc.spec.kernel_h = parse_kernel(root.at("kernel_h"), "kernel_h");
  read_opt(root, "tolerance", rc.spec.tolerance, "config");
  validate(rc.spec);

  if (root.contains("memory")) {
    const json& m = root.at("memory");
    std::string scheme = to_string(rc.memory.scheme);
    read_opt(m, "scheme", scheme, "memory");
    rc.memory.scheme = parse_memory_scheme(scheme);
    read_opt(m, "nodes", rc.memory.nodes, "memory");
    read_opt(m, "stretch", rc.memory.stretch, "memory");
    if (rc.memory.nodes < 8) throw SpecError("'memory.nodes' must be >= 8");
    if (!(rc.memory.stretch >= 1.0)) throw SpecError("'memory.stretch' must be >= 1");
  }
  if (heat_law(rc.spec.model) == HeatLaw::GurtinPipkin && rc.memory.scheme == MemoryScheme::PronyReduction) {
    bool tab = !rc.spec.kernel_g->is_prony() || (rc.spec.kernel_h && !rc.spec.kernel_h->is_prony());
    if (tab) throw SpecError("tabulated kernels need 'memory.scheme' set to an sgrid scheme");
  }

  if (root.contains("sweep")) {
    const json& s = root.at("sweep");
    read_opt(s, "lambda_min", rc.sweep.lambda_min, "sweep");
    read_opt(s, "lambda_max", rc.sweep.lambda_max, "sweep");
    read_opt(s, "points", rc.sweep.points, "sweep");
    read_opt(s, "n_max", rc.sweep.n_max, "sweep");
    read_opt(s, "full_range", rc.sweep.full_range, "sweep");
  }
  check_range(rc.sweep.lambda_min, rc.sweep.lambda_max, rc.sweep.points, "sweep");
  if (rc.sweep.n_max < 1) throw SpecError("'sweep.n_max' must be >= 1");

  if (root.contains("lowerbound")) {
    const json& lb = root.at("lowerbound");
    if (lb.contains("n_list")) {
      rc.lowerbound.n_list.clear();
      const json& arr = lb.at("n_list");
      if (!arr.is_array() || arr.empty()) throw SpecError("'lowerbound.n_list' must be a non-empty array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        int n = integer(arr[i], "lowerbound.n_list[" + std::to_string(i) + "]");
        if (n < 1) throw SpecError("'lowerbound.n_list' entries must be >= 1");
        rc.lowerbound.n_list.push_back(n);
      }
    }
  }

  if (root.contains("decay")) {
    const json& d = root.at("decay");
    read_opt(d, "t_min", rc.decay.t_min, "decay");
    read_opt(d, "t_max", rc.decay.t_max, "decay");
    read_opt(d, "points", rc.decay.points, "decay");
    read_opt(d, "n_max", rc.decay.n_max, "decay");
    read_opt(d, "kind", rc.decay.kind, "decay");
    read_opt(d, "log_spacing", rc.decay.log_spacing, "decay");
  }
  check_range(rc.decay.t_min, rc.decay.t_max, rc.decay.points, "decay");
  if (rc.decay.n_max < 1) throw SpecError("'decay.n_max' must be >= 1");
  if (rc.decay.kind != "auto" && rc.decay.kind != "exponential" && rc.decay.kind != "algebraic")
    throw SpecError("'decay.kind' must be auto, exponential or algebraic");

  if (root.contains("limit")) {
    const json& l = root.at("limit");
    if (l.contains("eps_list")) rc.limit.eps_list = numbers(l.at("eps_list"), "limit.eps_list");
    if (l.contains("m")) rc.limit.m = number(l.at("m"), "limit.m");
  }
  if (rc.limit.eps_list.empty()) throw SpecError("'limit.eps_list' must be non-empty");
  for (std::size_t i = 0; i < rc.limit.eps_list.size(); ++i) {
    if (!(rc.limit.eps_list[i] > 0.0)) throw SpecError("'limit.eps_list' entries must be positive");
    if (i > 0 && !(rc.limit.eps_list[i] < rc.limit.eps_list[i - 1]))
      throw SpecError("'limit.eps_list' must be decreasing");
  }
  if (rc.limit.m && !(*rc.limit.m > 0.0 && *rc.limit.m < 1.0)) throw SpecError("'limit.m' must lie in (0, 1)");

  if (root.contains("check")) {
    const json& k = root.at("check");
    read_opt(k, "n_max", rc.check.n_max, "check");
    read_opt(k, "states", rc.check.states, "check");
    read_opt(k, "lambda_modes", rc.check.lambda_modes, "check");
    read_opt(k, "lambda_t_max", rc.check.lambda_t_max, "check");
    if (k.contains("seed")) rc.check.seed = k.at("seed").get<std::uint64_t>();
  }
  if (rc.check.n_max < 1 || rc.check.states < 1 || rc.check.lambda_modes < 1 || !(rc.check.lambda_t_max > 0.0))
    throw SpecError("'check' block values must be positive");

  if (root.contains("output")) {
    const json& o = root.at("output");
    read_opt(o, "dir", rc.output.dir, "output");
    if (o.contains("formats")) {
      const json& f = o.at("formats");
      if (!f.is_array()) throw SpecError("'output.formats' must be an array");
      rc.output.csv = rc.output.svg = false;
      for (const auto& e : f) {
        if (e == "csv") rc.output.csv = true;
        else if (e == "svg") rc.output.svg = true;
        else throw SpecError("'output.formats' entries must be csv or svg");
      }
    }
  }

  rc.config_hash = fnv1a_hex(root.dump());
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open config file '" + path + "'");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(root);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace beamstab::cli
