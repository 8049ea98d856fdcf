#include "msras/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace msras {

namespace {

using KvList = std::vector<std::pair<std::string, std::string>>;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

KvList tokenize_text(const std::string& text) {
  KvList kv;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    kv.emplace_back(key, value);
  }
  return kv;
}

KvList tokenize_json(const std::string& text) {
  KvList kv;
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw ConfigError("config JSON: top level must be an object");
  auto to_string = [](const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
  };
  for (auto& [key, value] : j.items()) {
    if (key == "sweep") {
      if (!value.is_object()) throw ConfigError("config JSON: 'sweep' must be an object");
      for (auto& [skey, svalue] : value.items()) {
        std::string joined;
        if (svalue.is_array()) {
          for (const auto& e : svalue) {
            if (!joined.empty()) joined += " ";
            joined += to_string(e);
          }
        } else {
          joined = to_string(svalue);
        }
        kv.emplace_back("sweep." + skey, joined);
      }
    } else {
      if (value.is_array() || value.is_object()) throw ConfigError("config JSON: nested value for key '" + key + "'");
      kv.emplace_back(key, to_string(value));
    }
  }
  return kv;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& v, Parse parse) {
  std::vector<T> out;
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) out.push_back(static_cast<T>(parse(key, tok)));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty sweep list");
  return out;
}

CoarseRule parse_coarse(const std::string& v) {
  if (v == "none") return CoarseRule::None;
  if (v == "pou") return CoarseRule::Pou;
  if (v == "msgfem_fixed") return CoarseRule::MsgfemFixed;
  if (v == "msgfem_threshold") return CoarseRule::MsgfemThreshold;
  throw ConfigError("config key 'coarse': unknown rule '" + v + "'");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  const std::string lead = trim(text);
  const KvList kv = !lead.empty() && lead.front() == '{' ? tokenize_json(text) : tokenize_text(text);

  ExperimentConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "model") cfg.model = value;
    else if (key == "grid_n") cfg.grid_n = parse_int(key, value);
    else if (key == "tiles") cfg.tiles = parse_int(key, value);
    else if (key == "a_min") cfg.a_min = parse_double(key, value);
    else if (key == "a_max") cfg.a_max = parse_double(key, value);
    else if (key == "discretization") cfg.discretization = value;
    else if (key == "dg_alpha") cfg.dg_alpha = parse_double(key, value);
    else if (key == "partition") cfg.partition = value;
    else if (key == "px") cfg.px = parse_int(key, value);
    else if (key == "py") cfg.py = parse_int(key, value);
    else if (key == "subdomains") cfg.subdomains = static_cast<int>(parse_int(key, value));
    else if (key == "overlap_layers") cfg.overlap_layers = static_cast<int>(parse_int(key, value));
    else if (key == "oversample_layers") cfg.oversample_layers = static_cast<int>(parse_int(key, value));
    else if (key == "pu") cfg.pu = value;
    else if (key == "coarse") cfg.coarse = parse_coarse(value);
    else if (key == "lambda_max") cfg.lambda_max = parse_double(key, value);
    else if (key == "n_sd") cfg.n_sd = static_cast<int>(parse_int(key, value));
    else if (key == "pou_degree") cfg.pou_degree = static_cast<int>(parse_int(key, value));
    else if (key == "nev") cfg.nev = static_cast<int>(parse_int(key, value));
    else if (key == "eig_tol") cfg.eig_tol = parse_double(key, value);
    else if (key == "solver") cfg.solver = value;
    else if (key == "epsilon") cfg.epsilon = parse_double(key, value);
    else if (key == "restart") cfg.restart = static_cast<int>(parse_int(key, value));
    else if (key == "max_iters") cfg.max_iters = static_cast<int>(parse_int(key, value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "workers") cfg.workers = static_cast<int>(parse_int(key, value));
    else if (key == "write_vtk") cfg.write_vtk = parse_bool(key, value);
    else if (key == "write_spectra") cfg.write_spectra = parse_bool(key, value);
    else if (key == "write_residuals") cfg.write_residuals = parse_bool(key, value);
    else if (key == "dump_system") cfg.dump_system = parse_bool(key, value);
    else if (key == "sweep.a_min") cfg.sweep_a_min = parse_list<double>(key, value, parse_double);
    else if (key == "sweep.subdomains") cfg.sweep_subdomains = parse_list<int>(key, value, parse_int);
    else if (key == "sweep.n_sd") cfg.sweep_n_sd = parse_list<int>(key, value, parse_int);
    else if (key == "sweep.oversample_layers") cfg.sweep_oversample = parse_list<int>(key, value, parse_int);
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void ExperimentConfig::validate() const {
  if (model != "checkerboard51" && model != "rotating52" && model != "transport54")
    throw ConfigError("config: unknown model '" + model + "'");
  if (discretization != "dg" && discretization != "ccfv")
    throw ConfigError("config: discretization must be 'dg' or 'ccfv'");
  if (partition != "structured" && partition != "greedy")
    throw ConfigError("config: partition must be 'structured' or 'greedy'");
  if (pu != "ramp" && pu != "multiplicity") throw ConfigError("config: pu must be 'ramp' or 'multiplicity'");
  if (solver != "gmres" && solver != "richardson") throw ConfigError("config: solver must be 'gmres' or 'richardson'");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("config: epsilon must lie in (0, 1)");
  if (restart < 1) throw ConfigError("config: restart must be >= 1");
  if (max_iters < 1) throw ConfigError("config: max_iters must be >= 1");
  if (coarse == CoarseRule::MsgfemThreshold && !(lambda_max > 0.0))
    throw ConfigError("config: lambda_max must be positive");
  if (coarse == CoarseRule::MsgfemFixed && n_sd < 0) throw ConfigError("config: n_sd must be >= 0");
  if (coarse == CoarseRule::Pou && pou_degree != 0 && pou_degree != 1)
    throw ConfigError("config: pou_degree must be 0 or 1");
  if (overlap_layers < 1) throw ConfigError("config: overlap_layers must be >= 1");
  if (oversample_layers < 0) throw ConfigError("config: oversample_layers must be >= 0");
  if (subdomains < 1) throw ConfigError("config: subdomains must be >= 1");
  if (nev < 1) throw ConfigError("config: nev must be >= 1");
  if (workers < 0) throw ConfigError("config: workers must be >= 0");
  auto positive = [](double v) { return v > 0.0; };
  if (!sweep_a_min.empty() && !std::all_of(sweep_a_min.begin(), sweep_a_min.end(), [](double v) { return v >= 0.0; }))
    throw ConfigError("config: sweep.a_min values must be >= 0");
  (void)positive;
  for (int m : sweep_subdomains)
    if (m < 1) throw ConfigError("config: sweep.subdomains values must be >= 1");
  for (int v : sweep_n_sd)
    if (v < 0) throw ConfigError("config: sweep.n_sd values must be >= 0");
  for (int v : sweep_oversample)
    if (v < 0) throw ConfigError("config: sweep.oversample_layers values must be >= 0");
  if (!sweep_n_sd.empty() && coarse != CoarseRule::MsgfemFixed)
    throw ConfigError("config: sweep.n_sd requires coarse = msgfem_fixed");
}

}  // namespace msras
