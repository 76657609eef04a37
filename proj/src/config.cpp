#include "hsicnet/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "hsicnet/errors.hpp"

namespace hsicnet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T number(const std::string& key, const std::string& value) {
  T v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("key '" + key + "': cannot parse '" + value + "'");
  }
  return v;
}

bool boolean(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + value + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "solver",   "rff_width",    "hsic_threshold", "max_layers", "sigma_strategy", "decay",
      "decay_steps", "decay_first_improvement", "sigma", "sigma_grid", "search_on_activation", "rank_tol", "conv_tol",
      "ism_max_iter", "normalize_ws", "ce_clamp", "seed"};
  return keys;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(ln) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("key '" + key + "' given twice");
    if (key == "solver") {
      c.solver = parse_solver(value);
    } else if (key == "rff_width") {
      c.rff_width = number<int>(key, value);
    } else if (key == "hsic_threshold") {
      c.hsic_threshold = number<double>(key, value);
    } else if (key == "max_layers") {
      c.max_layers = number<int>(key, value);
    } else if (key == "sigma_strategy") {
      c.sigma_strategy = parse_sigma_strategy(value);
    } else if (key == "decay") {
      c.decay.decay = number<double>(key, value);
    } else if (key == "decay_steps") {
      c.decay.max_steps = number<int>(key, value);
    } else if (key == "decay_first_improvement") {
      c.decay.first_improvement = boolean(key, value);
    } else if (key == "sigma") {
      c.fixed_sigma = number<double>(key, value);
    } else if (key == "sigma_grid") {
      c.sigma_grid = number<int>(key, value);
    } else if (key == "search_on_activation") {
      c.search_on_activation = boolean(key, value);
    } else if (key == "rank_tol") {
      c.rank_tol = number<double>(key, value);
    } else if (key == "conv_tol") {
      c.conv_tol = number<double>(key, value);
    } else if (key == "ism_max_iter") {
      c.ism_max_iter = number<int>(key, value);
    } else if (key == "normalize_ws") {
      c.normalize_ws = boolean(key, value);
    } else if (key == "ce_clamp") {
      c.ce_clamp = number<double>(key, value);
    } else if (key == "seed") {
      c.seed = number<std::uint64_t>(key, value);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

// shortest text that parses back to the same double
std::string num(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

std::string config_to_text(const RunConfig& c) {
  std::ostringstream out;
  out << "solver = " << to_string(c.solver) << '\n'
      << "rff_width = " << c.rff_width << '\n'
      << "hsic_threshold = " << num(c.hsic_threshold) << '\n'
      << "max_layers = " << c.max_layers << '\n'
      << "sigma_strategy = " << to_string(c.sigma_strategy) << '\n'
      << "decay = " << num(c.decay.decay) << '\n'
      << "decay_steps = " << c.decay.max_steps << '\n'
      << "decay_first_improvement = " << (c.decay.first_improvement ? "true" : "false") << '\n'
      << "sigma = " << num(c.fixed_sigma) << '\n'
      << "sigma_grid = " << c.sigma_grid << '\n'
      << "search_on_activation = " << (c.search_on_activation ? "true" : "false") << '\n'
      << "rank_tol = " << num(c.rank_tol) << '\n'
      << "conv_tol = " << num(c.conv_tol) << '\n'
      << "ism_max_iter = " << c.ism_max_iter << '\n'
      << "normalize_ws = " << (c.normalize_ws ? "true" : "false") << '\n'
      << "ce_clamp = " << num(c.ce_clamp) << '\n'
      << "seed = " << c.seed << '\n';
  return out.str();
}

}  // namespace hsicnet
