#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tcap/cli.hpp"

namespace tcap::cli {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kTopKeys = {
    "alpha", "beta",    "epsilon",        "distance", "rho",   "eta",
    "snr_db", "lambda", "m",              "n",        "k",     "schemes",
    "grid",   "mode",   "trials",         "seed",     "tolerance",
    "initial_trials",   "max_trials_per_probe",       "trial_budget",
    "out",    "format"};

const std::set<std::string> kSectionKeys = {"methods", "signal", "marks", "antsel",
                                            "bd_gain", "power",  "window"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is{std::string(s)};
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key, "expected a real number, got '" + text + "'");
  }
  return value;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::uint64_t v = parse_u64(key, text);
  if (v > 1'000'000) throw ConfigError(key, "value out of range");
  return static_cast<int>(v);
}

mc::AntennaConfig parse_grid_point(const std::string& text) {
  std::vector<int> parts;
  std::string item;
  std::istringstream is(lower(text));
  while (std::getline(is, item, 'x')) parts.push_back(parse_int("grid", item));
  if (parts.size() != 3) throw ConfigError("grid", "expected MxNxK, got '" + text + "'");
  return {parts[0], parts[1], parts[2]};
}

template <typename Enum, std::size_t N>
Enum parse_choice(const std::string& key, const std::string& text,
                  const std::array<std::pair<std::string_view, Enum>, N>& table) {
  const std::string t = lower(trim(text));
  for (const auto& [name, value] : table) {
    if (name == t) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : table) {
    if (!allowed.empty()) allowed += "|";
    allowed += name;
  }
  throw ConfigError(key, "expected " + allowed + ", got '" + text + "'");
}

template <typename Enum, std::size_t N>
std::string_view choice_name(Enum value,
                             const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::array<std::pair<std::string_view, mc::SweepMode>, 3> kModes = {{
    {"analytic", mc::SweepMode::Analytic},
    {"mc", mc::SweepMode::Mc},
    {"both", mc::SweepMode::Both},
}};
constexpr std::array<std::pair<std::string_view, OutputFormat>, 2> kFormats = {{
    {"csv", OutputFormat::Csv},
    {"json", OutputFormat::Json},
}};
constexpr std::array<std::pair<std::string_view, sim::GainModel>, 2> kSignals = {{
    {"explicit", sim::GainModel::Explicit},
    {"surrogate", sim::GainModel::Surrogate},
}};
constexpr std::array<std::pair<std::string_view, sim::MarkModel>, 2> kMarks = {{
    {"surrogate", sim::MarkModel::Surrogate},
    {"explicit", sim::MarkModel::Explicit},
}};
constexpr std::array<std::pair<std::string_view, sim::AntSelMode>, 2> kAntSel = {{
    {"model", sim::AntSelMode::Model},
    {"physical", sim::AntSelMode::Physical},
}};
constexpr std::array<std::pair<std::string_view, sim::BdGain>, 2> kBdGain = {{
    {"frobenius", sim::BdGain::Frobenius},
    {"mu-max", sim::BdGain::MuMax},
}};
constexpr std::array<std::pair<std::string_view, sim::PowerConvention>, 2> kPower = {{
    {"per-stream", sim::PowerConvention::PerStream},
    {"total-split", sim::PowerConvention::TotalSplit},
}};

SchemeSection parse_section(const std::string& name, const pt::ptree& tree) {
  SchemeSection section;
  for (const auto& [raw_key, node] : tree) {
    const std::string key = lower(raw_key);
    const std::string full = name + "." + raw_key;
    if (!kSectionKeys.contains(key)) throw ConfigError(full, "unknown key");
    if (!node.empty()) throw ConfigError(full, "nested values are not supported");
    const std::string value = node.data();
    if (key == "methods") {
      for (const auto& m : split_list(value)) {
        const auto method = parse_density_method(m);
        if (!method) throw ConfigError(full, "unknown method '" + m + "'");
        section.methods.push_back(*method);
      }
    } else if (key == "signal") {
      section.sim.signal = parse_choice(full, value, kSignals);
    } else if (key == "marks") {
      section.sim.marks = parse_choice(full, value, kMarks);
    } else if (key == "antsel") {
      section.sim.antsel = parse_choice(full, value, kAntSel);
    } else if (key == "bd_gain") {
      section.sim.bd_gain = parse_choice(full, value, kBdGain);
    } else if (key == "power") {
      section.sim.power = parse_choice(full, value, kPower);
    } else if (key == "window") {
      section.sim.window_radius = parse_real(full, value);
    }
  }
  return section;
}

}  // namespace

NetworkParams ExperimentConfig::default_params() {
  NetworkParams p;
  p.alpha = 4.0;
  p.beta = 3.0;
  p.distance = 10.0;
  p.epsilon = 0.1;
  p.rho = 1.0;
  p.eta = 0.0;
  p.M = p.N = p.K = 4;
  return p;
}

std::optional<DensityMethod> parse_density_method(std::string_view name) {
  const std::string n = lower(trim(name));
  if (n == "sandwich") return DensityMethod::LowerBound;
  for (DensityMethod m : {DensityMethod::SmallEps, DensityMethod::UpperBound,
                          DensityMethod::LowerBound, DensityMethod::ExactRoot,
                          DensityMethod::McRoot}) {
    if (to_string(m) == n) return m;
  }
  return std::nullopt;
}

void apply_snr_db(NetworkParams& params, double snr_db) {
  const double ratio = std::pow(10.0, snr_db / 10.0);
  if (params.eta > 0.0) {
    params.rho = params.eta * ratio;
  } else {
    params.eta = 1.0;
    params.rho = ratio;
  }
}

ExperimentConfig parse_config(std::string_view text) {
  pt::ptree tree;
  std::istringstream is{std::string(text)};
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", std::string("malformed INI: ") + e.message() + " (line " +
                                    std::to_string(e.line()) + ")");
  }

  ExperimentConfig c;
  std::optional<double> snr_db;
  for (const auto& [raw_key, node] : tree) {
    const std::string key = lower(raw_key);
    if (!node.empty()) {
      const auto scheme = parse_scheme(raw_key);
      if (!scheme) throw ConfigError(raw_key, "unknown section (expected a scheme name)");
      c.sections[*scheme] = parse_section(std::string(to_string(*scheme)), node);
      continue;
    }
    if (!kTopKeys.contains(key)) throw ConfigError(raw_key, "unknown key");
    const std::string value = node.data();
    NetworkParams& p = c.params;
    if (key == "alpha") p.alpha = parse_real(key, value);
    else if (key == "beta") p.beta = parse_real(key, value);
    else if (key == "epsilon") p.epsilon = parse_real(key, value);
    else if (key == "distance") p.distance = parse_real(key, value);
    else if (key == "rho") p.rho = parse_real(key, value);
    else if (key == "eta") p.eta = parse_real(key, value);
    else if (key == "snr_db") snr_db = parse_real(key, value);
    else if (key == "lambda") c.lambda = parse_real(key, value);
    else if (key == "m") p.M = parse_int(key, value);
    else if (key == "n") p.N = parse_int(key, value);
    else if (key == "k") p.K = parse_int(key, value);
    else if (key == "schemes") {
      c.schemes.clear();
      for (const auto& name : split_list(value)) {
        const auto scheme = parse_scheme(name);
        if (!scheme) throw ConfigError(key, "unknown scheme '" + name + "'");
        c.schemes.push_back(*scheme);
      }
    } else if (key == "grid") {
      c.grid.clear();
      for (const auto& point : split_list(value)) c.grid.push_back(parse_grid_point(point));
    } else if (key == "mode") c.mode = parse_choice(key, value, kModes);
    else if (key == "trials") c.trials = parse_u64(key, value);
    else if (key == "seed") c.seed = parse_u64(key, value);
    else if (key == "tolerance") c.tolerance = parse_real(key, value);
    else if (key == "initial_trials") c.initial_trials = parse_u64(key, value);
    else if (key == "max_trials_per_probe") c.max_trials_per_probe = parse_u64(key, value);
    else if (key == "trial_budget") c.trial_budget = parse_u64(key, value);
    else if (key == "out") c.out = trim(value);
    else if (key == "format") c.format = parse_choice(key, value, kFormats);
  }
  if (snr_db) apply_snr_db(c.params, *snr_db);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  const NetworkParams& p = c.params;
  os << "alpha = " << format_double(p.alpha) << "\n"
     << "beta = " << format_double(p.beta) << "\n"
     << "epsilon = " << format_double(p.epsilon) << "\n"
     << "distance = " << format_double(p.distance) << "\n"
     << "rho = " << format_double(p.rho) << "\n"
     << "eta = " << format_double(p.eta) << "\n";
  if (c.lambda) os << "lambda = " << format_double(*c.lambda) << "\n";
  os << "m = " << p.M << "\n"
     << "n = " << p.N << "\n"
     << "k = " << p.K << "\n";
  os << "schemes = ";
  for (std::size_t i = 0; i < c.schemes.size(); ++i) {
    os << (i ? "," : "") << to_string(c.schemes[i]);
  }
  os << "\ngrid = ";
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    os << (i ? "," : "") << c.grid[i].M << "x" << c.grid[i].N << "x" << c.grid[i].K;
  }
  os << "\nmode = " << choice_name(c.mode, kModes) << "\n"
     << "trials = " << c.trials << "\n"
     << "seed = " << c.seed << "\n"
     << "tolerance = " << format_double(c.tolerance) << "\n"
     << "initial_trials = " << c.initial_trials << "\n"
     << "max_trials_per_probe = " << c.max_trials_per_probe << "\n"
     << "trial_budget = " << c.trial_budget << "\n";
  if (!c.out.empty()) os << "out = " << c.out << "\n";
  os << "format = " << choice_name(c.format, kFormats) << "\n";

  for (const auto& [scheme, s] : c.sections) {
    os << "\n[" << to_string(scheme) << "]\n";
    if (!s.methods.empty()) {
      os << "methods = ";
      for (std::size_t i = 0; i < s.methods.size(); ++i) {
        os << (i ? "," : "") << to_string(s.methods[i]);
      }
      os << "\n";
    }
    os << "signal = " << choice_name(s.sim.signal, kSignals) << "\n"
       << "marks = " << choice_name(s.sim.marks, kMarks) << "\n"
       << "antsel = " << choice_name(s.sim.antsel, kAntSel) << "\n"
       << "bd_gain = " << choice_name(s.sim.bd_gain, kBdGain) << "\n"
       << "power = " << choice_name(s.sim.power, kPower) << "\n";
    if (s.sim.window_radius) os << "window = " << format_double(*s.sim.window_radius) << "\n";
  }
  return os.str();
}

void validate_config(const ExperimentConfig& c) {
  const NetworkParams& p = c.params;
  if (!(p.alpha > 2.0) || !std::isfinite(p.alpha)) throw ConfigError("alpha", "must be > 2");
  if (!(p.beta >= 0.0) || !std::isfinite(p.beta)) throw ConfigError("beta", "must be >= 0");
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) throw ConfigError("epsilon", "must lie in (0, 1)");
  if (!(p.distance > 0.0) || !std::isfinite(p.distance)) {
    throw ConfigError("distance", "must be > 0");
  }
  if (!(p.rho > 0.0) || !std::isfinite(p.rho)) throw ConfigError("rho", "must be > 0");
  if (!(p.eta >= 0.0) || !std::isfinite(p.eta)) throw ConfigError("eta", "must be >= 0");
  if (c.lambda && !(*c.lambda >= 0.0 && std::isfinite(*c.lambda))) {
    throw ConfigError("lambda", "must be >= 0");
  }
  if (p.M < 1) throw ConfigError("m", "must be >= 1");
  if (p.N < 1) throw ConfigError("n", "must be >= 1");
  if (p.K < 1) throw ConfigError("k", "must be >= 1");
  if (c.schemes.empty()) throw ConfigError("schemes", "scheme list is empty");
  if (c.grid.empty()) throw ConfigError("grid", "antenna grid is empty");
  for (const auto& g : c.grid) {
    if (g.M < 1 || g.N < 1 || g.K < 1) throw ConfigError("grid", "antenna counts must be >= 1");
  }
  if (c.trials < 1) throw ConfigError("trials", "must be >= 1");
  if (!(c.tolerance > 0.0)) throw ConfigError("tolerance", "must be > 0");
  if (c.initial_trials < 1) throw ConfigError("initial_trials", "must be >= 1");
  if (c.max_trials_per_probe < c.initial_trials) {
    throw ConfigError("max_trials_per_probe", "must be >= initial_trials");
  }
  if (c.trial_budget < c.initial_trials) {
    throw ConfigError("trial_budget", "must be >= initial_trials");
  }
  for (const auto& [scheme, s] : c.sections) {
    if (s.sim.window_radius && !(*s.sim.window_radius > 0.0)) {
      throw ConfigError(std::string(to_string(scheme)) + ".window", "must be > 0");
    }
  }
}

}  // namespace tcap::cli
