#include "ski/bench/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "ski/error.hpp"

namespace ski::bench {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const std::string t = trim(text);
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || t.empty()) {
    throw InvalidArgument("config: key '" + key + "' expects a number, got '" + text + "'");
  }
  return value;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<T>(key, item));
  if (out.empty()) throw InvalidArgument("config: key '" + key + "' needs at least one value");
  return out;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void apply_setting(SweepConfig& cfg, const std::string& key, const std::string& value) {
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"dims", [&](auto& v) { cfg.dims = parse_list<int>(key, v); }},
      {"n_values", [&](auto& v) { cfg.n_values = parse_list<int>(key, v); }},
      {"m_per_dim_values", [&](auto& v) { cfg.m_per_dim_values = parse_list<int>(key, v); }},
      {"T", [&](auto& v) { cfg.T = parse_number<int>(key, v); }},
      {"D", [&](auto& v) { cfg.D = parse_number<double>(key, v); }},
      {"signal_variance", [&](auto& v) { cfg.hp_true.signal_variance = parse_number<double>(key, v); }},
      {"lengthscale", [&](auto& v) { cfg.hp_true.lengthscale = parse_number<double>(key, v); }},
      {"noise_variance", [&](auto& v) { cfg.hp_true.noise_variance = parse_number<double>(key, v); }},
      {"seeds", [&](auto& v) { cfg.seeds = parse_list<std::uint64_t>(key, v); }},
      {"experiments",
       [&](auto& v) {
         cfg.experiments.clear();
         for (const auto& e : split_list(v)) {
           if (std::find(kExperiments.begin(), kExperiments.end(), e) == kExperiments.end()) {
             throw InvalidArgument("config: unknown experiment '" + e + "'");
           }
           cfg.experiments.insert(e);
         }
       }},
      {"output_path", [&](auto& v) { cfg.output_path = trim(v); }},
      {"jobs", [&](auto& v) { cfg.jobs = parse_number<int>(key, v); }},
      {"calibration.pairs", [&](auto& v) { cfg.probe_pairs = parse_number<int>(key, v); }},
      {"calibration.k_prime_safety", [&](auto& v) { cfg.k_prime_safety = parse_number<double>(key, v); }},
      {"calibration.mu_safety", [&](auto& v) { cfg.mu_safety = parse_number<double>(key, v); }},
      {"kernel_rate.dims", [&](auto& v) { cfg.kernel_rate_dims = parse_list<int>(key, v); }},
      {"kernel_rate.cells", [&](auto& v) { cfg.kernel_rate_cells = parse_list<int>(key, v); }},
      {"kernel_rate.pairs", [&](auto& v) { cfg.kernel_rate_pairs = parse_number<int>(key, v); }},
      {"kernel_rate.slice_points", [&](auto& v) { cfg.kernel_rate_slice_points = parse_number<int>(key, v); }},
      {"gram_rate.n", [&](auto& v) { cfg.gram_rate_n = parse_number<int>(key, v); }},
      {"gram_rate.dims", [&](auto& v) { cfg.gram_rate_dims = parse_list<int>(key, v); }},
      {"gram_rate.cells.d1", [&](auto& v) { cfg.gram_rate_cells[1] = parse_list<int>(key, v); }},
      {"gram_rate.cells.d2", [&](auto& v) { cfg.gram_rate_cells[2] = parse_list<int>(key, v); }},
      {"gram_rate.cells.d3", [&](auto& v) { cfg.gram_rate_cells[3] = parse_list<int>(key, v); }},
      {"n_growth.n_values", [&](auto& v) { cfg.n_growth_values = parse_list<int>(key, v); }},
      {"n_growth.cells", [&](auto& v) { cfg.n_growth_cells = parse_number<int>(key, v); }},
      {"sizing.epsilons", [&](auto& v) { cfg.sizing_epsilons = parse_list<double>(key, v); }},
      {"sizing.n_values", [&](auto& v) { cfg.sizing_n_values = parse_list<int>(key, v); }},
      {"sizing.score_n_values", [&](auto& v) { cfg.sizing_score_n_values = parse_list<int>(key, v); }},
      {"sizing.score_epsilon", [&](auto& v) { cfg.sizing_score_epsilon = parse_number<double>(key, v); }},
      {"regimes.dims", [&](auto& v) { cfg.regimes_dims = parse_list<int>(key, v); }},
      {"regimes.n_values", [&](auto& v) { cfg.regimes_n_values = parse_list<std::int64_t>(key, v); }},
      {"regimes.epsilon", [&](auto& v) { cfg.regimes_epsilon = parse_number<double>(key, v); }},
      {"regimes.C", [&](auto& v) { cfg.regimes_C = parse_number<double>(key, v); }},
      {"ascent.n", [&](auto& v) { cfg.ascent_n = parse_number<int>(key, v); }},
      {"ascent.K", [&](auto& v) { cfg.ascent_K = parse_number<int>(key, v); }},
      {"ascent.cells", [&](auto& v) { cfg.ascent_cells = parse_number<int>(key, v); }},
      {"ascent.lattice_cells", [&](auto& v) { cfg.ascent_lattice_cells = parse_number<int>(key, v); }},
      {"ascent.box",
       [&](auto& v) {
         const auto b = parse_list<double>(key, v);
         if (b.size() != 4) throw InvalidArgument("config: ascent.box expects sf_lo,sf_hi,l_lo,l_hi");
         cfg.ascent_box.lo = {b[0], b[2]};
         cfg.ascent_box.hi = {b[1], b[3]};
       }},
      {"ascent.theta0",
       [&](auto& v) {
         const auto t = parse_list<double>(key, v);
         if (t.size() != 2) throw InvalidArgument("config: ascent.theta0 expects signal_variance,lengthscale");
         cfg.ascent_theta0 = {t[0], t[1]};
       }},
      {"ascent.eta", [&](auto& v) { cfg.ascent_eta = parse_number<double>(key, v); }},
  };
  const auto it = setters.find(key);
  if (it == setters.end()) throw InvalidArgument("config: unknown key '" + key + "'");
  it->second(value);
}

SweepConfig parse_config(const std::string& text, bool* has_seeds) {
  SweepConfig cfg;
  if (has_seeds) *has_seeds = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    apply_setting(cfg, key, trim(line.substr(eq + 1)));
    if (key == "seeds" && has_seeds) *has_seeds = true;
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_config(const std::string& path, bool* has_seeds) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), has_seeds);
}

void SweepConfig::validate() const {
  auto positive = [](const auto& values, const char* what) {
    if (values.empty()) throw InvalidArgument(std::string("config: ") + what + " is empty");
    for (const auto& v : values) {
      if (!(v > 0)) throw InvalidArgument(std::string("config: ") + what + " must be positive");
    }
  };
  positive(dims, "dims");
  positive(n_values, "n_values");
  positive(m_per_dim_values, "m_per_dim_values");
  if (seeds.empty()) throw InvalidArgument("config: seeds is empty");
  for (int c : m_per_dim_values) {
    if (c < 4) throw InvalidArgument("config: m_per_dim_values must be at least 4");
  }
  if (T < 1 || !(D > 0.0)) throw InvalidArgument("config: T and D must be positive");
  hp_true.validate();
  if (!(hp_true.noise_variance > 0.0)) throw InvalidArgument("config: noise_variance must be positive");
  if (jobs < 0) throw InvalidArgument("config: jobs must be nonnegative");
  positive(kernel_rate_dims, "kernel_rate.dims");
  positive(kernel_rate_cells, "kernel_rate.cells");
  positive(n_growth_values, "n_growth.n_values");
  positive(sizing_epsilons, "sizing.epsilons");
  positive(sizing_n_values, "sizing.n_values");
  positive(sizing_score_n_values, "sizing.score_n_values");
  positive(regimes_dims, "regimes.dims");
  positive(regimes_n_values, "regimes.n_values");
  for (auto n : regimes_n_values) {
    if (n < 3) throw InvalidArgument("config: regimes.n_values must be at least 3");
  }
  ascent_box.validate();
  if (!ascent_box.contains(ascent_theta0)) throw InvalidArgument("config: ascent.theta0 lies outside ascent.box");
  if (ascent_K < 1 || ascent_n < 1) throw InvalidArgument("config: ascent.K and ascent.n must be positive");
  if (ascent_eta < 0.0) throw InvalidArgument("config: ascent.eta must be nonnegative");
}

}  // namespace ski::bench
