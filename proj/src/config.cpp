#include "syk/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "syk/battery.hpp"
#include "syk/errors.hpp"
#include "syk/fock.hpp"

namespace syk {

namespace {

const std::pair<Experiment, const char*> kExperimentNames[] = {
    {Experiment::spectrum, "spectrum"}, {Experiment::entropy, "entropy"},
    {Experiment::see, "see"},           {Experiment::green, "green"},
    {Experiment::sd, "sd"},             {Experiment::otoc, "otoc"},
    {Experiment::battery, "battery"},   {Experiment::dicke, "dicke"},
    {Experiment::power_scaling, "power-scaling"}, {Experiment::gap_scaling, "gap-scaling"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError(key, "expected a finite number, got '" + text + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key, "expected true/false, got '" + text + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) out.push_back(static_cast<int>(parse_int(key, item)));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

void check_grid(const std::string& key, const std::string& spec) {
  try {
    if (spec != "default") expand_grid(spec);
  } catch (const ConfigError& e) {
    throw ConfigError(key, e.what());
  }
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    auto real = [&](const char* key, double RunConfig::*m) {
      t[key] = {[key, m](RunConfig& c, const std::string& v) { c.*m = parse_double(key, v); },
                [m](const RunConfig& c) { return format_double(c.*m); }};
    };
    auto integer = [&](const char* key, int RunConfig::*m) {
      t[key] = {[key, m](RunConfig& c, const std::string& v) {
                  const long long x = parse_int(key, v);
                  if (x < -1000000000LL || x > 1000000000LL) throw ConfigError(key, "out of range");
                  c.*m = static_cast<int>(x);
                },
                [m](const RunConfig& c) { return std::to_string(c.*m); }};
    };
    auto text = [&](const char* key, std::string RunConfig::*m) {
      t[key] = {[m](RunConfig& c, const std::string& v) { c.*m = v; },
                [m](const RunConfig& c) { return c.*m; }};
    };
    auto grid = [&](const char* key, std::string RunConfig::*m) {
      t[key] = {[key, m](RunConfig& c, const std::string& v) {
                  check_grid(key, v);
                  c.*m = v == "default" ? v : canonical_grid(v);
                },
                [m](const RunConfig& c) { return c.*m; }};
    };
    t["experiment"] = {[](RunConfig& c, const std::string& v) {
                         for (const auto& [e, name] : kExperimentNames)
                           if (v == name) {
                             c.experiment = e;
                             return;
                           }
                         throw ConfigError("experiment", "unknown experiment '" + v + "'");
                       },
                       [](const RunConfig& c) { return to_string(c.experiment); }};
    text("figure", &RunConfig::figure);
    t["N"] = {[](RunConfig& c, const std::string& v) { c.sizes = parse_int_list("N", v); },
              [](const RunConfig& c) { return join_ints(c.sizes); }};
    real("J", &RunConfig::J);
    real("mu", &RunConfig::mu);
    real("omega", &RunConfig::omega);
    real("lambda", &RunConfig::lambda);
    text("model", &RunConfig::model);
    text("variant", &RunConfig::variant);
    text("mode", &RunConfig::mode);
    t["rescale"] = {[](RunConfig& c, const std::string& v) { c.rescale = parse_bool("rescale", v); },
                    [](const RunConfig& c) { return std::string(c.rescale ? "true" : "false"); }};
    text("sector", &RunConfig::sector);
    integer("site", &RunConfig::site);
    integer("w_site", &RunConfig::w_site);
    integer("v_site", &RunConfig::v_site);
    t["ergotropy"] = {[](RunConfig& c, const std::string& v) {
                        c.ergotropy_sizes = v.empty() ? std::vector<int>{} : parse_int_list("ergotropy", v);
                      },
                      [](const RunConfig& c) { return join_ints(c.ergotropy_sizes); }};
    grid("T", &RunConfig::temperatures);
    grid("tau", &RunConfig::tau);
    grid("t", &RunConfig::times);
    grid("omega_grid", &RunConfig::omega_grid);
    real("eta", &RunConfig::eta);
    integer("sd_grid_half_size", &RunConfig::sd_grid_half_size);
    real("sd_tolerance", &RunConfig::sd_tolerance);
    real("sd_mixing", &RunConfig::sd_mixing);
    integer("sd_max_iterations", &RunConfig::sd_max_iterations);
    t["seed"] = {[](RunConfig& c, const std::string& v) {
                   const long long x = parse_int("seed", v);
                   if (x < 0) throw ConfigError("seed", "must be non-negative");
                   c.seed = static_cast<std::uint64_t>(x);
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }};
    integer("realizations", &RunConfig::realizations);
    integer("random_states", &RunConfig::random_states);
    integer("workers", &RunConfig::workers);
    real("memory_cap_mb", &RunConfig::memory_cap_mb);
    text("output", &RunConfig::output);
    return t;
  }();
  return table;
}

bool is_dense(Experiment e) {
  return e == Experiment::spectrum || e == Experiment::entropy || e == Experiment::see ||
         e == Experiment::green || e == Experiment::gap_scaling;
}

std::size_t max_sector_dim(int n) {
  return static_cast<std::size_t>(fock::binomial(n, n / 2));
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [x, name] : kExperimentNames)
    if (x == e) return name;
  return "unknown";
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<double> expand_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 4 && (parts[0] == "log" || parts[0] == "lin")) {
    const double a = parse_double("grid", parts[1]);
    const double b = parse_double("grid", parts[2]);
    const long long n = parse_int("grid", parts[3]);
    if (n < 1) throw ConfigError("grid", "point count must be >= 1 in '" + spec + "'");
    if (n == 1 && a != b) throw ConfigError("grid", "a single point needs equal bounds in '" + spec + "'");
    if (parts[0] == "log" && (a <= 0 || b <= 0))
      throw ConfigError("grid", "log grid bounds must be positive in '" + spec + "'");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (long long k = 0; k < n; ++k) {
      const double f = n == 1 ? 0.0 : double(k) / double(n - 1);
      out[k] = parts[0] == "log" ? std::exp(std::log(a) + f * (std::log(b) - std::log(a)))
                                 : a + f * (b - a);
    }
    // Pin the end points exactly.
    out.front() = a;
    out.back() = b;
    return out;
  }
  if (parts.size() != 1) throw ConfigError("grid", "malformed grid spec '" + spec + "'");
  std::vector<double> out;
  for (const auto& item : split(spec, ',')) out.push_back(parse_double("grid", item));
  if (out.empty()) throw ConfigError("grid", "empty grid");
  return out;
}

std::string canonical_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 4)
    return parts[0] + ":" + format_double(parse_double("grid", parts[1])) + ":" +
           format_double(parse_double("grid", parts[2])) + ":" + std::to_string(parse_int("grid", parts[3]));
  std::string out;
  for (double v : expand_grid(spec)) out += (out.empty() ? "" : ",") + format_double(v);
  return out;
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + "=" + field.get(*this) + "\n";
  return out;
}

std::vector<double> RunConfig::temperature_grid() const { return expand_grid(temperatures); }
std::vector<double> RunConfig::tau_grid() const {
  if (tau == "default") return default_tau_grid(J > 0 ? J : 1.0);
  return expand_grid(tau);
}
std::vector<double> RunConfig::time_grid() const { return expand_grid(times); }
std::vector<double> RunConfig::frequency_grid() const { return expand_grid(omega_grid); }

double estimated_memory_mb(const RunConfig& c) {
  const int n = *std::max_element(c.sizes.begin(), c.sizes.end());
  const double mb = 1.0 / (1024.0 * 1024.0);
  const double cplx_bytes = 16.0;
  const double d = static_cast<double>(max_sector_dim(std::min(n, 24)));
  switch (c.experiment) {
    case Experiment::spectrum:
    case Experiment::entropy:
    case Experiment::gap_scaling:
      return 2.0 * d * d * cplx_bytes * mb * std::max(1, c.workers);
    case Experiment::see:
    case Experiment::green: {
      double total = 0.0;
      for (int q = 0; q <= std::min(n, 24); ++q) {
        const double s = static_cast<double>(fock::binomial(std::min(n, 24), q));
        total += s * s;
      }
      return (total + d * d) * cplx_bytes * mb * std::max(1, c.workers);
    }
    case Experiment::otoc: {
      const double full = std::ldexp(1.0, std::min(n, 24));
      return (n <= 10 ? 6.0 * full * full : 4.0 * c.random_states * full) * cplx_bytes * mb;
    }
    case Experiment::battery:
    case Experiment::power_scaling: {
      const double full = std::ldexp(1.0, std::min(n, 24));
      const double q = n / 2.0;
      const double nnz = d * (q * (q - 1) / 2) * (q * (q - 1) / 2 + 1);
      const double states = (static_cast<double>(c.tau_grid().size()) + 2.0) * full * cplx_bytes;
      return (states + nnz * 56.0 + 34.0 * d * cplx_bytes) * mb * std::max(1, c.workers);
    }
    case Experiment::dicke:
    case Experiment::sd:
      return 64.0;
  }
  return 0.0;
}

void RunConfig::validate() const {
  if (sizes.empty()) throw ConfigError("N", "at least one size is required");
  for (int n : sizes)
    if (n < 2 || n > fock::kMaxEnumerateSites)
      throw ConfigError("N", "sizes must lie in 2.." + std::to_string(fock::kMaxEnumerateSites));
  const int n_max = *std::max_element(sizes.begin(), sizes.end());
  if (J < 0) throw ConfigError("J", "must be non-negative");
  if (omega <= 0) throw ConfigError("omega", "must be positive");
  if (lambda < 0) throw ConfigError("lambda", "must be non-negative");
  if (eta < 0) throw ConfigError("eta", "must be non-negative");
  if (realizations < 1) throw ConfigError("realizations", "must be >= 1");
  if (random_states < 2) throw ConfigError("random_states", "must be >= 2");
  if (workers < 1) throw ConfigError("workers", "must be >= 1");
  if (memory_cap_mb <= 0) throw ConfigError("memory_cap_mb", "must be positive");
  if (output.empty()) throw ConfigError("output", "must not be empty");
  if (model != "syk" && model != "syk-ph" && model != "free")
    throw ConfigError("model", "expected syk, syk-ph or free");
  if (variant != "fermionic" && variant != "bosonic")
    throw ConfigError("variant", "expected fermionic or bosonic");
  if (mode != "parallel" && mode != "collective")
    throw ConfigError("mode", "expected parallel or collective");
  if (sector != "half" && sector != "all") {
    const long long q = parse_int("sector", sector);
    for (int n : sizes)
      if (q < 0 || q > n) throw ConfigError("sector", "charge out of range for N=" + std::to_string(n));
  }
  for (double t : temperature_grid())
    if (t <= 0) throw ConfigError("T", "temperatures must be positive");
  const auto taus = tau_grid();
  if (taus.front() != 0.0 || !std::is_sorted(taus.begin(), taus.end()))
    throw ConfigError("tau", "grid must start at 0 and ascend");
  const auto ts = time_grid();
  if (!std::is_sorted(ts.begin(), ts.end()) || ts.front() < 0)
    throw ConfigError("t", "times must be non-negative and ascending");
  if (frequency_grid().size() < 2) throw ConfigError("omega_grid", "need at least two frequencies");
  if (sd_mixing <= 0 || sd_mixing > 1) throw ConfigError("sd_mixing", "must lie in (0, 1]");
  if (sd_tolerance <= 0) throw ConfigError("sd_tolerance", "must be positive");
  if (sd_max_iterations < 1) throw ConfigError("sd_max_iterations", "must be >= 1");
  if (sd_grid_half_size < 0) throw ConfigError("sd_grid_half_size", "must be >= 0");

  switch (experiment) {
    case Experiment::see:
    case Experiment::green:
      if (site < 0 || site >= n_max) throw ConfigError("site", "out of range");
      break;
    case Experiment::otoc:
      if (w_site == v_site) throw ConfigError("w_site", "must differ from v_site");
      for (int n : sizes)
        if (w_site < 0 || v_site < 0 || w_site >= n || v_site >= n)
          throw ConfigError("w_site", "sites must lie below N");
      if (n_max > 14)
        throw ResourceError("N=" + std::to_string(n_max) +
                            " exceeds the OTOC cap of 14 sites (full 2^N space)");
      break;
    case Experiment::battery:
    case Experiment::power_scaling:
      for (int m : ergotropy_sizes)
        for (int n : sizes)
          if (m < 1 || m > n) throw ConfigError("ergotropy", "sizes must lie in 1..N");
      if (experiment == Experiment::power_scaling) {
        std::set<int> distinct(sizes.begin(), sizes.end());
        if (distinct.size() < 3) throw ConfigError("N", "power-scaling needs at least 3 sizes");
        for (int n : sizes)
          if (n % 2 || n < 8) throw ConfigError("N", "power-scaling sizes must be even and >= 8");
        if (realizations < 20) throw ConfigError("realizations", "power-scaling needs >= 20 realizations");
      }
      break;
    case Experiment::gap_scaling: {
      std::set<int> distinct(sizes.begin(), sizes.end());
      if (distinct.size() < 2) throw ConfigError("N", "gap-scaling needs at least 2 sizes");
      for (int n : sizes)
        if (n % 2) throw ConfigError("N", "gap-scaling sizes must be even");
      break;
    }
    case Experiment::dicke:
      if (n_max > 200) throw ResourceError("N=" + std::to_string(n_max) + " exceeds the Dicke cap of 200 atoms");
      break;
    default:
      break;
  }
  if ((is_dense(experiment) || experiment == Experiment::battery ||
       experiment == Experiment::power_scaling) &&
      n_max > fock::kMaxDenseSites)
    throw ResourceError("N=" + std::to_string(n_max) + " exceeds the dense cap of " +
                        std::to_string(fock::kMaxDenseSites) + " sites");
  const double need = estimated_memory_mb(*this);
  if (need > memory_cap_mb)
    throw ResourceError("estimated memory " + std::to_string(static_cast<long long>(need)) +
                        " MB exceeds memory_cap_mb=" + format_double(memory_cap_mb));
}

std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError(origin + ":" + std::to_string(lineno), "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (!fields().contains(key)) throw ConfigError(key, "unknown key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig parse_config(const std::map<std::string, std::string>& file_entries,
                       const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> merged = file_entries;
  for (const auto& [k, v] : overrides) merged[k] = v;
  RunConfig c;
  // A figure preset supplies defaults that explicit entries still override.
  if (auto it = merged.find("figure"); it != merged.end() && !it->second.empty()) {
    const auto runs = figure_preset(it->second);
    for (const auto& [k, v] : runs.front())
      if (!merged.contains(k)) merged[k] = v;
  }
  for (const auto& [k, v] : merged) {
    const auto it = fields().find(k);
    if (it == fields().end()) throw ConfigError(k, "unknown key");
    it->second.set(c, v);
  }
  c.validate();
  return c;
}

RunConfig parse_config_file(const std::filesystem::path& path,
                            const std::map<std::string, std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(parse_key_values(text.str(), path.string()), overrides);
}

std::vector<std::string> figure_names() {
  return {"fig2-left", "fig2-right", "fig3", "fig4a", "fig4b"};
}

std::vector<std::map<std::string, std::string>> figure_preset(const std::string& name) {
  if (name == "fig2-left")
    return {{{"experiment", "entropy"}, {"N", "8,10,12,14"}, {"T", "log:0.005:10:80"},
             {"realizations", "20"}},
            {{"experiment", "sd"}, {"T", "log:0.005:10:80"}}};
  if (name == "fig2-right")
    return {{{"experiment", "see"}, {"N", "8,10,12"}, {"realizations", "20"}}};
  if (name == "fig3")
    return {{{"experiment", "green"}, {"N", "8,10,12"}, {"realizations", "10"},
             {"omega_grid", "lin:-2:2:801"}},
            {{"experiment", "sd"}, {"T", "0.01"}}};
  if (name == "fig4a")
    return {{{"experiment", "battery"}, {"N", "16"}, {"variant", "fermionic"}, {"realizations", "1"},
             {"ergotropy", "1,2,4,8"}}};
  if (name == "fig4b")
    return {{{"experiment", "battery"}, {"N", "16"}, {"variant", "bosonic"}, {"realizations", "1"},
             {"ergotropy", "1,2,4,8"}}};
  throw ConfigError("figure", "unknown figure '" + name + "'");
}

}  // namespace syk
