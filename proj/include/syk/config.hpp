#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace syk {

enum class Experiment {
  spectrum,
  entropy,
  see,
  green,
  sd,
  otoc,
  battery,
  dicke,
  power_scaling,
  gap_scaling,
};

std::string to_string(Experiment e);

/// Expand "log:a:b:n", "lin:a:b:n" or a comma list into values.
std::vector<double> expand_grid(const std::string& spec);

/// Grid spec with its numbers rewritten in shortest round-trip form.
std::string canonical_grid(const std::string& spec);

struct RunConfig {
  Experiment experiment = Experiment::spectrum;
  std::string figure;  // preset name, empty when not a figure run

  // Model
  std::vector<int> sizes{12};
  double J = 1.0;
  double mu = 0.0;
  double omega = 1.0;
  double lambda = 0.05;
  std::string model = "syk";           // syk | syk-ph | free
  std::string variant = "fermionic";   // fermionic | bosonic
  std::string mode = "collective";     // dicke: parallel | collective
  bool rescale = false;
  std::string sector = "half";         // half | all | <charge>
  int site = 0;
  int w_site = 0;
  int v_site = 1;
  std::vector<int> ergotropy_sizes{1, 2};

  // Grids
  std::string temperatures = "log:0.01:100:60";
  std::string tau = "default";          // default = 0 plus log:0.01/J:50/J:200
  std::string times = "lin:0:10:41";    // OTOC times
  std::string omega_grid = "lin:-3:3:1201";
  double eta = 0.0;  // 0 picks the spectral default

  // Large-N solver
  int sd_grid_half_size = 0;
  double sd_tolerance = 1e-10;
  double sd_mixing = 0.3;
  int sd_max_iterations = 5000;

  // Ensemble and execution
  std::uint64_t seed = 0;
  int realizations = 20;
  int random_states = 20;
  int workers = 1;
  double memory_cap_mb = 4096;
  std::string output = "syk-lab-out";

  /// Sorted key=value lines, one per field, LF terminated.
  std::string canonical() const;
  /// Raises ConfigError / ResourceError on invalid or oversized requests.
  void validate() const;

  std::vector<double> temperature_grid() const;
  std::vector<double> tau_grid() const;
  std::vector<double> time_grid() const;
  std::vector<double> frequency_grid() const;
};

/// Parse key=value text ('#' comments, blank lines allowed); unknown keys rejected.
std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& origin);

/// Defaults, then the file entries, then the overrides (flags win), then validation.
RunConfig parse_config(const std::map<std::string, std::string>& file_entries,
                       const std::map<std::string, std::string>& overrides = {});
RunConfig parse_config_file(const std::filesystem::path& path,
                            const std::map<std::string, std::string>& overrides = {});

/// Key/value bundles of the runs that make up a figure; ConfigError when unknown.
std::vector<std::map<std::string, std::string>> figure_preset(const std::string& name);
std::vector<std::string> figure_names();

/// Rough peak memory of a run in MB, used against memory_cap_mb.
double estimated_memory_mb(const RunConfig& config);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace syk
