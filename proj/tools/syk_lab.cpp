// syk-lab: run experiments, reproduce figure data, validate configs.
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "syk/config.hpp"
#include "syk/errors.hpp"
#include "syk/experiments.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kResource = 3, kConvergence = 4, kPartial = 5 };

void on_signal(int) { syk::interrupt_flag().store(true); }

std::map<std::string, std::string> parse_flags(const std::vector<std::string>& tokens) {
  std::map<std::string, std::string> out;
  for (const auto& t : tokens) {
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) throw syk::ConfigError(t, "expected key=value");
    out[t.substr(0, eq)] = t.substr(eq + 1);
  }
  return out;
}

void apply_env(std::map<std::string, std::string>& flags) {
  if (const char* w = std::getenv("SYK_LAB_WORKERS"); w && *w) flags["workers"] = w;
}

// `source` is a config file, or when no such file exists either the first
// key=value flag or a bare experiment name. Flags and SYK_LAB_WORKERS win over the file.
std::map<std::string, std::string> gather(const std::string& source, const std::vector<std::string>& extra) {
  std::map<std::string, std::string> entries;
  const bool is_file = std::filesystem::exists(source);
  if (!is_file && source.find('=') != std::string::npos) {
    entries = parse_flags({source});
  } else if (!is_file && source.find_first_of("/.") == std::string::npos) {
    entries["experiment"] = source;
  } else {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw syk::ConfigError("", "cannot read config file " + source);
    std::ostringstream text;
    text << in.rdbuf();
    entries = syk::parse_key_values(text.str(), source);
  }
  for (const auto& [k, v] : parse_flags(extra)) entries[k] = v;
  apply_env(entries);
  return entries;
}

int report(const syk::RunReport& r) {
  std::cout << r.summary << "\n";
  return r.exit_code;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const syk::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const syk::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kResource;
  } catch (const syk::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return kConvergence;
  } catch (const syk::DivergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return kConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"syk-lab: finite-N and large-N SYK numerics and quantum-battery protocols"};
  app.require_subcommand(1);

  std::string source, figure;
  std::vector<std::string> extra;

  auto* run = app.add_subcommand("run", "run an experiment from a config file (key=value flags win)");
  run->add_option("config", source, "config file, or a first key=value flag")->required();
  run->add_option("flags", extra, "key=value overrides");

  auto* fig = app.add_subcommand("figure", "reproduce the data files behind a figure");
  fig->add_option("name", figure, "fig2-left | fig2-right | fig3 | fig4a | fig4b")->required();
  fig->add_option("flags", extra, "key=value overrides applied to every sub-run");

  auto* val = app.add_subcommand("validate", "parse and validate a config, print its canonical form");
  val->add_option("config", source, "config file, or a first key=value flag")->required();
  val->add_option("flags", extra, "key=value overrides");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  if (*run) {
    return guarded([&] {
      auto entries = gather(source, extra);
      if (auto it = entries.find("figure"); it != entries.end() && !it->second.empty()) {
        const std::string name = it->second;
        entries.erase(it);
        return report(syk::run_figure(name, entries));
      }
      return report(syk::run_experiment(syk::parse_config(entries)));
    });
  }
  if (*fig) {
    return guarded([&] {
      auto flags = parse_flags(extra);
      apply_env(flags);
      return report(syk::run_figure(figure, flags));
    });
  }
  return guarded([&] {
    const syk::RunConfig cfg = syk::parse_config(gather(source, extra));
    std::cout << cfg.canonical();
    return int(kOk);
  });
}
