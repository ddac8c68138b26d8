#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "syk/config.hpp"

namespace syk {

struct TaskStatus {
  int index = 0;
  int attempts = 0;
  bool ok = false;
  std::string error;  // last failure message, empty on success
  std::exception_ptr exception;
};

/// Runs task(i) for i = 0..count-1 on `workers` threads. A failing task is
/// retried once before it is marked failed. Tasks not started when `stop`
/// becomes true are left with attempts == 0.
std::vector<TaskStatus> run_tasks(int count, int workers, const std::function<void(int)>& task,
                                  const std::atomic<bool>* stop = nullptr);

/// Fraction of tasks that must succeed for a run to count as complete.
inline constexpr double kMinSuccessFraction = 0.8;

struct RunReport {
  int exit_code = 0;  // 0 ok, 5 partial failure
  std::vector<std::filesystem::path> artifacts;
  std::vector<TaskStatus> tasks;
  std::string summary;
};

/// Set asynchronously (e.g. from a signal handler) to stop scheduling new work.
std::atomic<bool>& interrupt_flag();

/// Executes one experiment, writing CSV artifacts and manifest.json under config.output.
RunReport run_experiment(const RunConfig& config);

/// All runs of a figure preset; `overrides` apply to every sub-run. Sub-run k
/// writes to <output>/<figure>/<k>-<experiment>.
RunReport run_figure(const std::string& name, const std::map<std::string, std::string>& overrides);

}  // namespace syk
