#include "syk/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>

#include "syk/battery.hpp"
#include "syk/couplings.hpp"
#include "syk/dynamics.hpp"
#include "syk/errors.hpp"
#include "syk/hamiltonian.hpp"
#include "syk/largen.hpp"
#include "syk/output.hpp"
#include "syk/spectral.hpp"
#include "syk/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace syk {

std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

std::vector<TaskStatus> run_tasks(int count, int workers, const std::function<void(int)>& task,
                                  const std::atomic<bool>* stop) {
  std::vector<TaskStatus> status(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) status[i].index = i;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      if (stop && stop->load()) return;
      const int i = next.fetch_add(1);
      if (i >= count) return;
      for (int attempt = 1; attempt <= 2; ++attempt) {
        status[i].attempts = attempt;
        try {
          task(i);
          status[i].ok = true;
          status[i].error.clear();
          break;
        } catch (const std::exception& e) {
          status[i].error = e.what();
          status[i].exception = std::current_exception();
        } catch (...) {
          status[i].error = "unknown failure";
          status[i].exception = std::current_exception();
        }
      }
    }
  };
  const int n = std::clamp(workers, 1, std::max(count, 1));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return status;
}

namespace {

using Clock = std::chrono::steady_clock;

fs::path size_dir(const RunConfig& c, int n) {
  return c.sizes.size() > 1 ? fs::path(c.output) / ("N" + std::to_string(n)) : fs::path(c.output);
}

DisorderEnsemble ensemble_of(const RunConfig& c) { return DisorderEnsemble(c.seed, c.realizations); }

CouplingTensor tensor_for(const RunConfig& c, int n, int r) {
  Rng rng = ensemble_of(c).stream(r);
  return sample_syk(n, c.J, rng);
}

int sector_charge(const RunConfig& c, int n) {
  if (c.sector == "half") return n / 2;
  return std::stoi(c.sector);
}

SparseHermitian model_hamiltonian(const RunConfig& c, int n, int r, const fock::Basis& basis) {
  if (c.model == "free") {
    Rng rng = ensemble_of(c).stream(r);
    const HoppingMatrix hop = sample_hopping(n, c.J, rng);
    Eigen::MatrixXcd k = hop.entries / std::sqrt(double(n));
    k.diagonal().array() -= c.mu;
    return build_bilinear(k, basis);
  }
  const CouplingTensor t = tensor_for(c, n, r);
  return c.model == "syk-ph" ? build_syk_ph(t, c.mu, basis) : build_syk(t, c.mu, basis);
}

GrandSpectrum model_spectrum(const RunConfig& c, int n, int r, bool vectors) {
  if (c.model != "free")
    return grand_spectrum(tensor_for(c, n, r), c.mu, vectors,
                          c.model == "syk-ph" ? SykVariant::particle_hole : SykVariant::standard);
  GrandSpectrum g;
  g.n_sites = n;
  for (int q = 0; q <= n; ++q) {
    auto basis = std::make_shared<const fock::Basis>(fock::Basis::sector(n, q));
    g.sectors.push_back({basis, diagonalize(model_hamiltonian(c, n, r, *basis), vectors)});
  }
  return g;
}

/// Shared bookkeeping for one run: manifest, task accounting, artifacts.
class RunContext {
 public:
  explicit RunContext(const RunConfig& config) : config_(config), start_(Clock::now()) {
    fs::create_directories(config.output);
    manifest_["config"] = config.canonical();
    manifest_["experiment"] = to_string(config.experiment);
    manifest_["version"] = artifact_version();
    manifest_["started"] = utc_timestamp();
    manifest_["seeds"] = {{"master_seed", config.seed},
                          {"realizations", config.realizations},
                          {"stream", "realization r uses DisorderEnsemble(master_seed).stream(r)"}};
    manifest_["status"] = "running";
    write_manifest();
  }

  const RunConfig& config() const { return config_; }

  /// Runs `count` tasks through the worker pool and records their status.
  std::vector<TaskStatus> tasks(int count, const std::function<void(int)>& task,
                                const std::function<json(int)>& label) {
    auto status = run_tasks(count, config_.workers, task, &interrupt_flag());
    for (const auto& s : status) {
      json entry = label(s.index);
      entry["attempts"] = s.attempts;
      entry["status"] = s.ok ? "ok" : (s.attempts == 0 ? "not-run" : "failed");
      if (!s.ok && !s.error.empty()) entry["error"] = s.error;
      task_log_.push_back(entry);
    }
    report_.tasks.insert(report_.tasks.end(), status.begin(), status.end());
    return status;
  }

  void write(const fs::path& path, const CsvTable& table) {
    table.write(path);
    report_.artifacts.push_back(path);
  }

  void note(const std::string& key, json value) { manifest_["results"][key] = std::move(value); }

  RunReport finish() {
    std::size_t ok = 0;
    for (const auto& t : report_.tasks) ok += t.ok;
    const std::size_t total = report_.tasks.size();
    const bool interrupted = interrupt_flag().load();
    const bool partial = total > 0 && double(ok) < kMinSuccessFraction * double(total);
    report_.exit_code = (partial || interrupted) ? 5 : 0;
    manifest_["finished"] = utc_timestamp();
    manifest_["wall_time_s"] = std::chrono::duration<double>(Clock::now() - start_).count();
    manifest_["tasks"] = task_log_;
    manifest_["tasks_ok"] = ok;
    manifest_["tasks_total"] = total;
    manifest_["status"] = interrupted ? "interrupted" : (partial ? "partial-failure" : "ok");
    json files = json::array();
    for (const auto& a : report_.artifacts) files.push_back(a.filename().string());
    manifest_["artifacts"] = files;
    write_manifest();
    report_.summary = to_string(config_.experiment) + ": " + std::to_string(ok) + "/" +
                      std::to_string(total) + " tasks ok, artifacts in " + config_.output;
    return report_;
  }

  void fail(const std::string& what) {
    manifest_["status"] = "error";
    manifest_["error"] = what;
    manifest_["finished"] = utc_timestamp();
    manifest_["tasks"] = task_log_;
    write_manifest();
  }

 private:
  void write_manifest() { write_json_atomic(fs::path(config_.output) / "manifest.json", manifest_); }

  RunConfig config_;
  Clock::time_point start_;
  json manifest_;
  json task_log_ = json::array();
  RunReport report_;
};

json realization_label(int n, int r) { return {{"N", n}, {"realization", r}}; }

/// Flattened (size, realization) work items.
struct Items {
  const RunConfig& c;
  int count() const { return static_cast<int>(c.sizes.size()) * c.realizations; }
  int size_index(int i) const { return i / c.realizations; }
  int n(int i) const { return c.sizes[size_index(i)]; }
  int r(int i) const { return i % c.realizations; }
};

std::vector<std::size_t> ok_indices(const std::vector<TaskStatus>& status, std::size_t offset,
                                    std::size_t count) {
  std::vector<std::size_t> ok;
  for (std::size_t i = offset; i < offset + count; ++i)
    if (status[i].ok) ok.push_back(i);
  return ok;
}

// ---------------------------------------------------------------------------

void run_spectrum(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const Items items{c};
  std::vector<std::vector<std::pair<int, Eigen::VectorXd>>> spectra(items.count());
  auto status = ctx.tasks(
      items.count(),
      [&](int i) {
        const int n = items.n(i), r = items.r(i);
        std::vector<std::pair<int, Eigen::VectorXd>> out;
        if (c.sector == "all") {
          for (auto& s : model_spectrum(c, n, r, false).sectors)
            out.emplace_back(s.basis->charge(), std::move(s.eig.values));
        } else {
          const int q = sector_charge(c, n);
          const auto basis = fock::Basis::sector(n, q);
          out.emplace_back(q, diagonalize(model_hamiltonian(c, n, r, basis), false).values);
        }
        spectra[i] = std::move(out);
      },
      [&](int i) { return realization_label(items.n(i), items.r(i)); });

  for (std::size_t s = 0; s < c.sizes.size(); ++s) {
    const int n = c.sizes[s];
    CsvTable table({"realization", "Q", "index", "energy"});
    std::vector<double> ratios;
    for (std::size_t i : ok_indices(status, s * c.realizations, c.realizations)) {
      for (const auto& [q, values] : spectra[i]) {
        for (Eigen::Index k = 0; k < values.size(); ++k)
          table.add_row({double(items.r(int(i))), double(q), double(k), values[k]});
        if (values.size() >= 8) ratios.push_back(level_spacing_ratio(values));
      }
    }
    const auto r = stats::mean_stderr(ratios);
    table.add_footer("level_spacing_ratio=" + format_double(r.mean) + " stderr=" + format_double(r.error));
    ctx.write(size_dir(c, n) / "spectrum.csv", table);
    ctx.note("N" + std::to_string(n), {{"level_spacing_ratio", r.mean}, {"stderr", r.error}});
  }
}

void run_entropy(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const Items items{c};
  const auto temps = c.temperature_grid();
  std::vector<ThermoCurve> curves(items.count());
  auto status = ctx.tasks(
      items.count(),
      [&](int i) {
        const int n = items.n(i);
        curves[i] = thermodynamics(model_spectrum(c, n, items.r(i), false).all_values(), n, temps);
      },
      [&](int i) { return realization_label(items.n(i), items.r(i)); });

  for (std::size_t s = 0; s < c.sizes.size(); ++s) {
    const int n = c.sizes[s];
    const auto ok = ok_indices(status, s * c.realizations, c.realizations);
    CsvTable table({"T", "S_per_site", "stderr"});
    std::vector<double> col;
    for (std::size_t t = 0; t < temps.size(); ++t) {
      col.clear();
      for (std::size_t i : ok) col.push_back(curves[i].entropy_per_site[t]);
      const auto m = stats::mean_stderr(col);
      table.add_row({temps[t], m.mean, m.error});
    }
    table.add_footer("realizations=" + std::to_string(ok.size()) + " N=" + std::to_string(n));
    ctx.write(size_dir(c, n) / "entropy.csv", table);
  }
}

void run_see(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const Items items{c};
  std::vector<std::vector<double>> entropies(items.count());
  std::vector<int> degeneracy(items.count(), 0);
  auto status = ctx.tasks(
      items.count(),
      [&](int i) {
        const int n = items.n(i);
        const GroundManifold gm = ground_manifold(model_spectrum(c, n, items.r(i), true));
        // Degenerate ground states: average over the manifold basis returned.
        std::vector<double> s(static_cast<std::size_t>(n - 1), 0.0);
        for (const auto& state : gm.states) {
          const auto full = fock::embed_in_full(state);
          for (int na = 1; na < n; ++na) s[na - 1] += entanglement_entropy(full, na) / double(gm.states.size());
        }
        entropies[i] = std::move(s);
        degeneracy[i] = static_cast<int>(gm.states.size());
      },
      [&](int i) { return realization_label(items.n(i), items.r(i)); });

  for (std::size_t s = 0; s < c.sizes.size(); ++s) {
    const int n = c.sizes[s];
    const auto ok = ok_indices(status, s * c.realizations, c.realizations);
    CsvTable table({"N_A", "S_EE", "stderr"});
    std::vector<double> col;
    for (int na = 1; na < n; ++na) {
      col.clear();
      for (std::size_t i : ok) col.push_back(entropies[i][na - 1]);
      const auto m = stats::mean_stderr(col);
      table.add_row({double(na), m.mean, m.error});
    }
    int degenerate = 0;
    for (std::size_t i : ok) degenerate += degeneracy[i] > 1;
    table.add_footer("realizations=" + std::to_string(ok.size()) +
                     " degenerate_ground_states=" + std::to_string(degenerate));
    ctx.write(size_dir(c, n) / "see.csv", table);
  }
}

void run_green(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const Items items{c};
  const auto grid = c.frequency_grid();
  std::vector<LehmannPoles> poles(items.count());
  auto status = ctx.tasks(
      items.count(),
      [&](int i) { poles[i] = lehmann_poles(model_spectrum(c, items.n(i), items.r(i), true), c.site, 0.0); },
      [&](int i) { return realization_label(items.n(i), items.r(i)); });

  for (std::size_t s = 0; s < c.sizes.size(); ++s) {
    const int n = c.sizes[s];
    const auto ok = ok_indices(status, s * c.realizations, c.realizations);
    if (ok.empty()) continue;
    double eta = c.eta;
    if (eta <= 0) {
      std::vector<double> etas;
      for (std::size_t i : ok) etas.push_back(default_eta(poles[i]));
      eta = stats::mean_stderr(etas).mean;
    }
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i : ok) g += broaden(poles[i], grid, eta).retarded_g;
    g /= double(ok.size());
    SpectralFunction avg{grid, g, eta};
    CsvTable table({"omega", "re_G", "im_G", "A"});
    for (std::size_t k = 0; k < grid.size(); ++k)
      table.add_row({grid[k], g[k].real(), g[k].imag(), -g[k].imag() / std::numbers::pi});
    const double weight = spectral_weight(avg);
    table.add_footer("eta=" + format_double(eta) + " sum_rule=" + format_double(weight) +
                     " realizations=" + std::to_string(ok.size()) + " site=" + std::to_string(c.site));
    ctx.write(size_dir(c, n) / "green.csv", table);
    ctx.note("N" + std::to_string(n), {{"eta", eta}, {"sum_rule", weight}});
  }
}

SdConfig sd_config(const RunConfig& c) {
  SdConfig s;
  s.mixing = c.sd_mixing;
  s.tolerance = c.sd_tolerance;
  s.max_iterations = c.sd_max_iterations;
  s.grid_half_size = c.sd_grid_half_size;
  return s;
}

void write_sd_green(RunContext& ctx, const MatsubaraGreen& sol) {
  const RunConfig& c = ctx.config();
  CsvTable freq({"n", "omega_n", "re_G", "im_G", "re_Sigma", "im_Sigma"});
  for (Eigen::Index p = 0; p < sol.g_iw.size(); ++p)
    freq.add_row({double(p - sol.half_size), sol.omega(p), sol.g_iw[p].real(), sol.g_iw[p].imag(),
                  sol.sigma_iw[p].real(), sol.sigma_iw[p].imag()});
  freq.add_footer("beta=" + format_double(sol.beta) + " J=" + format_double(sol.coupling) +
                  " mu=" + format_double(sol.mu) + " iterations=" + std::to_string(sol.iterations));
  ctx.write(fs::path(c.output) / "sd_green.csv", freq);
  CsvTable tau({"tau", "re_G", "im_G"});
  for (Eigen::Index k = 0; k < sol.g_tau.size(); ++k)
    tau.add_row({sol.tau(k), sol.g_tau[k].real(), sol.g_tau[k].imag()});
  ctx.write(fs::path(c.output) / "sd_green_tau.csv", tau);
}

void run_sd(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  auto temps = c.temperature_grid();
  std::sort(temps.begin(), temps.end());
  const SdConfig cfg = sd_config(c);
  std::optional<MatsubaraGreen> coldest;
  ctx.tasks(
      1,
      [&](int) {
        if (temps.size() >= 3) {
          const ThermoCurve curve = entropy_curve_largen(c.J, c.mu, temps, cfg);
          CsvTable table({"T", "F_per_site", "S_per_site"});
          for (std::size_t k = 0; k < temps.size(); ++k)
            table.add_row({temps[k], curve.free_energy_per_site[k], curve.entropy_per_site[k]});
          ctx.write(fs::path(c.output) / "sd_entropy.csv", table);
        }
        coldest = solve_sd(c.J, c.mu, 1.0 / temps.front(), cfg);
      },
      [](int) { return json{{"task", "schwinger-dyson"}}; });
  if (coldest) write_sd_green(ctx, *coldest);
}

void run_otoc(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const Items items{c};
  const auto times = c.time_grid();
  std::vector<OtocCurve> curves(items.count());
  auto status = ctx.tasks(
      items.count(),
      [&](int i) {
        const int n = items.n(i), r = items.r(i);
        const auto basis = fock::Basis::full(n);
        OtocOptions opt;
        opt.random_states = c.random_states;
        opt.seed = c.seed * 1000003ULL + static_cast<std::uint64_t>(r);
        curves[i] = otoc(model_hamiltonian(c, n, r, basis), c.w_site, c.v_site, times, 0.0, opt);
      },
      [&](int i) { return realization_label(items.n(i), items.r(i)); });

  for (std::size_t s = 0; s < c.sizes.size(); ++s) {
    const int n = c.sizes[s];
    const auto ok = ok_indices(status, s * c.realizations, c.realizations);
    if (ok.empty()) continue;
    CsvTable table({"t", "f_re", "f_im", "c", "stderr"});
    std::vector<double> fr, fi, cc;
    for (std::size_t k = 0; k < times.size(); ++k) {
      fr.clear(), fi.clear(), cc.clear();
      double sampling = 0.0;
      for (std::size_t i : ok) {
        fr.push_back(curves[i].f_t[k].real());
        fi.push_back(curves[i].f_t[k].imag());
        cc.push_back(curves[i].c_t[k]);
        sampling += curves[i].c_error[k] * curves[i].c_error[k];
      }
      const auto m = stats::mean_stderr(cc);
      const double err = std::sqrt(m.error * m.error + sampling / double(ok.size() * ok.size()));
      table.add_row({times[k], stats::mean_stderr(fr).mean, stats::mean_stderr(fi).mean, m.mean, err});
    }
    table.add_footer("W=" + curves[ok.front()].w_label + " V=" + curves[ok.front()].v_label +
                     " random_states=" + std::to_string(curves[ok.front()].samples) +
                     " realizations=" + std::to_string(ok.size()));
    ctx.write(size_dir(c, n) / "otoc.csv", table);
  }
}

BatteryVariant battery_variant(const RunConfig& c) {
  return c.variant == "bosonic" ? BatteryVariant::bosonic : BatteryVariant::fermionic;
}

CsvTable battery_table(const std::vector<const BatteryRun*>& runs) {
  const BatteryRun& first = *runs.front();
  std::vector<std::string> header{"tau", "E", "P"};
  for (int m : first.ergotropy_sizes) header.push_back("ergotropy_" + std::to_string(m));
  for (Eigen::Index k = 0; k < first.populations.rows(); ++k) header.push_back("p_" + std::to_string(k));
  CsvTable table(header);
  const double inv = 1.0 / double(runs.size());
  std::vector<double> col(runs.size());
  auto mean = [&](auto get) {
    for (std::size_t r = 0; r < runs.size(); ++r) col[r] = get(*runs[r]);
    return stats::pairwise_sum(col) * inv;
  };
  for (std::size_t t = 0; t < first.tau_grid.size(); ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    std::vector<double> row{first.tau_grid[t], mean([&](const BatteryRun& b) { return b.energy[t]; }),
                            mean([&](const BatteryRun& b) { return b.power[t]; })};
    for (std::size_t m = 0; m < first.ergotropy_sizes.size(); ++m)
      row.push_back(mean([&](const BatteryRun& b) { return b.ergotropy[m][t]; }));
    for (Eigen::Index k = 0; k < first.populations.rows(); ++k)
      row.push_back(mean([&](const BatteryRun& b) { return b.populations(k, ti); }));
    table.add_row(row);
  }
  return table;
}

void run_battery(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const Items items{c};
  const auto taus = c.tau_grid();
  std::vector<BatteryRun> runs(items.count());
  auto status = ctx.tasks(
      items.count(),
      [&](int i) {
        const int n = items.n(i);
        std::vector<int> sizes;
        for (int m : c.ergotropy_sizes)
          if (m <= n) sizes.push_back(m);
        runs[i] = battery_charge_syk(tensor_for(c, n, items.r(i)), c.omega, taus, battery_variant(c), sizes);
        runs[i].seed = c.seed;
      },
      [&](int i) { return realization_label(items.n(i), items.r(i)); });

  for (std::size_t s = 0; s < c.sizes.size(); ++s) {
    const int n = c.sizes[s];
    const auto ok = ok_indices(status, s * c.realizations, c.realizations);
    if (ok.empty()) continue;
    std::vector<const BatteryRun*> ptrs;
    std::vector<BatteryRun> copies;
    for (std::size_t i : ok) ptrs.push_back(&runs[i]);
    for (std::size_t i : ok) copies.push_back(runs[i]);
    CsvTable table = battery_table(ptrs);
    const PowerPoint pt = summarize_power(copies);
    table.add_footer("variant=" + c.variant + " N=" + std::to_string(n) +
                     " realizations=" + std::to_string(ok.size()));
    table.add_footer("P_star=" + format_double(pt.p_star) + " tau_star=" + format_double(pt.tau_star) +
                     " E_tau_star=" + format_double(pt.energy_at_tau_star) +
                     " E_plateau=" + format_double(pt.energy_plateau));
    ctx.write(size_dir(c, n) / "battery.csv", table);
  }
}

void run_dicke(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const auto taus = c.tau_grid();
  const DickeMode mode = c.mode == "parallel" ? DickeMode::parallel : DickeMode::collective;
  std::vector<BatteryRun> runs(c.sizes.size());
  auto status = ctx.tasks(
      static_cast<int>(c.sizes.size()),
      [&](int i) { runs[i] = battery_charge_dicke(c.sizes[i], c.omega, c.lambda, taus, mode, c.rescale); },
      [&](int i) { return json{{"N", c.sizes[i]}}; });

  CsvTable summary({"N", "P_star", "tau_star", "E_tau_star"});
  std::vector<double> ns, ps;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!status[i].ok) continue;
    const BatteryRun& run = runs[i];
    CsvTable curve({"tau", "E", "P"});
    for (std::size_t t = 0; t < run.tau_grid.size(); ++t)
      curve.add_row({run.tau_grid[t], run.energy[t], run.power[t]});
    ctx.write(fs::path(c.output) / ("dicke_N" + std::to_string(run.n_sites) + ".csv"), curve);
    const auto best = std::max_element(run.power.begin(), run.power.end()) - run.power.begin();
    summary.add_row({double(run.n_sites), run.power[best], run.tau_grid[best], run.energy[best]});
    ns.push_back(run.n_sites);
    ps.push_back(run.power[best]);
  }
  summary.add_footer("mode=" + c.mode + " rescale=" + (c.rescale ? std::string("true") : "false") +
                     " lambda=" + format_double(c.lambda));
  if (ns.size() >= 3) {
    const auto fit = power_law_fit(ns, ps);
    summary.add_footer("slope=" + format_double(fit.slope) + " stderr=" + format_double(fit.slope_stderr));
    ctx.note("slope", fit.slope);
  }
  ctx.write(fs::path(c.output) / "dicke.csv", summary);
}

void run_power_scaling(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const Items items{c};
  const auto taus = c.tau_grid();
  std::vector<BatteryRun> runs(items.count());
  auto status = ctx.tasks(
      items.count(),
      [&](int i) {
        runs[i] = battery_charge_syk(tensor_for(c, items.n(i), items.r(i)), c.omega, taus, battery_variant(c));
        runs[i].seed = c.seed;
      },
      [&](int i) { return realization_label(items.n(i), items.r(i)); });

  CsvTable table({"N", "P_star", "stderr", "tau_star"});
  std::vector<double> ns, ps, ps_mta;
  std::vector<PowerPoint> points;
  for (std::size_t s = 0; s < c.sizes.size(); ++s) {
    const auto ok = ok_indices(status, s * c.realizations, c.realizations);
    if (ok.empty()) continue;
    std::vector<BatteryRun> group;
    for (std::size_t i : ok) group.push_back(std::move(runs[i]));
    const PowerPoint pt = summarize_power(group);
    table.add_row({double(pt.n_sites), pt.p_star, pt.p_star_error, pt.tau_star});
    points.push_back(pt);
    ns.push_back(pt.n_sites);
    ps.push_back(pt.p_star);
    ps_mta.push_back(pt.p_star_max_then_avg);
  }
  table.add_footer("variant=" + c.variant + " optimal power = max over tau of the disorder-averaged power");
  for (const auto& pt : points)
    table.add_footer("N=" + std::to_string(pt.n_sites) + " E_tau_star=" + format_double(pt.energy_at_tau_star) +
                     " E_plateau=" + format_double(pt.energy_plateau) +
                     " P_star_max_then_average=" + format_double(pt.p_star_max_then_avg) +
                     " realizations=" + std::to_string(pt.realizations));
  if (ns.size() >= 3) {
    const auto fit = power_law_fit(ns, ps);
    const auto alt = power_law_fit(ns, ps_mta);
    table.add_footer("slope=" + format_double(fit.slope) + " stderr=" + format_double(fit.slope_stderr));
    table.add_footer("slope_max_then_average=" + format_double(alt.slope) +
                     " stderr=" + format_double(alt.slope_stderr));
    ctx.note("slope", {{"value", fit.slope}, {"stderr", fit.slope_stderr}});
  }
  ctx.write(fs::path(c.output) / "power_scaling.csv", table);
}

void run_gap_scaling(RunContext& ctx) {
  const RunConfig& c = ctx.config();
  const Items items{c};
  std::vector<std::optional<double>> gaps(items.count());
  auto status = ctx.tasks(
      items.count(),
      [&](int i) {
        const int n = items.n(i);
        const auto basis = fock::Basis::sector(n, n / 2);
        gaps[i] = spectral_gap(diagonalize(model_hamiltonian(c, n, items.r(i), basis), false).values);
      },
      [&](int i) { return realization_label(items.n(i), items.r(i)); });

  CsvTable table({"N", "mean_gap", "stderr", "n_kept"});
  std::vector<double> ns, lg;
  std::string degenerate;
  for (std::size_t s = 0; s < c.sizes.size(); ++s) {
    const int n = c.sizes[s];
    std::vector<double> kept;
    int deg = 0;
    for (std::size_t i : ok_indices(status, s * c.realizations, c.realizations)) {
      if (gaps[i]) kept.push_back(*gaps[i]);
      else ++deg;
    }
    const auto m = stats::mean_stderr(kept);
    table.add_row({double(n), m.mean, m.error, double(kept.size())});
    degenerate += (degenerate.empty() ? "" : " ") + ("N" + std::to_string(n) + ":" + std::to_string(deg));
    if (!kept.empty() && m.mean > 0) {
      ns.push_back(n);
      lg.push_back(std::log(m.mean));
    }
  }
  table.add_footer("degenerate_excluded " + degenerate);
  if (ns.size() >= 2) {
    const auto fit = stats::fit_line(ns, lg);
    table.add_footer("slope_lnGap_vs_N=" + format_double(fit.slope) + " stderr=" + format_double(fit.slope_stderr));
    ctx.note("slope", {{"value", fit.slope}, {"stderr", fit.slope_stderr}});
  }
  ctx.write(fs::path(c.output) / "gap.csv", table);
}

}  // namespace

RunReport run_experiment(const RunConfig& config) {
  config.validate();
  RunContext ctx(config);
  try {
    switch (config.experiment) {
      case Experiment::spectrum: run_spectrum(ctx); break;
      case Experiment::entropy: run_entropy(ctx); break;
      case Experiment::see: run_see(ctx); break;
      case Experiment::green: run_green(ctx); break;
      case Experiment::sd: run_sd(ctx); break;
      case Experiment::otoc: run_otoc(ctx); break;
      case Experiment::battery: run_battery(ctx); break;
      case Experiment::dicke: run_dicke(ctx); break;
      case Experiment::power_scaling: run_power_scaling(ctx); break;
      case Experiment::gap_scaling: run_gap_scaling(ctx); break;
    }
  } catch (const std::exception& e) {
    ctx.fail(e.what());
    throw;
  }
  RunReport report = ctx.finish();
  // Nothing succeeded: surface the underlying error class (config, resource,
  // convergence) instead of a generic partial failure.
  const bool any_ok = std::any_of(report.tasks.begin(), report.tasks.end(),
                                  [](const TaskStatus& t) { return t.ok; });
  if (!any_ok && !report.tasks.empty() && report.tasks.front().exception)
    std::rethrow_exception(report.tasks.front().exception);
  return report;
}

RunReport run_figure(const std::string& name, const std::map<std::string, std::string>& overrides) {
  const auto runs = figure_preset(name);
  RunReport total;
  const std::string base = overrides.contains("output") ? overrides.at("output") : RunConfig{}.output;
  for (const auto& preset : runs) {
    std::map<std::string, std::string> entries = preset;
    for (const auto& [k, v] : overrides)
      if (k != "experiment" && k != "figure") entries[k] = v;
    entries["output"] = (fs::path(base) / name / preset.at("experiment")).string();
    RunConfig cfg = parse_config(entries);
    cfg.figure = name;
    RunReport r = run_experiment(cfg);
    total.exit_code = std::max(total.exit_code, r.exit_code);
    total.artifacts.insert(total.artifacts.end(), r.artifacts.begin(), r.artifacts.end());
    total.tasks.insert(total.tasks.end(), r.tasks.begin(), r.tasks.end());
    total.summary += (total.summary.empty() ? "" : "\n") + r.summary;
  }
  return total;
}

}  // namespace syk
