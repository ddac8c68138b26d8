#include "syk/largen.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "syk/errors.hpp"

namespace syk {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

/// In-place DFT of length n; sign = FFTW_FORWARD (e^{-2 pi i jk/n}) or FFTW_BACKWARD.
void dft(Eigen::VectorXcd& data, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<Eigen::Index, int>, fftw_plan> plans;
  const auto n = data.size();
  fftw_plan plan;
  {
    std::lock_guard lock(mutex);
    auto it = plans.find({n, sign});
    if (it == plans.end()) {
      Eigen::VectorXcd scratch(n);
      auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
      plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
      plans.emplace(std::pair{n, sign}, plan);
    } else {
      plan = it->second;
    }
  }
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

/// Linear-interpolation weights: int_0^1 e^{i theta u}(1-u) du and int_0^1 e^{i theta u} u du.
std::pair<cplx, cplx> filon_weights(double theta) {
  if (std::abs(theta) < 0.1) {
    cplx a = 0, b = 0, term = 1.0;  // term = (i theta)^k / k!
    for (int k = 0; k < 12; ++k) {
      a += term / double((k + 1) * (k + 2));
      b += term / double(k + 2);
      term *= kI * theta / double(k + 1);
    }
    return {a, b};
  }
  const cplx e = std::exp(kI * theta);
  const cplx c = (e - 1.0) / (kI * theta);
  const cplx b = e / (kI * theta) + (e - 1.0) / (theta * theta);
  return {c - b, b};
}

double sum_inverse_omega_sq(double beta, int m) {
  double s = 0.0;
  for (int n = m - 1; n >= 0; --n) {
    const double w = (2 * n + 1) * kPi / beta;
    s += 2.0 / (w * w);
  }
  return s;
}

}  // namespace

namespace matsubara {

double free_g_tau(double tau, double beta, double mu) {
  return -1.0 / (std::exp(-mu * tau) + std::exp(mu * (beta - tau)));
}

Eigen::VectorXcd to_tau(const Eigen::VectorXcd& g_iw, double beta, double mu) {
  const Eigen::Index l = g_iw.size();
  const Eigen::Index m = l / 2;
  Eigen::VectorXcd buf(l);
  for (Eigen::Index p = 0; p < l; ++p) {
    const double w = (2.0 * double(p - m) + 1.0) * kPi / beta;
    buf[p] = g_iw[p] - 1.0 / cplx(mu, w);
  }
  dft(buf, FFTW_FORWARD);
  Eigen::VectorXcd out(l);
  for (Eigen::Index k = 0; k < l; ++k) {
    const double tau = beta * double(k) / double(l);
    const cplx twiddle = std::polar((k % 2 ? -1.0 : 1.0) / beta, -kPi * double(k) / double(l));
    out[k] = twiddle * buf[k] + free_g_tau(tau, beta, mu);
  }
  return out;
}

Eigen::VectorXcd to_frequency(const Eigen::VectorXcd& f, double beta) {
  const Eigen::Index l = f.size() - 1;
  const Eigen::Index m = l / 2;
  const double dt = beta / double(l);
  Eigen::VectorXcd buf(l);
  for (Eigen::Index j = 0; j < l; ++j)
    buf[j] = f[j] * std::polar(j % 2 ? -1.0 : 1.0, kPi * double(j) / double(l));
  dft(buf, FFTW_BACKWARD);
  Eigen::VectorXcd out(l);
  for (Eigen::Index p = 0; p < l; ++p) {
    const double theta = (2.0 * double(p - m) + 1.0) * kPi / double(l);
    const auto [a, b] = filon_weights(theta);
    const cplx back = b * std::exp(-kI * theta);
    // Full sum over j = 0..L includes e^{i L theta} f_L = -f_L.
    const cplx s = buf[p] - f[l];
    out[p] = dt * ((a + back) * s + a * f[l] - back * f[0]);
  }
  return out;
}

}  // namespace matsubara

void SdConfig::validate() const {
  if (!(mixing > 0.0 && mixing <= 1.0)) throw DomainError("SdConfig: mixing must lie in (0, 1]");
  if (!(tolerance > 0.0)) throw DomainError("SdConfig: tolerance must be > 0");
  if (max_iterations < 1) throw DomainError("SdConfig: max_iterations must be >= 1");
  if (grid_half_size != 0 && (grid_half_size < 256 || !std::has_single_bit(unsigned(grid_half_size))))
    throw DomainError("SdConfig: grid half-size must be a power of two >= 2^8");
}

int default_grid_size(double beta_j) {
  constexpr int base = 1 << 14;
  if (beta_j <= 200.0) return base;
  const double want = base * beta_j / 200.0;
  return static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::ceil(want))));
}

double MatsubaraGreen::omega(Eigen::Index index) const {
  return (2.0 * double(index - half_size) + 1.0) * kPi / beta;
}

double MatsubaraGreen::tau(Eigen::Index k) const { return beta * double(k) / (2.0 * half_size); }

namespace {

/// tau samples on the closed grid k = 0..L (last entry is beta-).
Eigen::VectorXcd closed_tau(const Eigen::VectorXcd& g_iw, double beta, double mu) {
  const Eigen::VectorXcd open = matsubara::to_tau(g_iw, beta, mu);
  const Eigen::Index l = open.size();
  Eigen::VectorXcd g(l + 1);
  g.head(l) = open;
  // G(beta-) = -G(0-) = -(G(0+) + 1)
  g[l] = -(open[0] + 1.0);
  return g;
}

Eigen::VectorXcd self_energy_tau(const Eigen::VectorXcd& g, double J) {
  const Eigen::Index l = g.size() - 1;
  Eigen::VectorXcd s(l + 1);
  // G(-tau) = -G(beta - tau)
  for (Eigen::Index k = 0; k <= l; ++k) s[k] = J * J * g[k] * g[k] * g[l - k];
  return s;
}

Eigen::VectorXcd free_g_iw(double beta, double mu, int m) {
  Eigen::VectorXcd g(2 * m);
  for (Eigen::Index p = 0; p < 2 * m; ++p)
    g[p] = 1.0 / cplx(mu, (2.0 * double(p - m) + 1.0) * kPi / beta);
  return g;
}

}  // namespace

MatsubaraGreen solve_sd(double J, double mu, double beta, const SdConfig& config,
                        const MatsubaraGreen* initial) {
  config.validate();
  if (!(beta > 0.0)) throw DomainError("solve_sd: beta must be > 0");
  if (beta * std::abs(J) > 1e4) throw DomainError("solve_sd: beta J above 1e4");
  const int m = config.grid_half_size ? config.grid_half_size : default_grid_size(beta * std::abs(J));
  const Eigen::Index l = 2 * m;

  MatsubaraGreen sol;
  sol.beta = beta;
  sol.mu = mu;
  sol.coupling = J;
  sol.half_size = m;

  const Eigen::VectorXcd g0 = free_g_iw(beta, mu, m);
  Eigen::VectorXcd g0_inv(l);
  for (Eigen::Index p = 0; p < l; ++p) g0_inv[p] = cplx(mu, sol.omega(p));
  Eigen::VectorXcd g = g0;
  if (initial != nullptr) {
    // Reuse the shape of G(tau/beta), then return to frequency space.
    const Eigen::Index li = initial->g_tau.size();
    Eigen::VectorXcd seed(l + 1);
    for (Eigen::Index k = 0; k <= l; ++k) {
      const double u = double(k) / double(l) * double(li);
      const auto k0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(u), li - 1);
      const double frac = u - double(k0);
      const cplx a = initial->g_tau[k0];
      const cplx b = k0 + 1 < li ? initial->g_tau[k0 + 1] : -(initial->g_tau[0] + 1.0);
      seed[k] = a + frac * (b - a);
    }
    seed[l] = -(seed[0] + 1.0);
    g = matsubara::to_frequency(seed, beta);
  }

  double alpha = config.mixing;
  Eigen::VectorXcd sigma_iw = Eigen::VectorXcd::Zero(l);
  for (int it = 1; it <= config.max_iterations; ++it) {
    const Eigen::VectorXcd gt = closed_tau(g, beta, mu);
    sigma_iw = matsubara::to_frequency(self_energy_tau(gt, J), beta);
    Eigen::VectorXcd g_new(l);
    for (Eigen::Index p = 0; p < l; ++p) g_new[p] = 1.0 / (g0_inv[p] - sigma_iw[p]);
    const double residual = (g_new - g).cwiseAbs().maxCoeff();
    if (!std::isfinite(residual))
      throw DivergenceError("solve_sd: non-finite update at iteration " + std::to_string(it) +
                            "; retry with a smaller mixing");
    sol.residual_history.push_back(residual);
    sol.iterations = it;
    if (residual < config.tolerance) {
      g = g_new;
      sol.converged = true;
      break;
    }
    const auto& h = sol.residual_history;
    if (config.adaptive_mixing && it > 10 && residual > h[h.size() - 2] && alpha > 1e-3) {
      alpha *= 0.5;
      ++sol.mixing_reductions;
    }
    g = alpha * g_new + (1.0 - alpha) * g;
  }
  if (!sol.converged)
    throw ConvergenceError("solve_sd: no convergence in " + std::to_string(config.max_iterations) +
                               " iterations (residual " +
                               std::to_string(sol.residual_history.back()) + ")",
                           sol.residual_history);

  const Eigen::VectorXcd gt = closed_tau(g, beta, mu);
  const Eigen::VectorXcd st = self_energy_tau(gt, J);
  sol.g_iw = g;
  sol.sigma_iw = matsubara::to_frequency(st, beta);
  sol.g_tau = gt.head(l);
  sol.sigma_tau = st.head(l);
  return sol;
}

double free_energy_largen(const MatsubaraGreen& sol) {
  if (!sol.converged) throw PreconditionError("free_energy_largen: solution not converged");
  const double beta = sol.beta, mu = sol.mu;
  const Eigen::Index l = sol.g_iw.size();
  // beta F0/N = -ln(1 + e^{beta mu})
  const double bm = beta * mu;
  const double beta_f0 = -(bm > 0 ? bm + std::log1p(std::exp(-bm)) : std::log1p(std::exp(bm)));
  double sum_re = 0.0, sum_im = 0.0;
  for (Eigen::Index p = 0; p < l; ++p) {
    const cplx g0 = 1.0 / cplx(mu, sol.omega(p));
    const cplx term = std::log(sol.g_iw[p] / g0) - 0.75 * sol.sigma_iw[p] * sol.g_iw[p];
    sum_re += term.real();
    sum_im += term.imag();
  }
  if (std::abs(sum_im) > 1e-8 * std::max(1.0, std::abs(sum_re)))
    throw DomainError("free_energy_largen: Matsubara sum not real (imag " +
                      std::to_string(sum_im) + ")");
  // Summand tail ~ (s1/4)/(i omega)^2 with s1 = -(Sigma(0+) + Sigma(beta-)).
  const Eigen::Index last = sol.sigma_tau.size();
  const Eigen::VectorXcd gt_closed = [&] {
    Eigen::VectorXcd g(last + 1);
    g.head(last) = sol.g_tau;
    g[last] = -(sol.g_tau[0] + 1.0);
    return g;
  }();
  const cplx sigma_end = sol.coupling * sol.coupling * gt_closed[last] * gt_closed[last] * gt_closed[0];
  const double s1 = -(sol.sigma_tau[0] + sigma_end).real();
  const double tail = -(s1 / 4.0) * (beta * beta / 4.0 - sum_inverse_omega_sq(beta, sol.half_size));
  return (beta_f0 + sum_re + tail) / beta;
}

ThermoCurve entropy_curve_largen(double J, double mu, std::span<const double> temperatures,
                                 const SdConfig& config) {
  const std::size_t n = temperatures.size();
  if (n < 3) throw DomainError("entropy_curve_largen: need at least 3 temperatures");
  for (std::size_t k = 0; k < n; ++k) {
    if (!(temperatures[k] > 0.0)) throw DomainError("entropy_curve_largen: temperatures must be > 0");
    if (k > 0 && !(temperatures[k] > temperatures[k - 1]))
      throw DomainError("entropy_curve_largen: temperatures must be strictly increasing");
  }
  ThermoCurve c;
  c.temperatures.assign(temperatures.begin(), temperatures.end());
  c.free_energy_per_site.resize(n);
  // Hot to cold, each solve seeded by the previous one.
  std::optional<MatsubaraGreen> prev;
  for (std::size_t k = n; k-- > 0;) {
    MatsubaraGreen s = solve_sd(J, mu, 1.0 / temperatures[k], config, prev ? &*prev : nullptr);
    c.free_energy_per_site[k] = free_energy_largen(s);
    prev = std::move(s);
  }
  c.entropy_per_site.resize(n);
  c.energy_per_site.resize(n);
  const auto& t = c.temperatures;
  const auto& f = c.free_energy_per_site;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 == n ? k : k + 1;
    c.entropy_per_site[k] = -(f[hi] - f[lo]) / (t[hi] - t[lo]);
    c.energy_per_site[k] = f[k] + t[k] * c.entropy_per_site[k];
  }
  return c;
}

}  // namespace syk
