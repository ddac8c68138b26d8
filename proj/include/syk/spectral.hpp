#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "syk/couplings.hpp"
#include "syk/fock.hpp"
#include "syk/sparse.hpp"
#include "syk/stats.hpp"

namespace syk {

inline constexpr Eigen::Index kMaxDenseWithVectors = 13000;
inline constexpr Eigen::Index kMaxDenseValuesOnly = 16384;

struct EigenSystem {
  Eigen::VectorXd values;                 // ascending
  std::optional<Eigen::MatrixXcd> vectors;  // column k belongs to values[k]
  BasisTag tag = BasisTag::sector;

  bool has_vectors() const { return vectors.has_value(); }
};

/// Dense Hermitian solve. Throws ResourceError above the dense caps.
EigenSystem diagonalize(const SparseHermitian& h, bool want_vectors);

/// Mean ratio of consecutive level spacings over the central `fraction` of the spectrum.
double level_spacing_ratio(const Eigen::VectorXd& values, double fraction = 0.5);

/// One fixed-charge block of a grand-canonical spectrum.
struct SectorSpectrum {
  std::shared_ptr<const fock::Basis> basis;
  EigenSystem eig;
};

/// Per-sector spectra for Q = 0..N of a charge-conserving Hamiltonian.
struct GrandSpectrum {
  int n_sites = 0;
  std::vector<SectorSpectrum> sectors;

  Eigen::VectorXd all_values() const;
  double ground_energy() const;
  double max_abs_energy() const;
};

enum class SykVariant { standard, particle_hole };

GrandSpectrum grand_spectrum(const CouplingTensor& tensor, double mu, bool want_vectors,
                             SykVariant variant = SykVariant::standard);

struct GapResult {
  double mean = 0.0;
  double error = 0.0;  // standard error of the mean
  int kept = 0;
  int degenerate = 0;
};

/// E1 - E0 of the half-filled sector, averaged over the ensemble. Degenerate
/// ground states (gap < 1e-10 ||H||) are counted but left out of the mean.
GapResult ground_gap(const DisorderEnsemble& ensemble, int n_sites, double mu, double J = 1.0);

/// Gap of a single spectrum; nullopt when the ground state is degenerate.
std::optional<double> spectral_gap(const Eigen::VectorXd& values);

struct ThermoCurve {
  std::vector<double> temperatures;
  std::vector<double> free_energy_per_site;
  std::vector<double> entropy_per_site;
  std::vector<double> energy_per_site;
};

/// Canonical thermodynamics of a complete spectrum (all charge sectors, mu already included).
ThermoCurve thermodynamics(const Eigen::VectorXd& spectrum, int n_sites,
                           std::span<const double> temperatures);

/// -Tr rho ln rho in nats, 0 ln 0 := 0.
double von_neumann_entropy(const fock::DensityMatrix& rho);

/// Entanglement entropy of sites 0..n_a-1 of a full-space pure state.
double entanglement_entropy(const fock::PureState& state, int n_a);

/// Ground state(s) of a grand spectrum with vectors, within 1e-10 ||H|| of E0.
struct GroundManifold {
  double energy = 0.0;
  std::vector<fock::PureState> states;  // sector states
};
GroundManifold ground_manifold(const GrandSpectrum& spectrum);

/// Pole expansion of the retarded on-site Green's function.
struct LehmannPoles {
  std::vector<double> positions;
  std::vector<double> weights;
};

/// Zero temperature when temperature == 0 (degenerate ground states averaged);
/// full Lehmann sum otherwise (total dimension <= 2000).
LehmannPoles lehmann_poles(const GrandSpectrum& spectrum, int site, double temperature);

struct SpectralFunction {
  std::vector<double> omega_grid;
  Eigen::VectorXcd retarded_g;
  double eta = 0.0;
};

SpectralFunction broaden(const LehmannPoles& poles, std::span<const double> omega_grid,
                         double eta);

SpectralFunction greens_lehmann(const GrandSpectrum& spectrum, int site,
                                std::span<const double> omega_grid, double eta,
                                double temperature = 0.0);

/// 4 x mean spacing of the weighted poles closest to omega = 0.
double default_eta(const LehmannPoles& poles);

/// Trapezoid integral of -Im G / pi over the grid.
double spectral_weight(const SpectralFunction& g);

}  // namespace syk
