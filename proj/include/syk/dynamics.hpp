#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "syk/krylov.hpp"
#include "syk/sparse.hpp"

namespace syk {

enum class Quadrature { x, p };

/// x = c + c†, p = i(c† - c) on the full 2^n space (Jordan-Wigner fermions).
SparseHermitian build_quadrature(int site, int n_sites, Quadrature kind);

struct OtocCurve {
  std::vector<double> t_grid;
  std::vector<cplx> f_t;        // Tr[W(t) V W(t) V] / dim
  std::vector<double> c_t;      // -Tr([W(t), V]^2) / dim
  std::vector<double> c_error;  // standard error, zero for the exact trace
  std::string w_label;
  std::string v_label;
  int samples = 0;  // random states used; 0 means exact trace
};

struct OtocOptions {
  int exact_max_sites = 10;
  int random_states = 20;
  std::uint64_t seed = 0;
};

/// Infinite-temperature OTOC of W = x_{w_site} and V = p_{v_site} under a
/// full-space Hamiltonian. Exact trace for n <= 10, random phase states above.
OtocCurve otoc(const SparseHermitian& h, int w_site, int v_site, std::span<const double> t_grid,
               double beta = 0.0, const OtocOptions& options = {});

}  // namespace syk
