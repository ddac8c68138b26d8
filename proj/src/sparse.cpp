#include "syk/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "syk/errors.hpp"

namespace syk {

SparseHermitian::SparseHermitian(std::vector<std::vector<Entry>> rows, BasisTag tag) : tag_(tag) {
  const std::size_t n = rows.size();
  row_ptr_.assign(n + 1, 0);
  // Merge duplicates in place, row by row, so rows can be released early.
  for (std::size_t r = 0; r < n; ++r) {
    auto& row = rows[r];
    std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
    std::size_t w = 0;
    for (std::size_t k = 0; k < row.size();) {
      Entry acc = row[k++];
      while (k < row.size() && row[k].col == acc.col) acc.value += row[k++].value;
      if (std::abs(acc.value) > 1e-15) row[w++] = acc;
    }
    row.resize(w);
    row_ptr_[r + 1] = row_ptr_[r] + static_cast<std::int64_t>(w);
  }
  cols_.resize(static_cast<std::size_t>(row_ptr_[n]));
  vals_.resize(cols_.size());
  for (std::size_t r = 0; r < n; ++r) {
    auto off = static_cast<std::size_t>(row_ptr_[r]);
    for (const Entry& e : rows[r]) {
      cols_[off] = e.col;
      vals_[off] = e.value;
      ++off;
    }
    std::vector<Entry>().swap(rows[r]);
  }
}

void SparseHermitian::apply(const cplx* x, cplx* y) const {
  const auto n = static_cast<std::int64_t>(dim());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t r = 0; r < n; ++r) {
    cplx acc = 0;
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += vals_[k] * x[cols_[k]];
    y[r] = acc;
  }
}

void SparseHermitian::apply_serial(const cplx* x, cplx* y) const {
  const auto n = static_cast<std::int64_t>(dim());
  for (std::int64_t r = 0; r < n; ++r) {
    cplx acc = 0;
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += vals_[k] * x[cols_[k]];
    y[r] = acc;
  }
}

Eigen::VectorXcd SparseHermitian::operator*(const Eigen::VectorXcd& x) const {
  if (x.size() != dim()) throw DomainError("SparseHermitian: dimension mismatch");
  Eigen::VectorXcd y(dim());
  apply(x.data(), y.data());
  return y;
}

Eigen::MatrixXcd SparseHermitian::to_dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim(), dim());
  for (Eigen::Index r = 0; r < dim(); ++r)
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) m(r, cols_[k]) = vals_[k];
  return m;
}

cplx SparseHermitian::element(Eigen::Index r, Eigen::Index c) const {
  const auto first = cols_.begin() + row_ptr_[r];
  const auto last = cols_.begin() + row_ptr_[r + 1];
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(c));
  if (it == last || *it != c) return {0.0, 0.0};
  return vals_[static_cast<std::size_t>(it - cols_.begin())];
}

double SparseHermitian::hermiticity_error() const {
  double err = 0.0;
  for (Eigen::Index r = 0; r < dim(); ++r)
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      err = std::max(err, std::abs(vals_[k] - std::conj(element(cols_[k], r))));
  return err;
}

double SparseHermitian::max_abs() const {
  double m = 0.0;
  for (const cplx& v : vals_) m = std::max(m, std::abs(v));
  return m;
}

double SparseHermitian::norm_bound() const {
  double m = 0.0;
  for (Eigen::Index r = 0; r < dim(); ++r) {
    double s = 0.0;
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += std::abs(vals_[k]);
    m = std::max(m, s);
  }
  return m;
}

SparseHermitian operator-(const SparseHermitian& a, const SparseHermitian& b) {
  if (a.dim() != b.dim()) throw DomainError("SparseHermitian: dimension mismatch");
  std::vector<std::vector<SparseHermitian::Entry>> rows(static_cast<std::size_t>(a.dim()));
  for (Eigen::Index r = 0; r < a.dim(); ++r) {
    auto& row = rows[static_cast<std::size_t>(r)];
    const auto ac = a.row_cols(r);
    const auto av = a.row_values(r);
    for (std::size_t k = 0; k < ac.size(); ++k) row.push_back({ac[k], av[k]});
    const auto bc = b.row_cols(r);
    const auto bv = b.row_values(r);
    for (std::size_t k = 0; k < bc.size(); ++k) row.push_back({bc[k], -bv[k]});
  }
  return SparseHermitian(std::move(rows), a.tag());
}

}  // namespace syk
