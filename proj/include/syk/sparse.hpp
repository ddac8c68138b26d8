#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "syk/fock.hpp"

namespace syk {

enum class BasisTag { sector, full_space, dicke };

/// Row-compressed complex Hermitian matrix.
class SparseHermitian {
 public:
  struct Entry {
    std::uint32_t col;
    cplx value;
  };

  SparseHermitian() = default;
  /// `rows[r]` holds the (unsorted, possibly duplicated) entries of row r.
  /// Duplicates are summed and magnitudes below 1e-15 dropped.
  SparseHermitian(std::vector<std::vector<Entry>> rows, BasisTag tag);

  Eigen::Index dim() const { return static_cast<Eigen::Index>(row_ptr_.empty() ? 0 : row_ptr_.size() - 1); }
  std::size_t nnz() const { return cols_.size(); }
  BasisTag tag() const { return tag_; }

  std::span<const std::uint32_t> row_cols(Eigen::Index r) const {
    return {cols_.data() + row_ptr_[r], cols_.data() + row_ptr_[r + 1]};
  }
  std::span<const cplx> row_values(Eigen::Index r) const {
    return {vals_.data() + row_ptr_[r], vals_.data() + row_ptr_[r + 1]};
  }

  /// y = H x, rows distributed over OpenMP threads.
  void apply(const cplx* x, cplx* y) const;
  /// Single-threaded reference for apply().
  void apply_serial(const cplx* x, cplx* y) const;
  Eigen::VectorXcd operator*(const Eigen::VectorXcd& x) const;

  Eigen::MatrixXcd to_dense() const;
  /// max |H_ab - conj(H_ba)| over stored entries.
  double hermiticity_error() const;
  /// max |H_ab| over stored entries.
  double max_abs() const;
  /// Gershgorin bound on the spectral radius.
  double norm_bound() const;

  cplx element(Eigen::Index r, Eigen::Index c) const;

 private:
  std::vector<std::int64_t> row_ptr_;
  std::vector<std::uint32_t> cols_;
  std::vector<cplx> vals_;
  BasisTag tag_ = BasisTag::sector;
};

SparseHermitian operator-(const SparseHermitian& a, const SparseHermitian& b);

}  // namespace syk
