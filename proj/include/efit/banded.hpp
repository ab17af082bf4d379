#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace efit {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Square matrix whose nonzeros lie within kl sub- and ku super-diagonals.
///
/// With `periodic` set, the band wraps around: entry (i, j) is representable
/// when (j - i) mod n falls in [-kl, ku] cyclically. This covers stencils on
/// periodic grids, whose Jacobians carry corner blocks. Writes outside the
/// representable pattern throw std::out_of_range.
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku, bool periodic = false);

  std::size_t size() const { return n_; }
  std::size_t kl() const { return kl_; }
  std::size_t ku() const { return ku_; }
  bool periodic() const { return periodic_; }

  bool in_band(std::size_t i, std::size_t j) const { return offset(i, j).has_value(); }

  /// Zero outside the band.
  double operator()(std::size_t i, std::size_t j) const;
  /// Mutable access; throws std::out_of_range outside the band.
  double& at(std::size_t i, std::size_t j);

  /// Column index of the entry `d` places right of the diagonal in row i,
  /// or nothing if it falls off a non-periodic matrix.
  std::optional<std::size_t> column(std::size_t i, std::ptrdiff_t d) const;

  /// this <- alpha * this + beta * I
  void scale_and_shift(double alpha, double beta);

  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> to_dense() const;  // row-major n*n

 private:
  std::optional<std::ptrdiff_t> offset(std::size_t i, std::size_t j) const;
  std::size_t slot(std::size_t i, std::ptrdiff_t d) const {
    return i * width_ + static_cast<std::size_t>(d + static_cast<std::ptrdiff_t>(kl_));
  }

  std::size_t n_;
  std::size_t kl_;
  std::size_t ku_;
  std::size_t width_;
  bool periodic_;
  std::vector<double> data_;  // row i, diagonal offset d in [-kl, ku]
};

/// LU factorization of a (possibly periodic) banded matrix.
///
/// Plain bands go through LAPACK dgbtrf with partial pivoting. A periodic
/// matrix is split off its last w = max(kl, ku) unknowns: the leading block
/// is then strictly banded, and the w x w Schur complement of the border is
/// factored densely.
class BandedLU {
 public:
  explicit BandedLU(const BandedMatrix& matrix);

  std::size_t size() const { return n_; }
  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  std::vector<double> solve_core(std::span<const double> rhs) const;

  std::size_t n_ = 0;
  std::size_t core_ = 0;    // size of the banded leading block
  std::size_t border_ = 0;  // periodic border width (0 for plain bands)
  int kl_ = 0;
  int ku_ = 0;
  std::vector<double> band_;     // LAPACK band storage of the core block
  std::vector<int> pivots_;
  std::vector<double> a21_;      // border x core, row-major
  std::vector<double> coupling_; // core x border: core^{-1} * A12, column-major
  std::vector<double> schur_;    // border x border LU (column-major)
  std::vector<int> schur_pivots_;
};

/// One-shot convenience wrapper around BandedLU.
std::vector<double> banded_lu_solve(const BandedMatrix& matrix,
                                    std::span<const double> rhs);

}  // namespace efit
