#include "efit/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <string>

namespace efit {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku, bool periodic)
    : n_(n), kl_(kl), ku_(ku), width_(kl + ku + 1), periodic_(periodic),
      data_(n * (kl + ku + 1), 0.0) {
  if (n == 0) throw std::invalid_argument("BandedMatrix: empty matrix");
  if (periodic && kl + ku >= n)
    throw std::invalid_argument("BandedMatrix: periodic band wider than the matrix");
}

std::optional<std::ptrdiff_t> BandedMatrix::offset(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) return std::nullopt;
  const auto kl = static_cast<std::ptrdiff_t>(kl_);
  const auto ku = static_cast<std::ptrdiff_t>(ku_);
  std::ptrdiff_t d = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i);
  if (d >= -kl && d <= ku) return d;
  if (!periodic_) return std::nullopt;
  const auto n = static_cast<std::ptrdiff_t>(n_);
  if (d > 0 && d - n >= -kl) return d - n;
  if (d < 0 && d + n <= ku) return d + n;
  return std::nullopt;
}

std::optional<std::size_t> BandedMatrix::column(std::size_t i, std::ptrdiff_t d) const {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + d;
  if (periodic_) {
    j %= n;
    if (j < 0) j += n;
  } else if (j < 0 || j >= n) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(j);
}

double BandedMatrix::operator()(std::size_t i, std::size_t j) const {
  const auto d = offset(i, j);
  return d ? data_[slot(i, *d)] : 0.0;
}

double& BandedMatrix::at(std::size_t i, std::size_t j) {
  const auto d = offset(i, j);
  if (!d)
    throw std::out_of_range("BandedMatrix: entry (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") outside the band");
  return data_[slot(i, *d)];
}

void BandedMatrix::scale_and_shift(double alpha, double beta) {
  for (double& v : data_) v *= alpha;
  for (std::size_t i = 0; i < n_; ++i) data_[slot(i, 0)] += beta;
}

std::vector<double> BandedMatrix::multiply(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("BandedMatrix::multiply: size mismatch");
  std::vector<double> y(n_, 0.0);
  const auto kl = static_cast<std::ptrdiff_t>(kl_);
  const auto ku = static_cast<std::ptrdiff_t>(ku_);
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t d = -kl; d <= ku; ++d)
      if (const auto j = column(i, d)) acc += data_[slot(i, d)] * x[*j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> BandedMatrix::to_dense() const {
  std::vector<double> dense(n_ * n_, 0.0);
  const auto kl = static_cast<std::ptrdiff_t>(kl_);
  const auto ku = static_cast<std::ptrdiff_t>(ku_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::ptrdiff_t d = -kl; d <= ku; ++d)
      if (const auto j = column(i, d)) dense[i * n_ + *j] += data_[slot(i, d)];
  return dense;
}

BandedLU::BandedLU(const BandedMatrix& matrix)
    : n_(matrix.size()),
      kl_(static_cast<int>(matrix.kl())),
      ku_(static_cast<int>(matrix.ku())) {
  border_ = matrix.periodic() ? std::max(matrix.kl(), matrix.ku()) : 0;
  core_ = n_ - border_;
  if (core_ == 0) throw std::invalid_argument("BandedLU: border consumes the matrix");

  const int ldab = 2 * kl_ + ku_ + 1;
  const auto core = static_cast<int>(core_);
  band_.assign(static_cast<std::size_t>(ldab) * core_, 0.0);
  for (int j = 0; j < core; ++j)
    for (int i = std::max(0, j - ku_); i <= std::min(core - 1, j + kl_); ++i)
      band_[static_cast<std::size_t>(j) * ldab + (kl_ + ku_ + i - j)] =
          matrix(static_cast<std::size_t>(i), static_cast<std::size_t>(j));

  pivots_.assign(core_, 0);
  const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, core, core, kl_, ku_,
                                         band_.data(), ldab, pivots_.data());
  if (info > 0)
    throw SingularMatrixError("BandedLU: zero pivot at row " + std::to_string(info));
  if (info < 0) throw std::invalid_argument("BandedLU: invalid dgbtrf argument");
  if (border_ == 0) return;

  // Bordered elimination for the periodic corners.
  const std::size_t w = border_;
  a21_.assign(w * core_, 0.0);
  coupling_.assign(core_ * w, 0.0);
  for (std::size_t r = 0; r < w; ++r)
    for (std::size_t j = 0; j < core_; ++j) a21_[r * core_ + j] = matrix(core_ + r, j);
  for (std::size_t c = 0; c < w; ++c)
    for (std::size_t i = 0; i < core_; ++i) coupling_[c * core_ + i] = matrix(i, core_ + c);
  const lapack_int solved = LAPACKE_dgbtrs(
      LAPACK_COL_MAJOR, 'N', core, kl_, ku_, static_cast<int>(w), band_.data(), ldab,
      pivots_.data(), coupling_.data(), core);
  if (solved != 0) throw std::runtime_error("BandedLU: dgbtrs failed");

  schur_.assign(w * w, 0.0);
  for (std::size_t r = 0; r < w; ++r)
    for (std::size_t c = 0; c < w; ++c) {
      double acc = matrix(core_ + r, core_ + c);
      for (std::size_t k = 0; k < core_; ++k)
        acc -= a21_[r * core_ + k] * coupling_[c * core_ + k];
      schur_[c * w + r] = acc;
    }
  schur_pivots_.assign(w, 0);
  const lapack_int sinfo = LAPACKE_dgetrf(LAPACK_COL_MAJOR, static_cast<int>(w),
                                          static_cast<int>(w), schur_.data(),
                                          static_cast<int>(w), schur_pivots_.data());
  if (sinfo > 0) throw SingularMatrixError("BandedLU: singular periodic border");
}

std::vector<double> BandedLU::solve_core(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  const int ldab = 2 * kl_ + ku_ + 1;
  const auto core = static_cast<int>(core_);
  const lapack_int info =
      LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', core, kl_, ku_, 1, band_.data(), ldab,
                     pivots_.data(), x.data(), core);
  if (info != 0) throw std::runtime_error("BandedLU: dgbtrs failed");
  return x;
}

std::vector<double> BandedLU::solve(std::span<const double> rhs) const {
  if (rhs.size() != n_) throw std::invalid_argument("BandedLU::solve: size mismatch");
  std::vector<double> y = solve_core(rhs.first(core_));
  if (border_ == 0) return y;

  const std::size_t w = border_;
  std::vector<double> x2(w);
  for (std::size_t r = 0; r < w; ++r) {
    double acc = rhs[core_ + r];
    for (std::size_t k = 0; k < core_; ++k) acc -= a21_[r * core_ + k] * y[k];
    x2[r] = acc;
  }
  const lapack_int info =
      LAPACKE_dgetrs(LAPACK_COL_MAJOR, 'N', static_cast<int>(w), 1, schur_.data(),
                     static_cast<int>(w), schur_pivots_.data(), x2.data(), static_cast<int>(w));
  if (info != 0) throw std::runtime_error("BandedLU: dgetrs failed");

  std::vector<double> x(n_);
  for (std::size_t i = 0; i < core_; ++i) {
    double acc = y[i];
    for (std::size_t c = 0; c < w; ++c) acc -= coupling_[c * core_ + i] * x2[c];
    x[i] = acc;
  }
  for (std::size_t r = 0; r < w; ++r) x[core_ + r] = x2[r];
  return x;
}

std::vector<double> banded_lu_solve(const BandedMatrix& matrix, std::span<const double> rhs) {
  return BandedLU(matrix).solve(rhs);
}

}  // namespace efit
