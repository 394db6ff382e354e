#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "forestmap/error.hpp"

namespace forestmap {

/// Per-column z-scoring learned from a training matrix. Columns whose
/// population standard deviation is below 1e-12 are flagged degenerate and
/// always map to zero.
template <typename Scalar>
struct Scaler {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector mean;
  Vector scale;
  std::vector<bool> degenerate;

  Eigen::Index size() const noexcept { return mean.size(); }

  static Scaler identity(Eigen::Index features) {
    return {Vector::Zero(features), Vector::Ones(features), std::vector<bool>(features, false)};
  }

  template <typename Derived>
  Matrix apply(const Eigen::MatrixBase<Derived>& rows) const {
    if (rows.cols() != size()) throw Error(Errc::DimensionMismatch, "scaler width mismatch");
    Matrix out = (rows.derived().template cast<Scalar>().rowwise() - mean.transpose()).array().rowwise() /
                 scale.transpose().array();
    for (Eigen::Index j = 0; j < size(); ++j) {
      if (degenerate[j]) out.col(j).setZero();
    }
    return out;
  }

  template <typename Derived>
  Vector apply_row(const Eigen::MatrixBase<Derived>& row) const {
    if (row.size() != size()) throw Error(Errc::DimensionMismatch, "scaler width mismatch");
    Vector out(size());
    for (Eigen::Index j = 0; j < size(); ++j) {
      out[j] = degenerate[j] ? Scalar(0) : (static_cast<Scalar>(row[j]) - mean[j]) / scale[j];
    }
    return out;
  }
};

template <typename Derived>
Scaler<typename Derived::Scalar> fit_scaler(const Eigen::MatrixBase<Derived>& rows) {
  using Scalar = typename Derived::Scalar;
  if (rows.rows() < 2) throw Error(Errc::TooFewRows, "standardization needs at least two rows");
  const auto n = static_cast<Scalar>(rows.rows());
  Scaler<Scalar> s;
  s.mean = rows.colwise().sum().transpose() / n;
  s.scale.resize(rows.cols());
  s.degenerate.assign(rows.cols(), false);
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const Scalar var = (rows.col(j).array() - s.mean[j]).square().sum() / n;
    const Scalar sd = std::sqrt(var);
    if (sd < Scalar(1e-12)) {
      s.degenerate[j] = true;
      s.scale[j] = Scalar(1);
    } else {
      s.scale[j] = sd;
    }
  }
  return s;
}

}  // namespace forestmap
