#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "forestmap/error.hpp"
#include "forestmap/rng.hpp"
#include "forestmap/standardize.hpp"

namespace forestmap {

struct SvmParams {
  double C = 1.0;
  int max_epochs = 1000;
  double tol = 1e-4;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(C > 0) || max_epochs < 1 || !(tol > 0)) {
      throw Error(Errc::InvalidArgument, "SVM parameters out of range");
    }
  }
};

/// Linear decision function w . scale(x) + b over raw feature vectors.
template <typename Scalar>
struct SvmModel {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector w;
  Scalar b = 0;
  Scaler<Scalar> scaler;
  std::vector<std::string> feature_names;

  Eigen::Index features() const noexcept { return w.size(); }
};

/// Per-epoch record of a training run.
struct SvmTrace {
  std::vector<double> dual_objective;
  std::vector<double> gradient_range;
  int epochs = 0;
  bool converged = false;
};

/// Dual coordinate descent for the L1-loss (hinge) linear SVM
///
///   min_w  1/2 |w|^2 + C sum_i max(0, 1 - y_i w . [x_i, 1])
///
/// The bias is the last coordinate of w against a constant feature of 1, so
/// it is regularized along with the weights. Coordinates are visited in a
/// fresh seeded permutation each epoch; training stops once the projected
/// gradient spans less than `tol` over an epoch.
///
/// `rows` must already be standardized with `scaler`; labels are -1 or +1.
template <typename Derived>
SvmModel<typename Derived::Scalar> train_svm(const Eigen::MatrixBase<Derived>& rows,
                                             std::span<const int> labels, const SvmParams& params,
                                             Scaler<typename Derived::Scalar> scaler,
                                             std::vector<std::string> feature_names,
                                             SvmTrace* trace = nullptr) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  params.validate();
  const Eigen::Index l = rows.rows(), d = rows.cols();
  if (static_cast<Eigen::Index>(labels.size()) != l) {
    throw Error(Errc::DimensionMismatch, "label count differs from row count");
  }
  if (scaler.size() != d || static_cast<Eigen::Index>(feature_names.size()) != d) {
    throw Error(Errc::DimensionMismatch, "scaler or feature names do not match feature count");
  }
  if (!rows.allFinite()) throw Error(Errc::NonFiniteFeature, "training features must be finite");
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y != 1 && y != -1) throw Error(Errc::InvalidArgument, "labels must be -1 or +1");
    (y > 0 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw Error(Errc::SingleClassTraining, "training needs both classes");

  const Scalar C = static_cast<Scalar>(params.C);
  Vector alpha = Vector::Zero(l);
  Vector w = Vector::Zero(d);
  Scalar b = 0;
  Vector q_diag = rows.rowwise().squaredNorm().array() + Scalar(1);
  std::vector<Eigen::Index> order(l);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  SplitMix64 rng = SplitMix64::stream(params.seed, 0x5356'4D00);  // "SVM"

  SvmTrace local;
  SvmTrace& t = trace ? *trace : local;
  t = SvmTrace{};
  for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
    shuffle(std::span(order), rng);
    Scalar pg_max = -std::numeric_limits<Scalar>::infinity();
    Scalar pg_min = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i : order) {
      const Scalar y = static_cast<Scalar>(labels[i]);
      const Scalar g = y * (rows.row(i).dot(w) + b) - Scalar(1);
      Scalar pg = g;
      if (alpha[i] == 0) {
        pg = std::min(g, Scalar(0));
      } else if (alpha[i] == C) {
        pg = std::max(g, Scalar(0));
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) > Scalar(1e-12)) {
        const Scalar old = alpha[i];
        alpha[i] = std::clamp(old - g / q_diag[i], Scalar(0), C);
        const Scalar step = (alpha[i] - old) * y;
        w += step * rows.row(i).transpose();
        b += step;
      }
    }
    ++t.epochs;
    t.dual_objective.push_back(static_cast<double>(alpha.sum() - Scalar(0.5) * (w.squaredNorm() + b * b)));
    t.gradient_range.push_back(static_cast<double>(pg_max - pg_min));
    if (pg_max - pg_min < static_cast<Scalar>(params.tol)) {
      t.converged = true;
      break;
    }
  }
  return SvmModel<Scalar>{std::move(w), b, std::move(scaler), std::move(feature_names)};
}

/// Standardizes raw rows with a freshly fitted scaler, then trains.
template <typename Derived>
SvmModel<typename Derived::Scalar> fit_svm(const Eigen::MatrixBase<Derived>& raw_rows,
                                           std::span<const int> labels, const SvmParams& params,
                                           std::vector<std::string> feature_names,
                                           SvmTrace* trace = nullptr) {
  auto scaler = fit_scaler(raw_rows);
  const auto scaled = scaler.apply(raw_rows);
  return train_svm(scaled, labels, params, std::move(scaler), std::move(feature_names), trace);
}

template <typename Scalar, typename Derived>
Scalar decision_value(const SvmModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != model.features()) throw Error(Errc::DimensionMismatch, "feature vector length");
  return model.w.dot(model.scaler.apply_row(x)) + model.b;
}

/// One decision value per row of raw features.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> decision_values(const SvmModel<Scalar>& model,
                                                         const Eigen::MatrixBase<Derived>& rows) {
  if (rows.cols() != model.features()) throw Error(Errc::DimensionMismatch, "feature matrix width");
  return (model.scaler.apply(rows) * model.w).array() + model.b;
}

/// Zero counts as the positive (forest) class.
template <typename Scalar>
constexpr int label_of(Scalar decision) noexcept {
  return decision >= Scalar(0) ? 1 : -1;
}

template <typename Scalar, typename Derived>
int predict(const SvmModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  return label_of(decision_value(model, x));
}

/// Versioned plain-text model: one "key values..." line per field, numbers in
/// shortest round-trip form.
void write_model(const SvmModel<double>& model, std::ostream& out);
SvmModel<double> read_model(std::istream& in);

}  // namespace forestmap
