#pragma once

#include <optional>
#include <span>

#include "stream_al/design.hpp"
#include "stream_al/linalg.hpp"

namespace stream_al {

struct LinearModel {
  Vector coefficients;
  std::optional<double> intercept;
  double ridge_lambda = 0.0;
};

/// Least squares (or ridge, if the design carries lambda > 0) fit using the
/// design's cached Gram inverse. With `intercept` the constant column is added
/// here, via a Schur complement on the cached inverse; it is never stored in
/// the design and is not penalised by the ridge term.
LinearModel fit(const LabeledDesign& d, bool intercept = false);

double predict(const LinearModel& m, std::span<const double> x);

double rmse(std::span<const double> predictions, std::span<const double> truths);

/// (rmse_al - rmse_random) / rmse_random * 100. Negative means the active
/// learner has the lower error.
double percent_rmse_diff(double rmse_al, double rmse_random);

}  // namespace stream_al
