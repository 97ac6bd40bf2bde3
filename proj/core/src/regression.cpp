#include "stream_al/regression.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "stream_al/errors.hpp"

namespace stream_al {

LinearModel fit(const LabeledDesign& d, bool intercept) {
  LinearModel m;
  m.ridge_lambda = d.ridge_lambda();
  const Matrix& ginv = d.gram_inv();
  if (!intercept) {
    m.coefficients = ginv * d.xty();
    return m;
  }

  // Block system [[G, s], [s^T, n]] [beta; c] = [X^T y; sum y].
  const Vector& s = d.column_sums();
  const Vector ginv_s = ginv * s;
  const Vector ginv_xty = ginv * d.xty();
  const double n = static_cast<double>(d.size());
  const double schur = n - dot(s, ginv_s);
  if (!(schur > 1e-12 * std::max(1.0, n))) {
    throw SingularityError("fit: constant column is collinear with the design",
                           std::numeric_limits<double>::infinity());
  }
  const double c = (d.label_sum() - dot(s, ginv_xty)) / schur;
  m.coefficients.resize(d.dimension());
  for (std::size_t i = 0; i < d.dimension(); ++i) m.coefficients[i] = ginv_xty[i] - c * ginv_s[i];
  m.intercept = c;
  return m;
}

double predict(const LinearModel& m, std::span<const double> x) {
  if (x.size() != m.coefficients.size()) {
    throw DimensionError("predict: model has " + std::to_string(m.coefficients.size()) +
                         " coefficients, point has " + std::to_string(x.size()));
  }
  return dot(m.coefficients, x) + m.intercept.value_or(0.0);
}

double rmse(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.size() != truths.size()) throw DimensionError("rmse: length mismatch");
  if (predictions.empty()) throw DimensionError("rmse: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - truths[i];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(predictions.size()));
}

double percent_rmse_diff(double rmse_al, double rmse_random) {
  if (!(rmse_random > 0.0)) throw DomainError("percent_rmse_diff: reference RMSE must be positive");
  return (rmse_al - rmse_random) / rmse_random * 100.0;
}

}  // namespace stream_al
