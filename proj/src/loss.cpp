#include "bmikit/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bmikit/errors.hpp"

namespace bmikit {

namespace {

double smoothing_mass(const LossBatch& batch, std::size_t c, TokenId gold) {
  if (c == gold) return 1.0 - batch.epsilon;
  return batch.epsilon / static_cast<double>(batch.classes() - 1);
}

// log-softmax of one row, written into `out`.
void log_softmax_row(const Matrix& logits, Eigen::Index j, std::vector<double>& out) {
  const auto row = logits.row(j);
  const double top = row.maxCoeff();
  double sum = 0.0;
  for (Eigen::Index c = 0; c < row.size(); ++c) sum += std::exp(row[c] - top);
  const double log_norm = top + std::log(sum);
  out.resize(static_cast<std::size_t>(row.size()));
  for (Eigen::Index c = 0; c < row.size(); ++c) out[static_cast<std::size_t>(c)] = row[c] - log_norm;
}

// sum_c q_c * log p_c for position j, where log_p(c) gives log p_c. Classes
// with q_c = 0 are skipped so eps = 0 reduces to the gold term alone.
template <typename LogProb>
double expected_log_prob(const LossBatch& batch, std::size_t j, LogProb&& log_p) {
  const TokenId gold = batch.gold[j];
  if (batch.epsilon == 0.0) return log_p(gold);
  double acc = 0.0;
  for (std::size_t c = 0; c < batch.classes(); ++c) {
    const double q = smoothing_mass(batch, c, gold);
    if (q > 0.0) acc += q * log_p(c);
  }
  return acc;
}

}  // namespace

void validate(const LossBatch& batch, bool probability_rows) {
  const std::size_t m = batch.positions();
  if (m == 0) throw ValidationError("loss batch needs at least one position");
  if (static_cast<std::size_t>(batch.rows.rows()) != m || batch.weights.size() != m) {
    throw ValidationError("rows, gold ids and weights must have equal length");
  }
  if (batch.rows.cols() < 1) throw ValidationError("loss batch needs at least one class");
  if (!(batch.epsilon >= 0.0 && batch.epsilon < 1.0)) throw ValidationError("smoothing epsilon must be in [0, 1)");
  if (batch.epsilon > 0.0 && batch.classes() < 2) {
    throw ValidationError("label smoothing needs a vocabulary of at least 2 classes");
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (batch.gold[j] >= batch.classes()) throw ValidationError("gold id out of range at position " + std::to_string(j));
    if (!(batch.weights[j] >= 0.0) || !std::isfinite(batch.weights[j])) {
      throw ValidationError("weights must be finite and >= 0");
    }
  }
  if (!batch.rows.allFinite()) throw ValidationError("rows must be finite");
  if (probability_rows) {
    for (Eigen::Index j = 0; j < batch.rows.rows(); ++j) {
      if (batch.rows.row(j).minCoeff() < 0.0 || std::abs(batch.rows.row(j).sum() - 1.0) > 1e-9) {
        throw ValidationError("probability row " + std::to_string(j) + " is not a distribution");
      }
    }
  }
}

double cross_entropy(const LossBatch& batch) {
  validate(batch, true);
  const std::size_t m = batch.positions();
  double sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double p = batch.rows(static_cast<Eigen::Index>(j), batch.gold[j]);
    if (p == 0.0) throw InfiniteLossError("zero gold probability at position " + std::to_string(j));
    sum += std::log(p);
  }
  return -sum / static_cast<double>(m);
}

double weighted_cross_entropy(const LossBatch& batch) {
  validate(batch, true);
  const std::size_t m = batch.positions();
  double sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double w = batch.weights[j];
    if (w == 0.0) continue;
    const double p = batch.rows(static_cast<Eigen::Index>(j), batch.gold[j]);
    if (p == 0.0) throw InfiniteLossError("zero gold probability at position " + std::to_string(j));
    sum += w * std::log(p);
  }
  return -sum / static_cast<double>(m);
}

double smoothed_weighted_cross_entropy(const LossBatch& batch) {
  validate(batch, true);
  const std::size_t m = batch.positions();
  double sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double w = batch.weights[j];
    if (w == 0.0) continue;
    const auto row = static_cast<Eigen::Index>(j);
    const double expected = expected_log_prob(batch, j, [&](std::size_t c) {
      const double p = batch.rows(row, static_cast<Eigen::Index>(c));
      if (p == 0.0) throw InfiniteLossError("zero probability on a target class at position " + std::to_string(j));
      return std::log(p);
    });
    sum += w * expected;
  }
  return -sum / static_cast<double>(m);
}

double smoothed_weighted_cross_entropy_logits(const LossBatch& batch) {
  validate(batch, false);
  const std::size_t m = batch.positions();
  std::vector<double> log_p;
  double sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double w = batch.weights[j];
    if (w == 0.0) continue;
    log_softmax_row(batch.rows, static_cast<Eigen::Index>(j), log_p);
    sum += w * expected_log_prob(batch, j, [&](std::size_t c) { return log_p[c]; });
  }
  return -sum / static_cast<double>(m);
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.rows(); ++j) {
    const double top = logits.row(j).maxCoeff();
    out.row(j) = (logits.row(j).array() - top).exp();
    out.row(j) /= out.row(j).sum();
  }
  return out;
}

Matrix grad_logits(const LossBatch& batch) {
  validate(batch, false);
  const std::size_t m = batch.positions();
  Matrix grad = softmax_rows(batch.rows);
  for (std::size_t j = 0; j < m; ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    for (std::size_t c = 0; c < batch.classes(); ++c) {
      grad(row, static_cast<Eigen::Index>(c)) -= smoothing_mass(batch, c, batch.gold[j]);
    }
    grad.row(row) *= batch.weights[j] / static_cast<double>(m);
  }
  return grad;
}

double relative_error(double analytic, double numeric, double floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

double finite_diff_check(const std::function<double(const Matrix&)>& loss, const Matrix& point,
                         const Matrix& analytic, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("finite-difference step must be > 0");
  if (analytic.rows() != point.rows() || analytic.cols() != point.cols()) {
    throw ValidationError("gradient shape does not match the point");
  }
  Matrix probe = point;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < point.rows(); ++i) {
    for (Eigen::Index c = 0; c < point.cols(); ++c) {
      const double original = probe(i, c);
      probe(i, c) = original + h;
      const double up = loss(probe);
      probe(i, c) = original - h;
      const double down = loss(probe);
      probe(i, c) = original;
      const double numeric = (up - down) / (2.0 * h);
      worst = std::max(worst, relative_error(analytic(i, c), numeric));
    }
  }
  return worst;
}

double finite_diff_check(const LossBatch& logit_batch, double h) {
  const Matrix analytic = grad_logits(logit_batch);
  LossBatch probe = logit_batch;
  return finite_diff_check(
      [&probe](const Matrix& logits) {
        probe.rows = logits;
        return smoothed_weighted_cross_entropy_logits(probe);
      },
      logit_batch.rows, analytic, h);
}

}  // namespace bmikit
