#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <vector>

#include "bmikit/corpus.hpp"

namespace bmikit {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// m positions over a target vocabulary of size V. `rows` holds either
// probability rows (each a distribution) or logit rows, depending on the
// function the batch is passed to.
struct LossBatch {
  Matrix rows;
  std::vector<TokenId> gold;
  std::vector<double> weights;
  double epsilon = 0.0;

  std::size_t positions() const { return gold.size(); }
  std::size_t classes() const { return static_cast<std::size_t>(rows.cols()); }
};

// Shape, gold range, weight sign, and epsilon range. With
// `probability_rows`, each row must be non-negative and sum to 1 within 1e-9.
void validate(const LossBatch& batch, bool probability_rows);

// -(1/m) sum_j ln p_j[gold_j]; weights and epsilon are ignored.
double cross_entropy(const LossBatch& batch);

// -(1/m) sum_j w_j ln p_j[gold_j]; epsilon is ignored. A zero-weight term is
// 0 even when its gold probability is 0.
double weighted_cross_entropy(const LossBatch& batch);

// (1/m) sum_j w_j * H(q_j, p_j) with q_j = 1-eps on gold and eps/(V-1)
// elsewhere.
double smoothed_weighted_cross_entropy(const LossBatch& batch);

// Same objective with logit rows, evaluated through a stable log-softmax.
double smoothed_weighted_cross_entropy_logits(const LossBatch& batch);

// d loss / d logits: row j = (w_j/m) * (softmax(z_j) - q_j).
Matrix grad_logits(const LossBatch& batch);

Matrix softmax_rows(const Matrix& logits);

// |a - n| / max(|a|, |n|, floor); the floor keeps near-zero entries from
// dominating.
double relative_error(double analytic, double numeric, double floor = 1e-6);

// Central differences of `loss` at `point`, compared against `analytic`.
// Returns the max relative error. Throws ValidationError for h <= 0.
double finite_diff_check(const std::function<double(const Matrix&)>& loss, const Matrix& point,
                         const Matrix& analytic, double h);

// finite_diff_check of smoothed_weighted_cross_entropy_logits against
// grad_logits.
double finite_diff_check(const LossBatch& logit_batch, double h);

}  // namespace bmikit
