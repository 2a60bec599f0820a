#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "bmikit/corpus.hpp"
#include "bmikit/loss.hpp"

namespace bmikit {

// Single-layer bag-of-source-tokens -> target-unigram predictor. Every
// target position of a sentence shares the logits W * x + b, where x is the
// normalized source token count vector.
class ToyModel {
 public:
  ToyModel(std::size_t source_vocab, std::size_t target_vocab, std::uint64_t seed, double init_scale = 0.01);

  Eigen::VectorXd features(const SentencePair& pair) const;
  Eigen::VectorXd logits(const Eigen::VectorXd& features) const;
  // One gradient step on the sentence's (smoothed, weighted) objective.
  // Returns the objective value before the step.
  double step(const SentencePair& pair, const std::vector<double>& weights, double epsilon, double learning_rate);

  bool finite() const { return weights_.allFinite() && bias_.allFinite(); }
  const Matrix& weights() const { return weights_; }
  const Eigen::VectorXd& bias() const { return bias_; }

 private:
  Matrix weights_;  // target x source
  Eigen::VectorXd bias_;
};

struct ToyTrainConfig {
  std::size_t epochs = 50;
  // Fraction of epochs trained with uniform weights before switching to the
  // weight file.
  double phase_split = 0.5;
  double learning_rate = 1.0;
  double epsilon = 0.0;
  std::uint64_t seed = 1;
  std::vector<std::string> probes;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  int phase = 1;
  double loss = 0.0;  // mean unweighted token cross-entropy after the epoch
  std::vector<std::pair<std::string, double>> probes;
};

struct TrainingLog {
  std::vector<EpochRecord> epochs;
};

// Sentence-by-sentence gradient descent in corpus order. `token_weights` must
// be aligned with the corpus (see read_weights). Throws DivergenceError if
// parameters become non-finite, ValidationError for bad config or unknown
// probe tokens.
TrainingLog train_toy_model(const ParallelCorpus& corpus, const std::vector<std::vector<double>>& token_weights,
                            const ToyTrainConfig& config, ToyModel* final_model = nullptr);

// `epoch=<k> loss=<float> probe:<token>=<float>...` per line.
void write_training_log(const TrainingLog& log, std::ostream& out);

}  // namespace bmikit
