#include "bmikit/toy_model.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "bmikit/errors.hpp"
#include "bmikit/format.hpp"

namespace bmikit {

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Evaluation {
  double mean_loss = 0.0;
  std::vector<double> probe_loss;
};

Evaluation evaluate(const ToyModel& model, const ParallelCorpus& corpus, const std::vector<TokenId>& probes) {
  Evaluation eval;
  std::vector<double> probe_sum(probes.size(), 0.0);
  std::vector<std::size_t> probe_hits(probes.size(), 0);
  double total = 0.0;
  std::size_t tokens = 0;
  for (const auto& pair : corpus.pairs()) {
    const Eigen::VectorXd z = model.logits(model.features(pair));
    const double top = z.maxCoeff();
    const double log_norm = top + std::log((z.array() - top).exp().sum());
    for (TokenId y : pair.target) {
      const double loss = log_norm - z[y];
      total += loss;
      ++tokens;
      for (std::size_t p = 0; p < probes.size(); ++p) {
        if (probes[p] == y) {
          probe_sum[p] += loss;
          ++probe_hits[p];
        }
      }
    }
  }
  eval.mean_loss = total / static_cast<double>(tokens);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    eval.probe_loss.push_back(probe_sum[p] / static_cast<double>(probe_hits[p]));
  }
  return eval;
}

}  // namespace

ToyModel::ToyModel(std::size_t source_vocab, std::size_t target_vocab, std::uint64_t seed, double init_scale)
    : weights_(static_cast<Eigen::Index>(target_vocab), static_cast<Eigen::Index>(source_vocab)),
      bias_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(target_vocab))) {
  std::mt19937_64 rng(seed);
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    weights_.data()[i] = init_scale * (2.0 * unit_uniform(rng) - 1.0);
  }
}

Eigen::VectorXd ToyModel::features(const SentencePair& pair) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(weights_.cols());
  const double unit = 1.0 / static_cast<double>(pair.source.size());
  for (TokenId id : pair.source) x[id] += unit;
  return x;
}

Eigen::VectorXd ToyModel::logits(const Eigen::VectorXd& features) const { return weights_ * features + bias_; }

double ToyModel::step(const SentencePair& pair, const std::vector<double>& weights, double epsilon,
                      double learning_rate) {
  const Eigen::VectorXd x = features(pair);
  const Eigen::VectorXd z = logits(x);
  const auto m = static_cast<Eigen::Index>(pair.target.size());

  LossBatch batch;
  batch.rows = z.transpose().replicate(m, 1);
  batch.gold = pair.target;
  batch.weights = weights;
  batch.epsilon = epsilon;
  const double loss = smoothed_weighted_cross_entropy_logits(batch);

  // All positions share the logits, so their gradients add up.
  const Eigen::VectorXd g = grad_logits(batch).colwise().sum().transpose();
  for (Eigen::Index s = 0; s < x.size(); ++s) {
    if (x[s] != 0.0) weights_.col(s) -= learning_rate * x[s] * g;
  }
  bias_ -= learning_rate * g;
  return loss;
}

TrainingLog train_toy_model(const ParallelCorpus& corpus, const std::vector<std::vector<double>>& token_weights,
                            const ToyTrainConfig& config, ToyModel* final_model) {
  if (corpus.empty()) throw ValidationError("toy training needs a non-empty corpus");
  if (config.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (!(config.phase_split >= 0.0 && config.phase_split <= 1.0)) {
    throw ValidationError("phase split must be in [0, 1]");
  }
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
    throw ValidationError("learning rate must be finite and >= 0");
  }
  if (!(config.epsilon >= 0.0 && config.epsilon < 1.0)) throw ValidationError("smoothing epsilon must be in [0, 1)");
  if (token_weights.size() != corpus.size()) throw ValidationError("weights are not aligned with the corpus");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (token_weights[i].size() != corpus[i].target.size()) {
      throw ValidationError("weight row " + std::to_string(i + 1) + " does not match the target length");
    }
  }
  std::vector<TokenId> probes;
  for (const auto& token : config.probes) {
    auto id = corpus.target_vocab().find(token);
    if (!id) throw ValidationError("probe token '" + token + "' not in the target vocabulary");
    probes.push_back(*id);
  }

  ToyModel model(corpus.source_vocab().size(), corpus.target_vocab().size(), config.seed);
  const auto phase_one_epochs =
      static_cast<std::size_t>(std::floor(config.phase_split * static_cast<double>(config.epochs)));

  TrainingLog log;
  std::vector<double> uniform;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const int phase = epoch <= phase_one_epochs ? 1 : 2;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& pair = corpus[i];
      if (phase == 1) {
        uniform.assign(pair.target.size(), 1.0);
        model.step(pair, uniform, config.epsilon, config.learning_rate);
      } else {
        model.step(pair, token_weights[i], config.epsilon, config.learning_rate);
      }
      // Checked per step: the next step would reject non-finite logits.
      if (!model.finite()) throw DivergenceError(epoch);
    }

    const auto eval = evaluate(model, corpus, probes);
    if (!std::isfinite(eval.mean_loss)) throw DivergenceError(epoch);
    EpochRecord record;
    record.epoch = epoch;
    record.phase = phase;
    record.loss = eval.mean_loss;
    for (std::size_t p = 0; p < probes.size(); ++p) record.probes.emplace_back(config.probes[p], eval.probe_loss[p]);
    log.epochs.push_back(std::move(record));
  }
  if (final_model) *final_model = std::move(model);
  return log;
}

void write_training_log(const TrainingLog& log, std::ostream& out) {
  for (const auto& record : log.epochs) {
    out << "epoch=" << record.epoch << " loss=" << format_fixed(record.loss);
    for (const auto& [token, value] : record.probes) out << " probe:" << token << '=' << format_fixed(value);
    out << '\n';
  }
}

}  // namespace bmikit
