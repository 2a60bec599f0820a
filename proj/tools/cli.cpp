#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "atomic_file.hpp"
#include "bmikit/analysis.hpp"
#include "bmikit/cooccur.hpp"
#include "bmikit/corpus.hpp"
#include "bmikit/errors.hpp"
#include "bmikit/format.hpp"
#include "bmikit/lexdiv.hpp"
#include "bmikit/loss.hpp"
#include "bmikit/scoring.hpp"
#include "bmikit/toy_model.hpp"
#include "bmikit/weights.hpp"

namespace bmikit::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Default {
  const char* name;
  const char* value;
  bool from_paper;
  const char* note;
};

// clang-format off
constexpr Default kDefaults[] = {
    {"bmi.threshold",          "0.4",   true,  "weights of tokens with BMI below this are zeroed"},
    {"bmi.scale",              "0.15",  true,  "S, best En-De setting"},
    {"bmi.base",               "0.8",   true,  "B, best En-De setting"},
    {"preset.en-de",           "S=0.15,B=0.8", true, "best En-De (S, B)"},
    {"preset.zh-en",           "S=0.1,B=1.0",  true, "best Zh-En (S, B)"},
    {"bmi.log_base",           "e",     false, "PMI in nats"},
    {"bmi.zero_policy",        "skip",  false, "f(x,y)=0 summands contribute 0"},
    {"bmi.source_dedup",       "true",  false, "repeated source tokens summed once"},
    {"exp.amplitude",          "1.0",   false, "A, not given for the baseline"},
    {"exp.decay",              "1e-05", false, "T, not given for the baseline"},
    {"chi2.amplitude",         "1.0",   false, "A, not given for the baseline"},
    {"chi2.decay",             "1e-05", false, "T, not given for the baseline"},
    {"loss.label_smoothing",   "0.1",   true,  "uniform label smoothing epsilon"},
    {"bucket.k",               "3",     true,  "LOW / MIDDLE / HIGH split"},
    {"mattr.window",           "50",    false, "conventional window"},
    {"hdd.sample_size",        "42",    false, "canonical HD-D sample size"},
    {"mtld.ttr_threshold",     "0.72",  false, "canonical MTLD factor threshold"},
    {"stats.max_sentence_length", "1024", false, "longer lines are rejected"},
    {"loss_check.step",        "1e-05", false, "central-difference step"},
    {"loss_check.tolerance",   "1e-05", false, "max relative error"},
    {"toy_train.phase_split",  "0.5",   true,  "plain cross-entropy first, then weighted (equal halves)"},
    {"toy_train.smoothing",    "0.0",   false, "desk-scale trainer runs unsmoothed"},
    {"toy_train.learning_rate","1.0",   false, "SGD step size"},
    {"threads",                "0",     false, "0 = hardware concurrency"},
};
// clang-format on

// Sends output to `path` atomically, or to stdout when no path is given.
template <typename Fn>
void write_output(const std::optional<std::string>& path, Fn&& fn) {
  if (!path) {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  AtomicFile file(*path);
  fn(file.stream());
  file.commit();
}

struct CorpusArgs {
  std::string src;
  std::string tgt;
  void add_to(CLI::App* cmd) {
    cmd->add_option("--src", src, "Source-side text, one sentence per line")->required()->check(CLI::ExistingFile);
    cmd->add_option("--tgt", tgt, "Target-side text, aligned with --src")->required()->check(CLI::ExistingFile);
  }
};

struct ScoringArgs {
  bool per_occurrence = false;
  std::optional<double> zero_floor;
  void add_to(CLI::App* cmd) {
    cmd->add_flag("--per-occurrence", per_occurrence, "Sum repeated source tokens once per occurrence");
    cmd->add_option("--zero-floor", zero_floor, "Contribute this value (instead of 0) for unseen pairs");
  }
  ScoringOptions options() const {
    ScoringOptions opts;
    opts.deduplicate_source = !per_occurrence;
    if (zero_floor) {
      opts.zero_policy = ZeroPolicy::floor;
      opts.floor_value = *zero_floor;
    }
    return opts;
  }
};

// Loads the corpus and re-expresses the stats over its vocabularies.
std::pair<ParallelCorpus, CooccurStats> load_scoring_inputs(const std::string& stats_path, const CorpusArgs& corpus) {
  auto parallel = load_parallel_corpus(corpus.src, corpus.tgt);
  auto stats = read_stats(std::filesystem::path(stats_path));
  auto aligned = rebase(stats, parallel.source_vocab_ptr(), parallel.target_vocab_ptr());
  return {std::move(parallel), std::move(aligned)};
}

LossBatch random_logit_batch(std::mt19937_64& rng, std::size_t max_positions, std::size_t max_classes,
                             double epsilon) {
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const std::size_t m = 1 + rng() % max_positions;
  const std::size_t v = 2 + rng() % (max_classes - 1);
  LossBatch batch;
  batch.rows.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(v));
  for (Eigen::Index i = 0; i < batch.rows.size(); ++i) batch.rows.data()[i] = 6.0 * uniform() - 3.0;
  for (std::size_t j = 0; j < m; ++j) {
    batch.gold.push_back(static_cast<TokenId>(rng() % v));
    batch.weights.push_back(2.0 * uniform());
  }
  batch.epsilon = epsilon;
  return batch;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Bilingual mutual information statistics and token weights for MT training", "bmikit"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  std::function<void()> action;

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Count document and co-occurrence frequencies");
  CorpusArgs stats_corpus;
  stats_corpus.add_to(stats_cmd);
  std::string stats_out;
  std::size_t max_len = 1024;
  stats_cmd->add_option("--out", stats_out, "Stats file to write")->required();
  stats_cmd->add_option("--max-len", max_len, "Reject sentences longer than this")->check(CLI::PositiveNumber);
  stats_cmd->callback([&] {
    action = [&] {
      const auto corpus = load_parallel_corpus(stats_corpus.src, stats_corpus.tgt);
      BuildOptions options;
      options.threads = threads;
      options.max_sentence_length = max_len;
      const auto stats = build_stats(corpus, options);
      write_output(stats_out, [&](std::ostream& out) { write_stats(stats, out); });
      std::cerr << "pairs=" << stats.num_sentences() << " source_types=" << stats.source_entries()
                << " target_types=" << stats.target_entries() << " pair_entries=" << stats.pair_entries() << '\n';
    };
  });

  // weights
  auto* weights_cmd = app.add_subcommand("weights", "Write per-token training weights");
  CorpusArgs weights_corpus;
  weights_corpus.add_to(weights_cmd);
  ScoringArgs weights_scoring;
  weights_scoring.add_to(weights_cmd);
  std::string weights_stats, weights_out, schedule_name = "bmi";
  std::optional<std::string> preset;
  std::optional<double> scale, base;
  double threshold = 0.4, amplitude = 1.0, decay = 1e-5;
  weights_cmd->add_option("--stats", weights_stats, "Stats file from `stats`")->required()->check(CLI::ExistingFile);
  weights_cmd->add_option("--out", weights_out, "Weight file to write")->required();
  weights_cmd->add_option("--schedule", schedule_name, "bmi | exp | chi2")
      ->check(CLI::IsMember({"bmi", "exp", "chi2"}));
  weights_cmd->add_option("--preset", preset, "Published (S, B) setting: en-de | zh-en")
      ->check(CLI::IsMember({"en-de", "zh-en"}));
  weights_cmd->add_option("--scale", scale, "BMI scale S (default 0.15)");
  weights_cmd->add_option("--base", base, "BMI base B (default 0.8)");
  weights_cmd->add_option("--threshold", threshold, "Zero weights for BMI below this");
  weights_cmd->add_option("--amplitude", amplitude, "A for exp/chi2");
  weights_cmd->add_option("--decay", decay, "T for exp/chi2");
  weights_cmd->callback([&] {
    WeightSchedule schedule;
    if (schedule_name == "bmi") {
      BmiSchedule s;
      if (preset == "zh-en") {
        s.scale = 0.1;
        s.base = 1.0;
      }
      if (scale) s.scale = *scale;
      if (base) s.base = *base;
      s.threshold = threshold;
      schedule = s;
    } else if (schedule_name == "exp") {
      schedule = ExponentialSchedule{amplitude, decay};
    } else {
      schedule = ChiSquareSchedule{amplitude, decay};
    }
    action = [&, schedule] {
      validate(schedule);
      auto [corpus, stats] = load_scoring_inputs(weights_stats, weights_corpus);
      EmitOptions options;
      options.threads = threads;
      options.scoring = weights_scoring.options();
      EmitSummary summary;
      write_output(weights_out,
                   [&](std::ostream& out) { summary = emit_weights(stats, corpus, schedule, out, options); });
      std::cout << "schedule=" << describe(schedule) << '\n';
      print_summary(summary, std::cout);
    };
  });

  // score
  auto* score_cmd = app.add_subcommand("score", "Per-sentence BMI values");
  CorpusArgs score_corpus;
  score_corpus.add_to(score_cmd);
  ScoringArgs score_scoring;
  score_scoring.add_to(score_cmd);
  std::string score_stats;
  std::optional<std::string> score_out;
  score_cmd->add_option("--stats", score_stats, "Stats file from `stats`")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--out", score_out, "Output file (default stdout)");
  score_cmd->callback([&] {
    action = [&] {
      auto [corpus, stats] = load_scoring_inputs(score_stats, score_corpus);
      const auto options = score_scoring.options();
      write_output(score_out, [&](std::ostream& out) {
        std::string line;
        for (const auto& pair : corpus.pairs()) {
          const auto scored = score_sentence(stats, pair, options);
          line = "index=" + std::to_string(scored.index) + " avg=";
          append_fixed(line, scored.average);
          line += " bmi=";
          for (std::size_t j = 0; j < scored.values.size(); ++j) {
            if (j) line += ',';
            append_fixed(line, scored.values[j]);
          }
          line += '\n';
          out << line;
        }
      });
    };
  });

  // bucket
  auto* bucket_cmd = app.add_subcommand("bucket", "Split sentences into k equal buckets by average BMI");
  CorpusArgs bucket_corpus;
  bucket_corpus.add_to(bucket_cmd);
  std::string bucket_stats;
  std::optional<std::string> bucket_out;
  std::size_t k = 3;
  bucket_cmd->add_option("--stats", bucket_stats, "Stats file from `stats`")->required()->check(CLI::ExistingFile);
  bucket_cmd->add_option("--k", k, "Number of buckets");
  bucket_cmd->add_option("--out", bucket_out, "Output file (default stdout)");
  bucket_cmd->callback([&] {
    action = [&] {
      if (k < 2) throw ValidationError("--k must be >= 2");
      auto [corpus, stats] = load_scoring_inputs(bucket_stats, bucket_corpus);
      const auto buckets = bucket_by_avg_bmi(stats, corpus, k, {}, threads);
      write_output(bucket_out, [&](std::ostream& out) { write_buckets(buckets, out); });
      for (std::size_t b = 0; b < buckets.buckets.size(); ++b) {
        const auto& range = buckets.buckets[b];
        std::cerr << "bucket=" << b << " size=" << range.size << " min=" << format_fixed(range.min_score)
                  << " max=" << format_fixed(range.max_score) << '\n';
      }
    };
  });

  // report
  auto* report_cmd = app.add_subcommand("report", "Mapping report for a target token, or a frequency table");
  std::string report_stats, side_name = "target";
  std::optional<std::string> token;
  std::size_t top_k = 20;
  bool tsv = false;
  report_cmd->add_option("--stats", report_stats, "Stats file from `stats`")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--token", token, "Target token to report mappings for");
  report_cmd->add_option("--side", side_name, "Frequency table side: source | target")
      ->check(CLI::IsMember({"source", "target"}));
  report_cmd->add_option("--top-k", top_k, "Rows to show (0 = all)");
  report_cmd->add_flag("--tsv", tsv, "Tab-separated output");
  report_cmd->callback([&] {
    action = [&] {
      const auto stats = read_stats(std::filesystem::path(report_stats));
      if (token) {
        write_mapping_report(mapping_report(stats, *token, top_k), std::cout, tsv);
      } else {
        const Side side = side_name == "source" ? Side::source : Side::target;
        write_frequency_table(frequency_table(stats, side, top_k), std::cout, tsv);
      }
    };
  });

  // lexdiv
  auto* lexdiv_cmd = app.add_subcommand("lexdiv", "Lexical diversity of a tokenized text");
  std::string lexdiv_input, metric = "mtld";
  std::size_t window = 50, sample_size = 42;
  double ttr_threshold = 0.72;
  lexdiv_cmd->add_option("--input", lexdiv_input, "Tokenized text")->required()->check(CLI::ExistingFile);
  lexdiv_cmd->add_option("--metric", metric, "mattr | hdd | mtld")->check(CLI::IsMember({"mattr", "hdd", "mtld"}));
  lexdiv_cmd->add_option("--window", window, "MATTR window");
  lexdiv_cmd->add_option("--sample-size", sample_size, "HD-D sample size");
  lexdiv_cmd->add_option("--ttr-threshold", ttr_threshold, "MTLD factor threshold");
  lexdiv_cmd->callback([&] {
    action = [&] {
      if (metric == "mattr" && window < 1) throw ValidationError("--window must be >= 1");
      if (metric == "hdd" && sample_size < 1) throw ValidationError("--sample-size must be >= 1");
      if (metric == "mtld" && !(ttr_threshold > 0 && ttr_threshold < 1)) {
        throw ValidationError("--ttr-threshold must be in (0, 1)");
      }
      Vocab vocab;
      const auto stream = load_token_stream(lexdiv_input, vocab);
      DiversityReport report;
      report.metric = metric;
      report.tokens = stream.size();
      if (metric == "mattr") {
        report.value = mattr(stream, window);
        report.params = {{"window", std::to_string(window)}};
      } else if (metric == "hdd") {
        report.value = hdd(stream, sample_size);
        report.params = {{"sample_size", std::to_string(sample_size)}};
      } else {
        report.value = mtld(stream, ttr_threshold);
        std::ostringstream t;
        t << ttr_threshold;
        report.params = {{"ttr_threshold", t.str()}};
      }
      print_report(report, std::cout);
    };
  });

  // loss-check
  auto* check_cmd = app.add_subcommand("loss-check", "Finite-difference check of the weighted loss gradient");
  std::size_t batches = 100, max_positions = 4, max_classes = 8;
  std::uint64_t check_seed = 1;
  double step = 1e-5, epsilon = 0.1, tolerance = 1e-5;
  check_cmd->add_option("--batches", batches, "Random batches to check")->check(CLI::PositiveNumber);
  check_cmd->add_option("--seed", check_seed, "RNG seed");
  check_cmd->add_option("--step", step, "Central-difference step");
  check_cmd->add_option("--epsilon", epsilon, "Label smoothing");
  check_cmd->add_option("--max-positions", max_positions, "Max positions per batch")->check(CLI::PositiveNumber);
  check_cmd->add_option("--max-classes", max_classes, "Max classes per batch")->check(CLI::Range(2, 1 << 16));
  check_cmd->add_option("--tolerance", tolerance, "Fail above this max relative error");
  check_cmd->callback([&] {
    action = [&] {
      if (!(step > 0)) throw ValidationError("--step must be > 0");
      if (!(epsilon >= 0 && epsilon < 1)) throw ValidationError("--epsilon must be in [0, 1)");
      std::mt19937_64 rng(check_seed);
      double worst = 0.0;
      for (std::size_t b = 0; b < batches; ++b) {
        worst = std::max(worst, finite_diff_check(random_logit_batch(rng, max_positions, max_classes, epsilon), step));
      }
      const bool pass = worst <= tolerance;
      std::ostringstream w;
      w << worst;
      std::cout << "batches=" << batches << " h=" << step << " epsilon=" << epsilon << " max_relative_error=" << w.str()
                << " tolerance=" << tolerance << " status=" << (pass ? "pass" : "fail") << '\n';
      if (!pass) throw ValidationError("gradient check failed");
    };
  });

  // toy-train
  auto* train_cmd = app.add_subcommand("toy-train", "Two-phase training of a bag-of-tokens toy model");
  CorpusArgs train_corpus;
  train_corpus.add_to(train_cmd);
  std::string train_weights;
  std::optional<std::string> train_out;
  ToyTrainConfig config;
  train_cmd->add_option("--weights", train_weights, "Weight file aligned with the corpus")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--epochs", config.epochs, "Training epochs")->check(CLI::PositiveNumber);
  train_cmd->add_option("--phase-split", config.phase_split, "Fraction of epochs before weights apply");
  train_cmd->add_option("--lr", config.learning_rate, "Learning rate");
  train_cmd->add_option("--smoothing", config.epsilon, "Label smoothing epsilon");
  train_cmd->add_option("--seed", config.seed, "Initialization seed");
  train_cmd->add_option("--probe", config.probes, "Target token to track (repeatable)");
  train_cmd->add_option("--out", train_out, "Log file (default stdout)");
  train_cmd->callback([&] {
    action = [&] {
      if (!(config.phase_split >= 0 && config.phase_split <= 1)) throw ValidationError("--phase-split must be in [0, 1]");
      if (!(config.learning_rate >= 0)) throw ValidationError("--lr must be >= 0");
      if (!(config.epsilon >= 0 && config.epsilon < 1)) throw ValidationError("--smoothing must be in [0, 1)");
      const auto corpus = load_parallel_corpus(train_corpus.src, train_corpus.tgt);
      std::ifstream weights_in(train_weights, std::ios::binary);
      if (!weights_in) throw Error("cannot open " + train_weights);
      const auto weights = read_weights(weights_in, corpus);
      const auto log = train_toy_model(corpus, weights, config);
      write_output(train_out, [&](std::ostream& out) { write_training_log(log, out); });
    };
  });

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Report alignment problems in a parallel corpus");
  CorpusArgs validate_corpus;
  validate_corpus.add_to(validate_cmd);
  validate_cmd->callback([&] {
    action = [&] {
      const auto report = validate_alignment(validate_corpus.src, validate_corpus.tgt);
      std::cout << "pairs=" << report.pairs << " source_lines=" << report.source_lines
                << " target_lines=" << report.target_lines << " max_source_length=" << report.max_source_length
                << " max_target_length=" << report.max_target_length
                << " violations=" << report.violations.size() << '\n';
      for (const auto& v : report.violations) {
        std::cout << "violation kind=" << to_string(v.kind) << " side="
                  << (v.side == Side::source ? "source" : "target") << " line=" << v.line;
        if (!v.detail.empty()) std::cout << " detail=" << v.detail;
        std::cout << '\n';
      }
      if (!report.ok()) throw Error("corpus has " + std::to_string(report.violations.size()) + " violation(s)");
    };
  });

  // defaults
  auto* defaults_cmd = app.add_subcommand("defaults", "Print default parameters and where they come from");
  defaults_cmd->callback([&] {
    action = [] {
      for (const auto& d : kDefaults) {
        std::cout << d.name << '=' << d.value << " source=" << (d.from_paper ? "paper-given" : "artifact-chosen")
                  << " # " << d.note << '\n';
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e);
      return kExitOk;
    }
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace bmikit::cli
