#include "bmikit/lexdiv.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "bmikit/errors.hpp"
#include "bmikit/format.hpp"

namespace bmikit {

namespace {

std::size_t id_bound(std::span<const TokenId> stream) {
  return stream.empty() ? 0 : static_cast<std::size_t>(*std::max_element(stream.begin(), stream.end())) + 1;
}

void require_nonempty(std::span<const TokenId> stream) {
  if (stream.empty()) throw ValidationError("diversity metrics need at least one token");
}

// Factor count for one direction.
template <typename It>
double mtld_factors(It first, It last, std::size_t bound, double threshold) {
  std::vector<std::uint32_t> seen(bound, 0);
  std::vector<TokenId> touched;
  double factors = 0.0;
  std::size_t types = 0;
  std::size_t count = 0;
  auto reset = [&] {
    for (TokenId t : touched) seen[t] = 0;
    touched.clear();
    types = 0;
    count = 0;
  };
  for (; first != last; ++first) {
    const TokenId t = *first;
    if (seen[t]++ == 0) {
      ++types;
      touched.push_back(t);
    }
    ++count;
    const double running = static_cast<double>(types) / static_cast<double>(count);
    if (running <= threshold) {
      factors += 1.0;
      reset();
    }
  }
  if (count > 0) {
    const double remaining = static_cast<double>(types) / static_cast<double>(count);
    factors += (1.0 - remaining) / (1.0 - threshold);
  }
  return factors;
}

}  // namespace

TokenStream read_token_stream(std::istream& in, Vocab& vocab) {
  TokenStream stream;
  std::string line;
  std::size_t number = 0;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto bad = find_invalid_utf8(line)) throw EncodingError(offset + *bad);
    offset += line.size() + 1;
    for (auto tok : split_tokens(line, number)) stream.push_back(vocab.intern(tok));
  }
  return stream;
}

TokenStream load_token_stream(const std::filesystem::path& path, Vocab& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_token_stream(in, vocab);
}

double ttr(std::span<const TokenId> stream) {
  require_nonempty(stream);
  std::vector<TokenId> distinct(stream.begin(), stream.end());
  std::sort(distinct.begin(), distinct.end());
  const auto types = static_cast<std::size_t>(std::unique(distinct.begin(), distinct.end()) - distinct.begin());
  return static_cast<double>(types) / static_cast<double>(stream.size());
}

double mattr(std::span<const TokenId> stream, std::size_t window) {
  require_nonempty(stream);
  if (window < 1) throw ValidationError("MATTR window must be >= 1");
  if (window > stream.size()) {
    throw ValidationError("MATTR window " + std::to_string(window) + " exceeds stream length " +
                          std::to_string(stream.size()));
  }
  std::vector<std::uint32_t> counts(id_bound(stream), 0);
  std::size_t types = 0;
  for (std::size_t i = 0; i < window; ++i) {
    if (counts[stream[i]]++ == 0) ++types;
  }
  // Integer total of per-window type counts, divided once at the end.
  std::uint64_t type_total = types;
  for (std::size_t i = window; i < stream.size(); ++i) {
    if (counts[stream[i]]++ == 0) ++types;
    if (--counts[stream[i - window]] == 0) --types;
    type_total += types;
  }
  const std::size_t windows = stream.size() - window + 1;
  return static_cast<double>(type_total) / (static_cast<double>(window) * static_cast<double>(windows));
}

double hdd(std::span<const TokenId> stream, std::size_t sample_size) {
  require_nonempty(stream);
  const std::size_t n_total = stream.size();
  if (sample_size < 1) throw ValidationError("HD-D sample size must be >= 1");
  if (sample_size > n_total) {
    throw ValidationError("HD-D sample size " + std::to_string(sample_size) + " exceeds stream length " +
                          std::to_string(n_total));
  }
  std::vector<std::uint32_t> counts(id_bound(stream), 0);
  for (TokenId t : stream) ++counts[t];
  std::map<std::uint32_t, std::size_t> types_by_frequency;
  for (auto c : counts) {
    if (c > 0) ++types_by_frequency[c];
  }

  // Sum over types of P(type drawn) = s - sum over types of
  // (E[draws of type] - P(type drawn)). The bracket is exactly zero for
  // types seen once, so all-unique text scores 1 without rounding.
  const double s = static_cast<double>(sample_size);
  const double total = static_cast<double>(n_total);
  double excess = 0.0;
  for (const auto& [freq, num_types] : types_by_frequency) {
    if (freq < 2) continue;
    // P(no draw) = C(N - n, s) / C(N, s) = prod_{i<n} (N - s - i) / (N - i)
    double p_absent = 0.0;
    if (n_total - sample_size >= freq) {
      p_absent = 1.0;
      for (std::uint32_t i = 0; i < freq; ++i) {
        p_absent *= (total - s - i) / (total - i);
      }
    }
    const double expected_draws = s * static_cast<double>(freq) / total;
    excess += static_cast<double>(num_types) * (expected_draws - (1.0 - p_absent));
  }
  return (s - excess) / s;
}

double mtld(std::span<const TokenId> stream, double ttr_threshold) {
  require_nonempty(stream);
  if (!(ttr_threshold > 0.0 && ttr_threshold < 1.0)) throw ValidationError("MTLD threshold must be in (0, 1)");
  const std::size_t bound = id_bound(stream);
  const double forward = mtld_factors(stream.begin(), stream.end(), bound, ttr_threshold);
  const double backward = mtld_factors(stream.rbegin(), stream.rend(), bound, ttr_threshold);
  if (forward == 0.0 || backward == 0.0) {
    throw UndefinedMetricError("MTLD undefined: no factor completes and the text never repeats a type");
  }
  const double n = static_cast<double>(stream.size());
  return (n / forward + n / backward) / 2.0;
}

void print_report(const DiversityReport& report, std::ostream& out) {
  out << "metric=" << report.metric << " value=" << format_fixed(report.value) << " params=";
  for (std::size_t i = 0; i < report.params.size(); ++i) {
    if (i) out << ',';
    out << report.params[i].first << ':' << report.params[i].second;
  }
  out << " N=" << report.tokens << '\n';
}

}  // namespace bmikit
