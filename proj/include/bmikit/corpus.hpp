#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bmikit {

using TokenId = std::uint32_t;

enum class Side { source, target };

// Dense token <-> id mapping. IDs are assigned in first-occurrence order
// starting at 0, so identical inputs always produce identical vocabularies.
class Vocab {
 public:
  // Returns the existing id for `token` or assigns the next one.
  // Throws ValidationError for an empty token.
  TokenId intern(std::string_view token);

  std::optional<TokenId> find(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // True when every id of `other` maps to the same token here.
  bool extends(const Vocab& other) const;

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.tokens_ == b.tokens_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> ids_;
  std::vector<std::string> tokens_;
};

struct SentencePair {
  std::size_t index = 0;
  std::vector<TokenId> source;
  std::vector<TokenId> target;
};

// Aligned source/target sentences plus the two vocabularies. Immutable once
// built; the vocabularies are shared so stats tables can reference them.
class ParallelCorpus {
 public:
  ParallelCorpus() = default;
  ParallelCorpus(std::shared_ptr<const Vocab> source_vocab,
                 std::shared_ptr<const Vocab> target_vocab,
                 std::vector<SentencePair> pairs);

  const Vocab& source_vocab() const { return *source_vocab_; }
  const Vocab& target_vocab() const { return *target_vocab_; }
  const std::shared_ptr<const Vocab>& source_vocab_ptr() const { return source_vocab_; }
  const std::shared_ptr<const Vocab>& target_vocab_ptr() const { return target_vocab_; }
  const Vocab& vocab(Side side) const {
    return side == Side::source ? *source_vocab_ : *target_vocab_;
  }

  const std::vector<SentencePair>& pairs() const { return pairs_; }
  const SentencePair& operator[](std::size_t i) const { return pairs_[i]; }
  // K, the number of sentence pairs.
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

 private:
  std::shared_ptr<const Vocab> source_vocab_ = std::make_shared<Vocab>();
  std::shared_ptr<const Vocab> target_vocab_ = std::make_shared<Vocab>();
  std::vector<SentencePair> pairs_;
};

// Incremental construction from raw text lines. Each line is normalized
// (trailing whitespace stripped, runs of spaces collapsed) and interned.
class CorpusBuilder {
 public:
  CorpusBuilder();

  // Line numbers in errors are index + 1 of the pair being added.
  void add(std::string_view source_line, std::string_view target_line);
  std::size_t size() const { return pairs_.size(); }
  ParallelCorpus finish() &&;

 private:
  std::shared_ptr<Vocab> source_vocab_;
  std::shared_ptr<Vocab> target_vocab_;
  std::vector<SentencePair> pairs_;
};

// Splits a line on ASCII spaces, dropping empty fields and trailing
// whitespace. Throws ParseError (with `line_number`) for tabs or other
// control whitespace inside a token.
std::vector<std::string_view> split_tokens(std::string_view line, std::size_t line_number);

// Returns the offset of the first invalid UTF-8 byte, if any.
std::optional<std::size_t> find_invalid_utf8(std::string_view bytes);

ParallelCorpus load_parallel_corpus(const std::filesystem::path& source_path,
                                    const std::filesystem::path& target_path);
ParallelCorpus read_parallel_corpus(std::istream& source, std::istream& target);

// Writes one side back out, one sentence per line, single-space joined.
void write_side(const ParallelCorpus& corpus, Side side, std::ostream& out);

struct AlignmentViolation {
  enum class Kind { count_mismatch, empty_line, invalid_utf8, bad_token };
  Kind kind;
  Side side = Side::source;
  std::size_t line = 0;  // 1-based; 0 for count mismatches
  std::string detail;
};

struct AlignmentReport {
  std::size_t source_lines = 0;
  std::size_t target_lines = 0;
  std::size_t pairs = 0;  // min(source_lines, target_lines)
  std::size_t max_source_length = 0;
  std::size_t max_target_length = 0;
  std::vector<AlignmentViolation> violations;

  bool ok() const { return violations.empty(); }
};

// Scans both files completely and collects every violation. Only I/O
// failures throw.
AlignmentReport validate_alignment(const std::filesystem::path& source_path,
                                   const std::filesystem::path& target_path);

std::string_view to_string(AlignmentViolation::Kind kind);

}  // namespace bmikit
