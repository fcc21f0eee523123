#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

namespace tvrec {

/// Sparse real vector with strictly increasing indices.
class Embedding {
 public:
  Embedding() = default;
  /// Entries must have strictly increasing indices.
  Embedding(std::vector<std::uint32_t> indices, std::vector<double> values);

  std::size_t nonzeros() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  std::span<const std::uint32_t> indices() const { return indices_; }
  std::span<const double> values() const { return values_; }

  double norm() const;
  double dot(const Embedding& other) const;
  Embedding scaled(double factor) const;

  /// Arithmetic mean of the given vectors; empty input gives the zero vector.
  static Embedding mean(std::span<const Embedding* const> vectors);

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
};

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
};

/**
 * Default tokenizer over UTF-8 text. Runs of letters and digits form one
 * lowercased token; Han, Kana and Hangul characters are one token each;
 * everything else separates tokens. Invalid UTF-8 bytes are separators.
 */
class UnicodeTokenizer final : public Tokenizer {
 public:
  std::vector<std::string> tokenize(std::string_view text) const override;
};

/// Factory for the `tokenizer` config key. Only "unicode" is built in.
std::unique_ptr<Tokenizer> make_tokenizer(std::string_view name);

struct EncoderOptions {
  std::size_t min_df = 1;
  std::size_t max_vocab = 0;  // 0 = unlimited
  bool l2_normalize = true;
};

/**
 * tf-idf vocabulary. idf(t) = ln((1 + N) / (1 + df(t))) + 1 over the N
 * fitted documents. Token indices follow lexicographic token order.
 */
class Vocabulary {
 public:
  struct Term {
    std::string token;
    double idf;
    std::size_t df;
  };

  /// Throws DataError when the corpus is empty or contains no tokens.
  static Vocabulary fit(std::span<const std::string> corpus, const Tokenizer& tokenizer,
                        const EncoderOptions& options = {});

  std::size_t dimension() const { return terms_.size(); }
  std::size_t documents() const { return documents_; }
  const Term& term(std::uint32_t index) const { return terms_[index]; }
  std::optional<std::uint32_t> index_of(std::string_view token) const;
  double idf(std::string_view token) const;  // 0 for out-of-vocabulary tokens
  const EncoderOptions& options() const { return options_; }

  /// Raw-count tf times idf, out-of-vocabulary tokens ignored, optionally
  /// L2-normalized. Text without known tokens encodes to the zero vector.
  Embedding encode(std::string_view text, const Tokenizer& tokenizer) const;

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);

 private:
  std::vector<Term> terms_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t documents_ = 0;
  EncoderOptions options_;

  void rebuild_index();
};

}  // namespace tvrec
