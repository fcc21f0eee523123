#include "tvrec/textenc.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tvrec/types.hpp"

namespace tvrec {

Embedding::Embedding(std::vector<std::uint32_t> indices, std::vector<double> values)
    : indices_(std::move(indices)), values_(std::move(values)) {
  if (indices_.size() != values_.size()) throw InvariantError("embedding size mismatch");
  for (std::size_t i = 1; i < indices_.size(); ++i) {
    if (indices_[i - 1] >= indices_[i]) throw InvariantError("embedding indices not increasing");
  }
}

double Embedding::norm() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return std::sqrt(sum);
}

double Embedding::dot(const Embedding& other) const {
  const Embedding* small = this;
  const Embedding* large = &other;
  if (small->nonzeros() > large->nonzeros()) std::swap(small, large);
  if (small->empty()) return 0.0;

  double sum = 0.0;
  if (small->nonzeros() * 8 < large->nonzeros()) {
    // Very unequal supports: probe the larger vector.
    auto first = large->indices_.begin();
    const auto last = large->indices_.end();
    for (std::size_t i = 0; i < small->nonzeros(); ++i) {
      first = std::lower_bound(first, last, small->indices_[i]);
      if (first == last) break;
      if (*first == small->indices_[i]) {
        sum += small->values_[i] * large->values_[static_cast<std::size_t>(first - large->indices_.begin())];
      }
    }
    return sum;
  }
  std::size_t i = 0, j = 0;
  while (i < indices_.size() && j < other.indices_.size()) {
    if (indices_[i] < other.indices_[j]) {
      ++i;
    } else if (indices_[i] > other.indices_[j]) {
      ++j;
    } else {
      sum += values_[i++] * other.values_[j++];
    }
  }
  return sum;
}

Embedding Embedding::scaled(double factor) const {
  Embedding out = *this;
  for (double& v : out.values_) v *= factor;
  return out;
}

Embedding Embedding::mean(std::span<const Embedding* const> vectors) {
  if (vectors.empty()) return {};
  std::map<std::uint32_t, double> acc;
  for (const Embedding* e : vectors) {
    for (std::size_t i = 0; i < e->nonzeros(); ++i) acc[e->indices_[i]] += e->values_[i];
  }
  Embedding out;
  out.indices_.reserve(acc.size());
  out.values_.reserve(acc.size());
  const double n = static_cast<double>(vectors.size());
  for (const auto& [idx, sum] : acc) {
    out.indices_.push_back(idx);
    out.values_.push_back(sum / n);
  }
  return out;
}

namespace {

// Decodes one code point; returns 0xFFFFFFFF for an invalid sequence.
char32_t next_code_point(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  int len = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    ++pos;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return 0xFFFFFFFF;
  }
  if (pos + len > s.size()) {
    ++pos;
    return 0xFFFFFFFF;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[pos + k]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFFFFFF;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_cjk(char32_t cp) {
  return (cp >= 0x3040 && cp <= 0x30FF) ||    // Hiragana, Katakana
         (cp >= 0x3400 && cp <= 0x4DBF) ||    // CJK extension A
         (cp >= 0x4E00 && cp <= 0x9FFF) ||    // CJK unified ideographs
         (cp >= 0xAC00 && cp <= 0xD7AF) ||    // Hangul syllables
         (cp >= 0xF900 && cp <= 0xFAFF) ||    // CJK compatibility ideographs
         (cp >= 0xFF66 && cp <= 0xFF9D) ||    // halfwidth Katakana
         (cp >= 0x20000 && cp <= 0x2FA1F);    // supplementary ideographs
}

// Letters and digits outside CJK that join into word runs, with simple case folding.
bool word_char(char32_t cp, char32_t& folded) {
  folded = cp;
  if (cp < 0x80) {
    if (cp >= 'A' && cp <= 'Z') {
      folded = cp + 32;
      return true;
    }
    return (cp >= 'a' && cp <= 'z') || (cp >= '0' && cp <= '9');
  }
  if (cp >= 0xFF10 && cp <= 0xFF19) {  // fullwidth digits
    folded = cp - 0xFF10 + '0';
    return true;
  }
  if (cp >= 0xFF21 && cp <= 0xFF3A) {  // fullwidth uppercase
    folded = cp - 0xFF21 + 'a';
    return true;
  }
  if (cp >= 0xFF41 && cp <= 0xFF5A) {
    folded = cp - 0xFF41 + 'a';
    return true;
  }
  if (cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7) {
    if (cp <= 0xDE) folded = cp + 0x20;
    return true;
  }
  if (cp >= 0x391 && cp <= 0x3C9) {  // Greek
    if (cp <= 0x3A9) folded = cp + 0x20;
    return true;
  }
  if (cp >= 0x400 && cp <= 0x44F) {  // Cyrillic
    if (cp <= 0x40F) {
      folded = cp + 0x50;
    } else if (cp <= 0x42F) {
      folded = cp + 0x20;
    }
    return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> UnicodeTokenizer::tokenize(std::string_view text) const {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = next_code_point(text, pos);
    char32_t folded = 0;
    if (cp == 0xFFFFFFFF) {
      flush();
    } else if (is_cjk(cp)) {
      flush();
      append_utf8(current, cp);
      flush();
    } else if (word_char(cp, folded)) {
      append_utf8(current, folded);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::unique_ptr<Tokenizer> make_tokenizer(std::string_view name) {
  if (name == "unicode") return std::make_unique<UnicodeTokenizer>();
  throw ConfigError("unknown tokenizer '" + std::string(name) + "'");
}

Vocabulary Vocabulary::fit(std::span<const std::string> corpus, const Tokenizer& tokenizer,
                           const EncoderOptions& options) {
  if (corpus.empty()) throw DataError("cannot fit a vocabulary on an empty corpus");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    auto tokens = tokenizer.tokenize(doc);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& t : tokens) ++df[std::move(t)];
  }
  if (df.empty()) throw DataError("corpus contains no tokens");

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [token, n] : df) {
    if (n >= options.min_df) kept.emplace_back(token, n);
  }
  if (options.max_vocab > 0 && kept.size() > options.max_vocab) {
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    kept.resize(options.max_vocab);
  }
  std::sort(kept.begin(), kept.end());

  Vocabulary v;
  v.documents_ = corpus.size();
  v.options_ = options;
  const double n = static_cast<double>(corpus.size());
  v.terms_.reserve(kept.size());
  for (auto& [token, d] : kept) {
    v.terms_.push_back({std::move(token), std::log((1.0 + n) / (1.0 + static_cast<double>(d))) + 1.0, d});
  }
  v.rebuild_index();
  return v;
}

void Vocabulary::rebuild_index() {
  index_.clear();
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    index_.emplace(terms_[i].token, static_cast<std::uint32_t>(i));
  }
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::idf(std::string_view token) const {
  auto i = index_of(token);
  return i ? terms_[*i].idf : 0.0;
}

Embedding Vocabulary::encode(std::string_view text, const Tokenizer& tokenizer) const {
  std::vector<std::uint32_t> ids;
  for (const auto& t : tokenizer.tokenize(text)) {
    if (auto i = index_of(t)) ids.push_back(*i);
  }
  std::sort(ids.begin(), ids.end());
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    indices.push_back(ids[i]);
    values.push_back(static_cast<double>(j - i) * terms_[ids[i]].idf);
    i = j;
  }
  Embedding e(std::move(indices), std::move(values));
  if (options_.l2_normalize && !e.empty()) {
    const double norm = e.norm();
    if (norm > 0.0) e = e.scaled(1.0 / norm);
  }
  return e;
}

nlohmann::json Vocabulary::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    terms.push_back({{"token", terms_[i].token}, {"index", i}, {"idf", terms_[i].idf},
                     {"df", terms_[i].df}});
  }
  return {{"documents", documents_},
          {"min_df", options_.min_df},
          {"max_vocab", options_.max_vocab},
          {"l2_normalize", options_.l2_normalize},
          {"terms", std::move(terms)}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  try {
    Vocabulary v;
    v.documents_ = j.at("documents").get<std::size_t>();
    v.options_.min_df = j.at("min_df").get<std::size_t>();
    v.options_.max_vocab = j.at("max_vocab").get<std::size_t>();
    v.options_.l2_normalize = j.at("l2_normalize").get<bool>();
    const auto& terms = j.at("terms");
    v.terms_.resize(terms.size());
    std::vector<char> seen(terms.size(), 0);
    for (const auto& t : terms) {
      const auto index = t.at("index").get<std::size_t>();
      if (index >= terms.size() || seen[index]) throw DataError("vocabulary indices are not a bijection");
      seen[index] = 1;
      v.terms_[index] = {t.at("token").get<std::string>(), t.at("idf").get<double>(),
                         t.value("df", std::size_t{0})};
      if (!(v.terms_[index].idf > 0.0)) throw DataError("vocabulary idf must be positive");
    }
    v.rebuild_index();
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed vocabulary: ") + e.what());
  }
}

}  // namespace tvrec
