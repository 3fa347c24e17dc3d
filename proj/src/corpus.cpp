#include "pstlm/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pstlm {

namespace {

bool is_ascii_punct(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

std::string normalize(std::string_view raw, const TokenizerRules& rules) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  if (rules.strip_edge_punctuation) {
    while (begin < end && is_ascii_punct(raw[begin])) ++begin;
    while (end > begin && is_ascii_punct(raw[end - 1])) --end;
  }
  std::string out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    char c = raw[i];
    if (rules.lowercase) {
      unsigned char u = static_cast<unsigned char>(c);
      if (u < 0x80) c = static_cast<char>(std::tolower(u));
    }
    out.push_back(c);
  }
  return out;
}

bool is_space(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u < 0x80 && std::isspace(u);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerRules& rules) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) {
      std::string word = normalize(text.substr(start, i - start), rules);
      if (!word.empty()) out.push_back(std::move(word));
    }
  }
  return out;
}

SymbolTable::SymbolTable() {
  surfaces_ = {"<pad>", "<unk>"};
  ids_.emplace(surfaces_[0], kPadId);
  ids_.emplace(surfaces_[1], kUnkId);
}

WordId SymbolTable::intern(std::string_view word) {
  std::string key(word);
  auto it = ids_.find(key);
  if (it != ids_.end()) return it->second;
  WordId id = static_cast<WordId>(surfaces_.size());
  surfaces_.push_back(key);
  ids_.emplace(std::move(key), id);
  return id;
}

std::optional<WordId> SymbolTable::lookup(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& SymbolTable::surface(WordId id) const {
  if (id >= surfaces_.size()) throw std::out_of_range("unknown word id");
  return surfaces_[id];
}

TokenStream stream_from_text(std::string_view text, SymbolTable& symbols,
                             const TokenizerRules& rules, VocabMode mode,
                             std::string source) {
  TokenStream stream;
  stream.source = std::move(source);

  auto flush_sentence = [&](std::string_view chunk) {
    std::vector<std::string> words = tokenize(chunk, rules);
    if (words.empty()) return;
    stream.sentence_starts.push_back(stream.ids.size());
    for (const std::string& w : words) {
      if (mode == VocabMode::Extend) {
        stream.ids.push_back(symbols.intern(w));
      } else {
        stream.ids.push_back(symbols.lookup(w).value_or(kUnkId));
      }
    }
  };

  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool boundary = false;
    if (c == '\n') {
      boundary = true;
    } else if (c == '.' || c == '!' || c == '?') {
      // A sentence ends only when the terminator is followed by whitespace
      // or the end of input, so "u.s.a" stays one token.
      if (i + 1 == text.size() || is_space(text[i + 1])) boundary = true;
    }
    if (boundary) {
      flush_sentence(text.substr(start, i + 1 - start));
      start = i + 1;
    }
  }
  flush_sentence(text.substr(start));
  return stream;
}

TokenStream stream_from_file(const std::string& path, SymbolTable& symbols,
                             const TokenizerRules& rules, VocabMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return stream_from_text(buffer.str(), symbols, rules, mode, path);
}

TokenStream padded(const TokenStream& stream, std::uint32_t depth) {
  TokenStream out;
  out.source = stream.source;
  std::size_t pad = static_cast<std::size_t>(depth) + 1;
  out.ids.reserve(pad + stream.ids.size());
  out.ids.assign(pad, kPadId);
  out.ids.insert(out.ids.end(), stream.ids.begin(), stream.ids.end());
  out.sentence_starts.reserve(stream.sentence_starts.size());
  for (std::size_t s : stream.sentence_starts) out.sentence_starts.push_back(s + pad);
  return out;
}

std::vector<bool> sentence_assignment(std::size_t sentence_count, double fraction,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<bool> train(sentence_count);
  for (std::size_t i = 0; i < sentence_count; ++i) {
    train[i] = uniform_unit(rng) < fraction;
  }
  return train;
}

std::pair<TokenStream, TokenStream> split_corpus(const TokenStream& stream,
                                                 double train_fraction,
                                                 std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie strictly between 0 and 1");
  }
  std::vector<std::size_t> starts = stream.sentence_starts;
  if (starts.empty() && !stream.ids.empty()) starts.push_back(0);

  std::vector<bool> train = sentence_assignment(starts.size(), train_fraction, seed);
  TokenStream a;
  TokenStream b;
  a.source = stream.source + " [train]";
  b.source = stream.source + " [heldout]";
  for (std::size_t s = 0; s < starts.size(); ++s) {
    std::size_t begin = starts[s];
    std::size_t end = (s + 1 < starts.size()) ? starts[s + 1] : stream.ids.size();
    TokenStream& side = train[s] ? a : b;
    side.sentence_starts.push_back(side.ids.size());
    side.ids.insert(side.ids.end(), stream.ids.begin() + begin, stream.ids.begin() + end);
  }
  return {std::move(a), std::move(b)};
}

}  // namespace pstlm
