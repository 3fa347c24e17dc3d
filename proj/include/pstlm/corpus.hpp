#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pstlm {

using WordId = std::uint32_t;

/// Sentence-boundary padding symbol. Appears only as context, never as a
/// predicted or generated word.
inline constexpr WordId kPadId = 0;

/// Placeholder for words a frozen model has never interned.
inline constexpr WordId kUnkId = 1;

/// Draws a double uniformly from [0, 1) using the generator's top 53 bits.
/// Used everywhere randomness is needed so that seeded runs reproduce
/// exactly across platforms (std::uniform_real_distribution does not
/// guarantee a stable sequence).
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct TokenizerRules {
  bool lowercase = true;
  bool strip_edge_punctuation = true;
};

/// Splits text on whitespace and normalizes each token: optional ASCII
/// lowercasing, optional stripping of leading/trailing punctuation.
/// Punctuation inside a token (apostrophes, hyphens) is preserved. Tokens
/// that normalize to the empty string are dropped.
std::vector<std::string> tokenize(std::string_view text, const TokenizerRules& rules = {});

/// Bidirectional word <-> id registry. Ids 0 and 1 are reserved for the
/// padding and unknown-word symbols; the first interned word receives id 2.
class SymbolTable {
 public:
  SymbolTable();

  /// Returns the existing id or assigns the next free one.
  WordId intern(std::string_view word);

  /// Id lookup without interning.
  std::optional<WordId> lookup(std::string_view word) const;

  /// Surface form for an id; throws std::out_of_range for unknown ids.
  const std::string& surface(WordId id) const;

  /// Number of ids handed out, reserved symbols included.
  std::size_t size() const { return surfaces_.size(); }

  static constexpr std::size_t reserved_count() { return 2; }

 private:
  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, WordId> ids_;
};

/// A tokenized corpus: word ids in reading order plus the offsets where
/// sentences begin. `source` records where the text came from.
struct TokenStream {
  std::vector<WordId> ids;
  std::vector<std::size_t> sentence_starts;
  std::string source;

  bool empty() const { return ids.empty(); }
  std::size_t size() const { return ids.size(); }
};

/// Controls what happens to words missing from the symbol table:
/// Extend interns them, Lookup maps them to the unknown-word id.
enum class VocabMode { Extend, Lookup };

/// Tokenizes raw text into a stream, recording sentence boundaries.
/// Sentences end at a newline or after [.!?] followed by whitespace.
TokenStream stream_from_text(std::string_view text, SymbolTable& symbols,
                             const TokenizerRules& rules = {},
                             VocabMode mode = VocabMode::Extend,
                             std::string source = "<text>");

/// Reads and tokenizes a whole file; throws std::runtime_error if the file
/// cannot be opened.
TokenStream stream_from_file(const std::string& path, SymbolTable& symbols,
                             const TokenizerRules& rules = {},
                             VocabMode mode = VocabMode::Extend);

/// Returns a copy of the stream with depth+1 padding ids prepended, so a
/// depth-long context window is defined even at the first real token.
TokenStream padded(const TokenStream& stream, std::uint32_t depth);

/// Per-sentence train membership: one uniform draw per sentence, in order,
/// from a generator seeded with `seed`; draw < fraction selects train.
std::vector<bool> sentence_assignment(std::size_t sentence_count, double fraction,
                                      std::uint64_t seed);

/// Splits a stream into train and held-out parts by whole sentences,
/// preserving sentence order within each side. The fraction must lie
/// strictly between 0 and 1; throws std::invalid_argument otherwise.
std::pair<TokenStream, TokenStream> split_corpus(const TokenStream& stream,
                                                 double train_fraction,
                                                 std::uint64_t seed);

}  // namespace pstlm
