#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "pstlm/trie.hpp"

namespace pstlm {

namespace {

constexpr char kMagic[8] = {'P', 'S', 'T', 'L', 'M', 'D', 'L', '\0'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint32_t kRootWord = 0xFFFFFFFFu;

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a64(const char* data, std::size_t n) {
  std::uint64_t h = kFnvOffset;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= kFnvPrime;
  }
  return h;
}

class Writer {
 public:
  void bytes(const char* data, std::size_t n) { buf_.append(data, n); }

  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }

  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }

  void f64(double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    u64(bits);
  }

  const std::string& data() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  void bytes(char* out, std::size_t n) {
    if (pos_ + n > data_.size()) {
      throw IoError(IoError::Kind::Truncated, "model file ends mid-record");
    }
    std::memcpy(out, data_.data() + pos_, n);
    pos_ += n;
  }

  std::uint8_t u8() {
    char c;
    bytes(&c, 1);
    return static_cast<std::uint8_t>(c);
  }

  std::uint32_t u32() {
    char b[4];
    bytes(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }

  double f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }

  std::string str(std::size_t n) {
    if (pos_ + n > data_.size()) {
      throw IoError(IoError::Kind::Truncated, "model file ends mid-record");
    }
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  const std::string& data() const { return data_; }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

[[noreturn]] void malformed(const std::string& what) {
  throw IoError(IoError::Kind::Malformed, "malformed model file: " + what);
}

}  // namespace

// Serialization needs the model internals; keeping the wire logic in one
// translation unit keeps the format self-contained.
struct ModelWireFormat {
  static void write_node(Writer& w, const TrieNode& node, std::uint32_t word) {
    w.u32(word);
    w.u64(node.visits);
    w.u64(node.succ_total);
    w.u32(node.species);
    w.f64(node.log_ratio);
    w.u32(static_cast<std::uint32_t>(node.children.size()));
    // Children in ascending word order: the byte stream depends only on the
    // logical contents, not on splay history.
    node.children.for_each([&](WordId cw, const TrieNode& c) { write_node(w, c, cw); });
  }

  static void save(const Model& m, std::ostream& out) {
    Writer w;
    w.bytes(kMagic, sizeof(kMagic));
    w.u32(kFormatVersion);
    std::uint8_t flags = 0;
    if (m.frozen_) flags |= 1;
    if (m.map_tree_) flags |= 2;
    w.u8(flags);
    w.f64(m.options_.alpha);
    w.u32(m.options_.max_depth);
    w.u64(m.options_.prune_interval);
    w.u64(m.options_.prune_threshold);
    w.u64(m.tokens_seen_);
    w.u64(m.node_count_);
    w.u32(static_cast<std::uint32_t>(SymbolTable::reserved_count()));
    w.u64(m.symbols_.size());
    for (WordId id = 0; id < m.symbols_.size(); ++id) {
      const std::string& s = m.symbols_.surface(id);
      w.u32(static_cast<std::uint32_t>(s.size()));
      w.bytes(s.data(), s.size());
    }
    write_node(w, m.root_, kRootWord);
    std::uint64_t checksum = fnv1a64(w.data().data(), w.data().size());
    out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
    Writer tail;
    tail.u64(checksum);
    out.write(tail.data().data(), static_cast<std::streamsize>(tail.data().size()));
    if (!out) throw IoError(IoError::Kind::Malformed, "write failed");
  }

  static std::uint64_t read_node(Reader& r, Model& m, TrieNode& node, std::uint32_t depth,
                                 std::uint32_t expected_word, bool is_root) {
    std::uint32_t word = r.u32();
    if (is_root) {
      if (word != kRootWord) malformed("root marker missing");
    } else {
      if (word != expected_word) malformed("node word does not match its key");
      if (word >= m.symbols_.size()) malformed("node word outside the vocabulary");
    }
    node.word = is_root ? 0 : word;
    node.visits = r.u64();
    node.succ_total = r.u64();
    node.species = r.u32();
    node.log_ratio = r.f64();
    if (!is_root && node.visits == 0) malformed("node with zero visits");
    if (!std::isfinite(node.log_ratio)) malformed("non-finite mixing ratio");
    std::uint32_t child_count = r.u32();
    if (depth > m.options_.max_depth + 1) malformed("node deeper than the model depth bound");
    if (depth == m.options_.max_depth + 1 && child_count != 0) {
      malformed("node deeper than the model depth bound");
    }
    std::uint64_t total = 1;
    std::uint32_t prev_word = 0;
    for (std::uint32_t i = 0; i < child_count; ++i) {
      // Peek the child's word to key the map before parsing the record.
      if (r.remaining() < 4) throw IoError(IoError::Kind::Truncated, "model file ends mid-record");
      std::uint32_t cw = 0;
      for (int b = 0; b < 4; ++b) {
        cw |= static_cast<std::uint32_t>(static_cast<unsigned char>(r.data()[r.pos() + b])) << (8 * b);
      }
      if (i > 0 && cw <= prev_word) malformed("children out of order");
      prev_word = cw;
      auto [child, created] = node.children.try_emplace(cw);
      if (!created) malformed("duplicate child");
      total += read_node(r, m, *child, depth + 1, cw, false);
    }
    return total;
  }

  static Model load(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    Reader r(buffer.str());

    char magic[8];
    r.bytes(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) malformed("bad magic");
    std::uint32_t version = r.u32();
    if (version != kFormatVersion) {
      throw IoError(IoError::Kind::VersionMismatch,
                    "unsupported model format version " + std::to_string(version));
    }
    std::uint8_t flags = r.u8();
    if (flags & ~0x3u) malformed("unknown flags");

    ModelOptions opts;
    opts.alpha = r.f64();
    if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) malformed("alpha out of range");
    opts.max_depth = r.u32();
    if (opts.max_depth > 64) malformed("depth out of range");
    opts.prune_interval = r.u64();
    opts.prune_threshold = r.u64();

    Model m(opts);
    m.tokens_seen_ = r.u64();
    std::uint64_t node_count = r.u64();

    std::uint32_t reserved = r.u32();
    if (reserved != SymbolTable::reserved_count()) malformed("reserved symbol mismatch");
    std::uint64_t vocab = r.u64();
    if (vocab < reserved || vocab > 0xFFFFFFFFull) malformed("vocabulary size out of range");
    for (std::uint64_t id = 0; id < vocab; ++id) {
      std::uint32_t len = r.u32();
      std::string s = r.str(len);
      if (id < reserved) {
        if (s != m.symbols_.surface(static_cast<WordId>(id))) malformed("reserved symbol mismatch");
      } else {
        WordId got = m.symbols_.intern(s);
        if (got != id) malformed("duplicate vocabulary entry");
      }
    }

    m.root_ = TrieNode{};
    std::uint64_t counted = read_node(r, m, m.root_, 0, 0, true);
    if (counted != node_count) malformed("node count disagrees with the tree");
    m.node_count_ = node_count;

    if (r.remaining() < 8) throw IoError(IoError::Kind::Truncated, "model file ends before the checksum");
    if (r.remaining() > 8) malformed("trailing bytes after the checksum");
    std::uint64_t expected = fnv1a64(r.data().data(), r.pos());
    std::uint64_t actual = r.u64();
    if (expected != actual) {
      throw IoError(IoError::Kind::ChecksumMismatch, "model file checksum mismatch");
    }

    m.frozen_ = (flags & 1) != 0;
    m.map_tree_ = (flags & 2) != 0;
    return m;
  }
};

void Model::save(std::ostream& out) const { ModelWireFormat::save(*this, out); }

void Model::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoError::Kind::Malformed, "cannot open model file for writing: " + path);
  save(out);
}

Model Model::load(std::istream& in) { return ModelWireFormat::load(in); }

Model Model::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoError::Kind::Malformed, "cannot open model file: " + path);
  return Model::load(in);
}

}  // namespace pstlm
