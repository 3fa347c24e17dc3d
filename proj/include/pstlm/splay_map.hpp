#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace pstlm {

/// Ordered map with splay-tree self-adjustment.
///
/// Mutable lookups splay the accessed key to the root, so frequently used
/// keys stay near the top. Const lookups are plain descents and never
/// restructure, which keeps read-only models safe to share across threads.
/// Node addresses are stable for the lifetime of an entry: splaying relinks
/// nodes but never moves or copies mapped values.
template <typename Key, typename T>
class SplayMap {
 public:
  SplayMap() = default;

  SplayMap(const SplayMap& other) : root_(clone(other.root_)), size_(other.size_) {}

  SplayMap(SplayMap&& other) noexcept : root_(other.root_), size_(other.size_) {
    other.root_ = nullptr;
    other.size_ = 0;
  }

  SplayMap& operator=(const SplayMap& other) {
    if (this != &other) {
      clear();
      root_ = clone(other.root_);
      size_ = other.size_;
    }
    return *this;
  }

  SplayMap& operator=(SplayMap&& other) noexcept {
    if (this != &other) {
      clear();
      root_ = other.root_;
      size_ = other.size_;
      other.root_ = nullptr;
      other.size_ = 0;
    }
    return *this;
  }

  ~SplayMap() { clear(); }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  /// Splaying lookup. Returns nullptr when the key is absent.
  T* find(const Key& key) {
    root_ = splay(root_, key);
    if (root_ && root_->key == key) return &root_->value;
    return nullptr;
  }

  /// Non-restructuring lookup.
  const T* find(const Key& key) const {
    const Node* n = root_;
    while (n) {
      if (key < n->key) {
        n = n->left;
      } else if (n->key < key) {
        n = n->right;
      } else {
        return &n->value;
      }
    }
    return nullptr;
  }

  /// Inserts a default-constructed value when the key is absent. Splays
  /// either way; the bool reports whether an insertion happened.
  std::pair<T*, bool> try_emplace(const Key& key) {
    if (!root_) {
      root_ = new Node{key, T{}, nullptr, nullptr};
      size_ = 1;
      return {&root_->value, true};
    }
    root_ = splay(root_, key);
    if (root_->key == key) return {&root_->value, false};
    Node* n = new Node{key, T{}, nullptr, nullptr};
    if (key < root_->key) {
      n->left = root_->left;
      n->right = root_;
      root_->left = nullptr;
    } else {
      n->right = root_->right;
      n->left = root_;
      root_->right = nullptr;
    }
    root_ = n;
    ++size_;
    return {&root_->value, true};
  }

  T& operator[](const Key& key) { return *try_emplace(key).first; }

  /// Removes the key if present; returns whether an entry was removed.
  bool erase(const Key& key) {
    if (!root_) return false;
    root_ = splay(root_, key);
    if (!(root_->key == key)) return false;
    Node* victim = root_;
    if (!root_->left) {
      root_ = root_->right;
    } else {
      // The largest key below `key` splays to the left subtree's root and
      // then has no right child.
      Node* l = splay(root_->left, key);
      l->right = root_->right;
      root_ = l;
    }
    delete victim;
    --size_;
    return true;
  }

  /// In-order traversal, ascending by key. Order depends only on the key
  /// set, never on the access history.
  template <typename F>
  void for_each(F&& f) const {
    const Node* n = root_;
    std::vector<const Node*> stack;
    while (n || !stack.empty()) {
      while (n) {
        stack.push_back(n);
        n = n->left;
      }
      n = stack.back();
      stack.pop_back();
      f(n->key, n->value);
      n = n->right;
    }
  }

  template <typename F>
  void for_each(F&& f) {
    Node* n = root_;
    std::vector<Node*> stack;
    while (n || !stack.empty()) {
      while (n) {
        stack.push_back(n);
        n = n->left;
      }
      n = stack.back();
      stack.pop_back();
      f(n->key, n->value);
      n = n->right;
    }
  }

  void clear() {
    // Iterative teardown: access patterns can leave the tree a long chain,
    // and recursive destruction would exhaust the stack.
    std::vector<Node*> stack;
    if (root_) stack.push_back(root_);
    while (!stack.empty()) {
      Node* n = stack.back();
      stack.pop_back();
      if (n->left) stack.push_back(n->left);
      if (n->right) stack.push_back(n->right);
      delete n;
    }
    root_ = nullptr;
    size_ = 0;
  }

 private:
  struct Node {
    Key key;
    T value;
    Node* left;
    Node* right;
  };

  // Top-down splay: after the call the tree root holds `key` if present,
  // otherwise the last node touched on the search path.
  static Node* splay(Node* t, const Key& key) {
    if (!t) return nullptr;
    Node* left_root = nullptr;   // accumulates keys below `key`
    Node* right_root = nullptr;  // accumulates keys above `key`
    Node** l = &left_root;
    Node** r = &right_root;
    for (;;) {
      if (key < t->key) {
        if (!t->left) break;
        if (key < t->left->key) {
          Node* y = t->left;  // rotate right
          t->left = y->right;
          y->right = t;
          t = y;
          if (!t->left) break;
        }
        *r = t;  // link right
        r = &t->left;
        t = t->left;
      } else if (t->key < key) {
        if (!t->right) break;
        if (t->right->key < key) {
          Node* y = t->right;  // rotate left
          t->right = y->left;
          y->left = t;
          t = y;
          if (!t->right) break;
        }
        *l = t;  // link left
        l = &t->right;
        t = t->right;
      } else {
        break;
      }
    }
    *l = t->left;
    *r = t->right;
    t->left = left_root;
    t->right = right_root;
    return t;
  }

  static Node* clone(const Node* n) {
    if (!n) return nullptr;
    Node* copy = new Node{n->key, n->value, nullptr, nullptr};
    std::vector<std::pair<const Node*, Node*>> stack{{n, copy}};
    while (!stack.empty()) {
      auto [src, dst] = stack.back();
      stack.pop_back();
      if (src->left) {
        dst->left = new Node{src->left->key, src->left->value, nullptr, nullptr};
        stack.push_back({src->left, dst->left});
      }
      if (src->right) {
        dst->right = new Node{src->right->key, src->right->value, nullptr, nullptr};
        stack.push_back({src->right, dst->right});
      }
    }
    return copy;
  }

  Node* root_ = nullptr;
  std::size_t size_ = 0;
};

}  // namespace pstlm
