#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace areon {

// Growable bitset used for ancestor closures, view membership and ledger
// membership. Sets of different logical sizes interoperate: words past the
// end of the shorter operand read as zero.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) { resize(n); }

  void resize(std::size_t n) {
    if (n > size_) size_ = n;
    words_.resize((size_ + 63) / 64, 0);
  }

  std::size_t size() const { return size_; }

  bool test(std::size_t i) const {
    std::size_t w = i >> 6;
    if (w >= words_.size()) return false;
    return (words_[w] >> (i & 63)) & 1u;
  }

  void set(std::size_t i) {
    if (i >= size_) resize(i + 1);
    words_[i >> 6] |= std::uint64_t(1) << (i & 63);
  }

  void reset(std::size_t i) {
    std::size_t w = i >> 6;
    if (w < words_.size()) words_[w] &= ~(std::uint64_t(1) << (i & 63));
  }

  void clear() {
    for (auto& w : words_) w = 0;
  }

  void or_with(const Bits& o) {
    if (o.words_.size() > words_.size()) {
      words_.resize(o.words_.size(), 0);
      if (o.size_ > size_) size_ = o.size_;
    }
    for (std::size_t i = 0; i < o.words_.size(); ++i) words_[i] |= o.words_[i];
  }

  bool intersects(const Bits& o) const {
    std::size_t n = std::min(words_.size(), o.words_.size());
    for (std::size_t i = 0; i < n; ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }

  // True when some bit of *this is absent from o.
  bool any_and_not(const Bits& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t ow = i < o.words_.size() ? o.words_[i] : 0;
      if (words_[i] & ~ow) return true;
    }
    return false;
  }

  bool equals(const Bits& o) const {
    std::size_t n = std::max(words_.size(), o.words_.size());
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t a = i < words_.size() ? words_[i] : 0;
      std::uint64_t b = i < o.words_.size() ? o.words_[i] : 0;
      if (a != b) return false;
    }
    return true;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  template <class Fn>
  void for_each_set(Fn&& fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i];
      while (w) {
        std::size_t b = std::countr_zero(w);
        fn(i * 64 + b);
        w &= w - 1;
      }
    }
  }

  // Visits bits of (*this & ~o).
  template <class Fn>
  void for_each_set_and_not(const Bits& o, Fn&& fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t ow = i < o.words_.size() ? o.words_[i] : 0;
      std::uint64_t w = words_[i] & ~ow;
      while (w) {
        std::size_t b = std::countr_zero(w);
        fn(i * 64 + b);
        w &= w - 1;
      }
    }
  }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

}  // namespace areon
