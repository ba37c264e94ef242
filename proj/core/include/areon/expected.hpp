#pragma once

#include <cassert>
#include <utility>
#include <variant>

namespace areon {

// Minimal result type carrying either a value or an error. The toolchain's
// standard library predates std::expected, so this covers the subset the
// project needs: construction from either side, boolean tests, and accessors
// that assert on misuse.
template <class T, class E>
class Expected {
 public:
  Expected(T value) : data_(std::in_place_index<0>, std::move(value)) {}
  Expected(E error) : data_(std::in_place_index<1>, std::move(error)) {}

  static Expected ok(T value) { return Expected(std::move(value)); }
  static Expected err(E error) { return Expected(std::move(error)); }

  bool has_value() const { return data_.index() == 0; }
  explicit operator bool() const { return has_value(); }

  T& value() {
    assert(has_value());
    return std::get<0>(data_);
  }
  const T& value() const {
    assert(has_value());
    return std::get<0>(data_);
  }
  const E& error() const {
    assert(!has_value());
    return std::get<1>(data_);
  }

 private:
  std::variant<T, E> data_;
};

template <class E>
class Status {
 public:
  Status() = default;
  Status(E error) : error_(std::move(error)), failed_(true) {}

  static Status ok() { return Status(); }

  bool has_value() const { return !failed_; }
  explicit operator bool() const { return !failed_; }
  const E& error() const {
    assert(failed_);
    return error_;
  }

 private:
  E error_{};
  bool failed_ = false;
};

}  // namespace areon
