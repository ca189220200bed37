#pragma once
#include <stdexcept>
#include <utility>
#include <variant>

namespace thetaver {

// Minimal value-or-error carrier (std::expected is C++23).
template <class T, class E>
class Expected {
 public:
  Expected(T value) : v_(std::in_place_index<0>, std::move(value)) {}
  Expected(E error) : v_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  T& value() {
    if (!ok()) throw std::logic_error("Expected: access to value of error state");
    return std::get<0>(v_);
  }
  const T& value() const {
    if (!ok()) throw std::logic_error("Expected: access to value of error state");
    return std::get<0>(v_);
  }
  const E& error() const {
    if (ok()) throw std::logic_error("Expected: access to error of value state");
    return std::get<1>(v_);
  }

 private:
  std::variant<T, E> v_;
};

}  // namespace thetaver
