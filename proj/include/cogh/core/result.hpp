#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace cogh {

enum class ErrorCode {
  InvalidHierarchy,
  UnknownNode,
  InvalidCommand,
  InvalidStart,
  UnknownTask,
  Inapplicable,
  NoPlan,
  InvalidScenario,
  Io,
};

const char* to_string(ErrorCode code);

struct Error {
  ErrorCode code;
  std::string message;

  std::string str() const { return std::string(to_string(code)) + ": " + message; }
};

class BadResultAccess : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Value-or-error return type. Operations report failures through this rather
// than aborting; callers branch on ok().
template <class T, class E = Error>
class [[nodiscard]] Result {
 public:
  Result(T value) : state_(std::in_place_index<0>, std::move(value)) {}
  Result(E error) : state_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const noexcept { return state_.index() == 0; }
  explicit operator bool() const noexcept { return ok(); }

  const T& value() const& {
    check();
    return std::get<0>(state_);
  }
  T& value() & {
    check();
    return std::get<0>(state_);
  }
  T&& value() && {
    check();
    return std::get<0>(std::move(state_));
  }

  const T& operator*() const& { return value(); }
  T& operator*() & { return value(); }
  const T* operator->() const { return &value(); }
  T* operator->() { return &value(); }

  const E& error() const& {
    if (ok()) throw BadResultAccess("Result holds a value, not an error");
    return std::get<1>(state_);
  }

 private:
  void check() const {
    if (!ok()) throw BadResultAccess("Result holds an error");
  }

  std::variant<T, E> state_;
};

inline Error make_error(ErrorCode code, std::string message) {
  return Error{code, std::move(message)};
}

}  // namespace cogh
