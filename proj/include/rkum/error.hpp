#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rkum {

enum class ErrorKind { domain, dimension, data, numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorKind::dimension, what) {}
};

/// Malformed or degenerate input data.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

using WarningSink = std::function<void(std::string_view)>;

namespace detail {
struct WarningState {
  std::mutex mutex;
  WarningSink sink = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
};

inline WarningState& warning_state() {
  static WarningState state;
  return state;
}
}  // namespace detail

/// Replaces the process-wide warning sink and returns the previous one.
inline WarningSink set_warning_sink(WarningSink sink) {
  auto& st = detail::warning_state();
  std::lock_guard lock(st.mutex);
  std::swap(st.sink, sink);
  return sink;
}

inline void warn(std::string_view msg) {
  auto& st = detail::warning_state();
  std::lock_guard lock(st.mutex);
  if (st.sink) st.sink(msg);
}

}  // namespace rkum
