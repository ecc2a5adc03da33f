#pragma once

#include <stdexcept>
#include <string>

namespace likeability {

/// Base for every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An Error carrying a module-specific kind tag so callers can branch on it
/// without parsing the message.
template <typename Kind>
class KindedError : public Error {
 public:
  KindedError(Kind kind, const std::string& message)
      : Error(message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace likeability
