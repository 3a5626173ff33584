#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semql {

enum class ErrorKind { Parse, Bind, Optimize, Execute, Internal };

class SemqlError : public std::runtime_error {
 public:
  SemqlError(ErrorKind kind, std::string message, size_t position = 0)
      : std::runtime_error(std::move(message)), kind_(kind), position_(position) {}

  ErrorKind kind() const { return kind_; }
  size_t position() const { return position_; }

  // process exit codes used by the CLI: 2 parse, 3 bind, 4 optimize, 5 execute
  int exit_code() const {
    switch (kind_) {
      case ErrorKind::Parse:
        return 2;
      case ErrorKind::Bind:
        return 3;
      case ErrorKind::Optimize:
        return 4;
      case ErrorKind::Execute:
        return 5;
      case ErrorKind::Internal:
        return 1;
    }
    return 1;
  }

 private:
  ErrorKind kind_;
  size_t position_;
};

}  // namespace semql
