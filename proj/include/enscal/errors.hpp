#pragma once

#include <stdexcept>
#include <string>

namespace enscal {

// Error categories map onto CLI exit codes: config 2, data 3, numeric 4.
enum class ErrorKind { config, data, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_config(const std::string& msg) {
  throw Error(ErrorKind::config, msg);
}
[[noreturn]] inline void fail_data(const std::string& msg) {
  throw Error(ErrorKind::data, msg);
}
[[noreturn]] inline void fail_numeric(const std::string& msg) {
  throw Error(ErrorKind::numeric, msg);
}

}  // namespace enscal
