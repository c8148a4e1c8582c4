#pragma once

#include <stdexcept>
#include <string>

namespace poicalib {

/// Failure category. Maps one-to-one onto the CLI exit codes.
enum class ErrorKind {
  config = 2,
  data = 3,
  training = 4,
  evaluation = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string stage, const std::string& message)
      : std::runtime_error(stage.empty() ? message : "[" + stage + "] " + message),
        kind_(kind),
        stage_(std::move(stage)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
  std::string stage_;
};

inline Error config_error(const std::string& stage, const std::string& msg) {
  return Error(ErrorKind::config, stage, msg);
}
inline Error data_error(const std::string& stage, const std::string& msg) {
  return Error(ErrorKind::data, stage, msg);
}
inline Error training_error(const std::string& stage, const std::string& msg) {
  return Error(ErrorKind::training, stage, msg);
}
inline Error evaluation_error(const std::string& stage, const std::string& msg) {
  return Error(ErrorKind::evaluation, stage, msg);
}

}  // namespace poicalib
