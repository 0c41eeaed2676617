#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <sys/types.h>

namespace sbench {

/// Child process running `/bin/sh -c command` with line-oriented pipes on its
/// stdin and stdout. stderr is inherited. The destructor kills and reaps.
class LineProcess {
 public:
  explicit LineProcess(const std::string& command);
  ~LineProcess();

  LineProcess(const LineProcess&) = delete;
  LineProcess& operator=(const LineProcess&) = delete;

  /// Throws TrackerCrashed when the pipe is closed.
  void write_line(const std::string& line);

  /// Next line without the trailing newline; nullopt on EOF. Throws Timeout.
  std::optional<std::string> read_line(std::chrono::milliseconds timeout);

  bool running();
  void kill();

 private:
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace sbench
