#pragma once

/// \file log.hpp
/// \brief Structured event log, one JSON object per line.

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kpeval/ingest.hpp"

namespace kpeval {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

std::string_view to_string(LogLevel level) noexcept;
std::optional<LogLevel> log_level_from_string(std::string_view text) noexcept;

/// Level named by KPEVAL_LOG, Warn when unset or unrecognised.
LogLevel log_level_from_env();

class Logger {
 public:
  /// An empty path logs nowhere; events above `level` are dropped.
  explicit Logger(const std::filesystem::path& path = {}, LogLevel level = LogLevel::Warn);

  void event(LogLevel level, std::string_view code, std::string_view message,
             const std::vector<std::pair<std::string, std::string>>& fields = {});
  void warning(const Warning& w);

  int count(LogLevel level) const noexcept;

 private:
  std::mutex mu_;
  std::ofstream out_;
  LogLevel level_;
  int counts_[4] = {0, 0, 0, 0};
};

}  // namespace kpeval
