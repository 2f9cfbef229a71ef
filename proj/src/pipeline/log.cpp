#include "kpeval/log.hpp"

#include <cstdlib>

#include <json.hpp>

#include "kpeval/errors.hpp"

namespace kpeval {

std::string_view to_string(LogLevel level) noexcept {
  switch (level) {
    case LogLevel::Error: return "error";
    case LogLevel::Warn: return "warn";
    case LogLevel::Info: return "info";
    case LogLevel::Debug: return "debug";
  }
  return "warn";
}

std::optional<LogLevel> log_level_from_string(std::string_view text) noexcept {
  if (text == "error") return LogLevel::Error;
  if (text == "warn" || text == "warning") return LogLevel::Warn;
  if (text == "info") return LogLevel::Info;
  if (text == "debug") return LogLevel::Debug;
  return std::nullopt;
}

LogLevel log_level_from_env() {
  const char* v = std::getenv("KPEVAL_LOG");
  if (v == nullptr) return LogLevel::Warn;
  return log_level_from_string(v).value_or(LogLevel::Warn);
}

Logger::Logger(const std::filesystem::path& path, LogLevel level) : level_(level) {
  if (path.empty()) return;
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error(ErrorCode::IoError, "cannot write log " + path.string());
}

void Logger::event(LogLevel level, std::string_view code, std::string_view message,
                   const std::vector<std::pair<std::string, std::string>>& fields) {
  std::lock_guard lock(mu_);
  ++counts_[static_cast<int>(level)];
  if (level > level_ || !out_.is_open()) return;
  nlohmann::ordered_json j;
  j["level"] = to_string(level);
  j["code"] = code;
  j["message"] = message;
  for (const auto& [k, v] : fields)
    if (!v.empty()) j[k] = v;
  out_ << j.dump() << '\n';
  out_.flush();
}

void Logger::warning(const Warning& w) {
  event(LogLevel::Warn, w.code, w.message, {{"sequence_id", w.sequence_id}, {"frame_id", w.frame_id}});
}

int Logger::count(LogLevel level) const noexcept { return counts_[static_cast<int>(level)]; }

}  // namespace kpeval
