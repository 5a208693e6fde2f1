#ifndef MA2D_LOG_HPP
#define MA2D_LOG_HPP

#include <iostream>
#include <string>

namespace ma2d {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel parse_log_level(const std::string& name);
const char* log_level_name(LogLevel level);

/// Line-oriented logger writing to a console stream and optionally an
/// extra sink (log file). Not synchronized; share one per thread or guard
/// externally.
class Logger {
public:
    explicit Logger(LogLevel level = LogLevel::info, std::ostream* console = &std::cout,
                    std::ostream* extra = nullptr)
        : level_(level), console_(console), extra_(extra) {}

    void log(LogLevel level, const std::string& message) const {
        if (extra_) *extra_ << "[" << log_level_name(level) << "] " << message << "\n";
        if (level <= level_ && console_) {
            *console_ << "[" << log_level_name(level) << "] " << message << "\n";
            console_->flush();
        }
    }

    void error(const std::string& m) const { log(LogLevel::error, m); }
    void warn(const std::string& m) const { log(LogLevel::warn, m); }
    void info(const std::string& m) const { log(LogLevel::info, m); }
    void debug(const std::string& m) const { log(LogLevel::debug, m); }

private:
    LogLevel level_;
    std::ostream* console_;
    std::ostream* extra_;
};

inline LogLevel parse_log_level(const std::string& name) {
    if (name == "error") return LogLevel::error;
    if (name == "warn") return LogLevel::warn;
    if (name == "info") return LogLevel::info;
    if (name == "debug") return LogLevel::debug;
    throw std::invalid_argument("unknown log level '" + name + "'");
}

inline const char* log_level_name(LogLevel level) {
    switch (level) {
        case LogLevel::error: return "error";
        case LogLevel::warn: return "warn";
        case LogLevel::info: return "info";
        case LogLevel::debug: return "debug";
    }
    return "?";
}

}  // namespace ma2d

#endif
