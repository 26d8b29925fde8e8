#ifndef BIVIRUS_LOG_HPP
#define BIVIRUS_LOG_HPP

#include <string>

namespace bivirus::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Threshold parsed once from the BIVIRUS_LOG environment variable
/// (error|warn|info|debug); defaults to warn.
Level threshold();

/// Diagnostics go to stderr only; data outputs never do.
void write(Level level, const std::string& msg);

inline void error(const std::string& msg) { write(Level::Error, msg); }
inline void warn(const std::string& msg) { write(Level::Warn, msg); }
inline void info(const std::string& msg) { write(Level::Info, msg); }
inline void debug(const std::string& msg) { write(Level::Debug, msg); }

} // namespace bivirus::log

#endif
