#pragma once

#include <functional>
#include <string>

namespace tuplespec::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3 };

using Sink = std::function<void(Level, const std::string&)>;

// Default sink writes to stderr. Warnings and errors always pass; info/debug
// only when verbose is on.
void set_sink(Sink sink);
void set_verbose(bool on);
bool verbose();

void emit(Level level, const std::string& msg);

inline void debug(const std::string& msg) { emit(Level::Debug, msg); }
inline void info(const std::string& msg) { emit(Level::Info, msg); }
inline void warn(const std::string& msg) { emit(Level::Warn, msg); }
inline void error(const std::string& msg) { emit(Level::Error, msg); }

}  // namespace tuplespec::log
