#include "tuplespec/log.hpp"

#include <iostream>

namespace tuplespec::log {

namespace {

bool g_verbose = false;

void default_sink(Level level, const std::string& msg) {
  const char* tag = "info";
  switch (level) {
    case Level::Debug: tag = "debug"; break;
    case Level::Info: tag = "info"; break;
    case Level::Warn: tag = "warn"; break;
    case Level::Error: tag = "error"; break;
  }
  std::cerr << "[tuplespec:" << tag << "] " << msg << "\n";
}

Sink& sink_ref() {
  static Sink sink = default_sink;
  return sink;
}

}  // namespace

void set_sink(Sink sink) { sink_ref() = sink ? std::move(sink) : default_sink; }

void set_verbose(bool on) { g_verbose = on; }

bool verbose() { return g_verbose; }

void emit(Level level, const std::string& msg) {
  if ((level == Level::Debug || level == Level::Info) && !g_verbose) return;
  sink_ref()(level, msg);
}

}  // namespace tuplespec::log
