#pragma once

// Diagnostics on stderr, gated by SMLD_LOG = quiet | info | debug.

#include <cstdlib>
#include <iostream>
#include <string>

namespace smld::cli::log {

enum class Level { Quiet, Info, Debug };

inline Level level() {
    static const Level lvl = [] {
        const char* v = std::getenv("SMLD_LOG");
        const std::string s = v ? v : "quiet";
        if (s == "debug") return Level::Debug;
        if (s == "info") return Level::Info;
        if (s != "quiet") std::cerr << "smld: unknown SMLD_LOG value '" << s << "', using quiet\n";
        return Level::Quiet;
    }();
    return lvl;
}

inline void info(const std::string& msg) {
    if (level() >= Level::Info) std::cerr << "[info] " << msg << "\n";
}

inline void debug(const std::string& msg) {
    if (level() >= Level::Debug) std::cerr << "[debug] " << msg << "\n";
}

} // namespace smld::cli::log
