#pragma once

#include <atomic>
#include <iostream>
#include <string_view>

namespace pidlrsc::log {

inline std::atomic<bool>& quiet_flag() {
    static std::atomic<bool> quiet{false};
    return quiet;
}

inline void set_quiet(bool quiet) { quiet_flag().store(quiet); }

inline void warn(std::string_view msg) {
    if (!quiet_flag().load()) std::cerr << "warning: " << msg << '\n';
}

inline void info(std::string_view msg) {
    if (!quiet_flag().load()) std::cerr << msg << '\n';
}

}  // namespace pidlrsc::log
