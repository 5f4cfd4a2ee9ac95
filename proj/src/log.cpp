#include "factcheck/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace factcheck::log {

namespace {

Level initial_level()
{
    const char *env = std::getenv("FACTCHECK_LOG");
    if (env == nullptr) {
        return Level::info;
    }
    const std::string v(env);
    if (v == "debug") {
        return Level::debug;
    }
    if (v == "warn") {
        return Level::warn;
    }
    if (v == "error") {
        return Level::error;
    }
    if (v == "off") {
        return Level::off;
    }
    return Level::info;
}

std::atomic<Level> &current()
{
    static std::atomic<Level> level{initial_level()};
    return level;
}

constexpr const char *names[] = {"debug", "info", "warn", "error"};

}  // namespace

void set_level(Level level) noexcept { current().store(level); }

Level level() noexcept { return current().load(); }

void write(Level level, std::string_view message)
{
    if (level < current().load() || level == Level::off) {
        return;
    }
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    std::cerr << "[" << names[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace factcheck::log
