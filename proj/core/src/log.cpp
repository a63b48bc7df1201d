// Copyright 2026 The beatforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "beatforge/log.hpp"

#include <cstdlib>
#include <memory>
#include <mutex>
#include <utility>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace beatforge::log {
namespace {

spdlog::logger& logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto l = spdlog::stderr_color_mt("beatforge");
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::warn);
    return l;
  }();
  return *instance;
}

std::mutex observer_mutex;
Observer observer;

void notify(std::string_view level, std::string_view message) {
  std::lock_guard lock(observer_mutex);
  if (observer) observer(level, message);
}

}  // namespace

void init_from_env() {
  const char* level = std::getenv("BEATFORGE_LOG");
  if (level != nullptr) {
    logger().set_level(spdlog::level::from_str(level));
  }
}

void debug(std::string_view message) { logger().debug(message); }
void info(std::string_view message) { logger().info(message); }
void warn(std::string_view message) {
  logger().warn(message);
  notify("warn", message);
}

void error(std::string_view message) {
  logger().error(message);
  notify("error", message);
}

void set_observer(Observer fn) {
  std::lock_guard lock(observer_mutex);
  observer = std::move(fn);
}

}  // namespace beatforge::log
