/* Copyright 2026 The PromptSwitch Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "ps/config.hpp"

namespace ps {

struct GatewayCounters {
  std::uint64_t total = 0;    // requests that reached routing
  std::uint64_t success = 0;
  std::uint64_t failure = 0;  // backend failures, 502/503/504 included
  std::uint64_t rejected = 0; // request validation failures (400)
};

// HTTP front door: accepts prompts on POST /v1/route, routes them through
// the classifier + orchestrator, executes against simulated or proxied
// backends, and serves admin endpoints (GET /registry, /metrics,
// /profiles, POST /health/{service_id}).
class Gateway {
 public:
  explicit Gateway(GatewayConfig config);
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Binds and serves on background threads; returns once the listener is
  // accepting connections. Throws ConfigError when binding fails.
  void start();
  void stop();
  // Blocks until stop() is called from elsewhere.
  void wait();

  int port() const;
  GatewayCounters counters() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ps
