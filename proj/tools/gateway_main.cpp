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

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "ps/config.hpp"
#include "ps/gateway.hpp"

namespace {

ps::Gateway* g_gateway = nullptr;

void handle_signal(int) {
  if (g_gateway != nullptr) g_gateway->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prompt routing gateway"};
  std::string config_path;
  int port_override = -1;
  app.add_option("--config", config_path, "gateway config json")->required();
  app.add_option("--port", port_override, "listen port override (0 = any)");
  CLI11_PARSE(app, argc, argv);

  try {
    ps::GatewayConfig config = ps::load_gateway_config(config_path);
    if (port_override >= 0) config.port = port_override;
    ps::Gateway gateway(config);
    g_gateway = &gateway;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    gateway.start();
    std::cout << "gateway listening on " << config.listen_address << ":"
              << gateway.port() << " (" << config.mode << " mode)"
              << std::endl;
    gateway.wait();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
