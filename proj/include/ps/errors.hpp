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

#include <stdexcept>
#include <string>

namespace ps {

// Registration of an already-registered (model, backend) pair.
class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when routing finds no healthy candidate. Maps to 503 at the gateway.
class NoHealthyServiceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ClassifierUnavailableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ColdStartTimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UndefinedEfficiencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateRangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ps
