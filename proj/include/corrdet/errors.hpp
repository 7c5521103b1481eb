/* Copyright 2026 The corrdet Authors. All Rights Reserved.

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

namespace corrdet {

// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A correlation coefficient is undefined for the given input (n < 2, or a
// zero-variance series).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// Every image (or class) of an evaluation was skipped.
class EmptyEvaluation : public Error {
 public:
  using Error::Error;
};

// A PR curve was requested for a class without ground truth.
class NoGroundTruth : public Error {
 public:
  using Error::Error;
};

// Input files.
class ParseError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ReferenceError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace corrdet
