// Copyright 2026 The rgaudit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RGAUDIT_RGAUDIT_HPP
#define RGAUDIT_RGAUDIT_HPP

#include "audit.hpp"
#include "common.hpp"
#include "exact.hpp"
#include "fim.hpp"
#include "io.hpp"
#include "mcrg.hpp"
#include "operators.hpp"
#include "oracles.hpp"
#include "rbm.hpp"
#include "task.hpp"

#endif  // RGAUDIT_RGAUDIT_HPP
