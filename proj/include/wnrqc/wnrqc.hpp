// Copyright 2026 The wnrqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "wnrqc/architectures.hpp"
#include "wnrqc/cg_chain.hpp"
#include "wnrqc/coupled_walk.hpp"
#include "wnrqc/errors.hpp"
#include "wnrqc/metrics.hpp"
#include "wnrqc/noise_model.hpp"
#include "wnrqc/reduction.hpp"
#include "wnrqc/walk_exact.hpp"
#include "wnrqc/walk_mc.hpp"
#include "wnrqc/ztriple.hpp"
