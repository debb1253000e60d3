// Copyright 2026 The fpfed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef FPFED_FPFED_HPP_
#define FPFED_FPFED_HPP_

// Umbrella header for the whole library.

#include "fpfed/catalog.hpp"
#include "fpfed/config.hpp"
#include "fpfed/dp.hpp"
#include "fpfed/error.hpp"
#include "fpfed/eval.hpp"
#include "fpfed/experiment.hpp"
#include "fpfed/features.hpp"
#include "fpfed/fedavg.hpp"
#include "fpfed/fednorm.hpp"
#include "fpfed/heuristics.hpp"
#include "fpfed/lbfgs.hpp"
#include "fpfed/model.hpp"
#include "fpfed/partition.hpp"
#include "fpfed/pipeline.hpp"
#include "fpfed/random.hpp"
#include "fpfed/synthgen.hpp"
#include "fpfed/trace.hpp"

#endif  // FPFED_FPFED_HPP_
