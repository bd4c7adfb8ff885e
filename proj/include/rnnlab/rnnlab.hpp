// Copyright 2026 The rnnlab Authors.
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

#ifndef RNNLAB_RNNLAB_HPP_
#define RNNLAB_RNNLAB_HPP_

#include "rnnlab/analysis.hpp"
#include "rnnlab/cells.hpp"
#include "rnnlab/checkpoint.hpp"
#include "rnnlab/errors.hpp"
#include "rnnlab/experiment.hpp"
#include "rnnlab/graphs.hpp"
#include "rnnlab/metrics.hpp"
#include "rnnlab/numeric.hpp"
#include "rnnlab/parallel.hpp"
#include "rnnlab/tasks.hpp"
#include "rnnlab/training.hpp"

#endif  // RNNLAB_RNNLAB_HPP_
