// Copyright 2026 The boca-cpp Authors
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

#pragma once

#include "boca/error.hpp"
#include "boca/rng.hpp"
#include "boca/bundle.hpp"
#include "boca/domain.hpp"
#include "boca/wdp.hpp"
#include "boca/value_model.hpp"
#include "boca/mvnn.hpp"
#include "boca/init.hpp"
#include "boca/loss.hpp"
#include "boca/train.hpp"
#include "boca/nomu.hpp"
#include "boca/milp.hpp"
#include "boca/mechanism.hpp"
#include "boca/io.hpp"
#include "boca/harness.hpp"
