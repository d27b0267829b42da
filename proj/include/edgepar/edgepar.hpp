// Copyright 2026 The edgepar Authors
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

#include "edgepar/channel.hpp"
#include "edgepar/clock.hpp"
#include "edgepar/detector.hpp"
#include "edgepar/error.hpp"
#include "edgepar/eval.hpp"
#include "edgepar/ingest.hpp"
#include "edgepar/pipeline.hpp"
#include "edgepar/planner.hpp"
#include "edgepar/report.hpp"
#include "edgepar/scheduler.hpp"
#include "edgepar/stream.hpp"
#include "edgepar/synchronizer.hpp"
#include "edgepar/synthetic.hpp"
#include "edgepar/wall.hpp"
