// Copyright 2026 The TrendSketch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header for the library (everything except the HTTP service).

#pragma once

#include "trendsketch/alignment.hpp"
#include "trendsketch/clustering.hpp"
#include "trendsketch/constraint.hpp"
#include "trendsketch/core.hpp"
#include "trendsketch/geometry.hpp"
#include "trendsketch/ingest.hpp"
#include "trendsketch/json_io.hpp"
#include "trendsketch/pipeline.hpp"
#include "trendsketch/ps.hpp"
#include "trendsketch/search.hpp"
#include "trendsketch/time.hpp"
