/*
 * Copyright 2026 The overbench Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Umbrella header.

#include "overbench/clock.hpp"
#include "overbench/environment.hpp"
#include "overbench/error.hpp"
#include "overbench/history.hpp"
#include "overbench/probe.hpp"
#include "overbench/queue.hpp"
#include "overbench/record.hpp"
#include "overbench/run_io.hpp"
#include "overbench/run_types.hpp"
#include "overbench/runner.hpp"
#include "overbench/stats.hpp"
#include "overbench/trace_format.hpp"
#include "overbench/workload.hpp"
