// Copyright 2026 The posepilot Authors
// SPDX-License-Identifier: Apache-2.0

// Core library: everything except the websocket bridge (posepilot/bridge.hpp),
// which additionally needs Boost.Beast.
#pragma once

#include "posepilot/classifier.hpp"
#include "posepilot/command.hpp"
#include "posepilot/debouncer.hpp"
#include "posepilot/drone_sim.hpp"
#include "posepilot/fixtures.hpp"
#include "posepilot/geometry.hpp"
#include "posepilot/pipeline.hpp"
#include "posepilot/pose_frame.hpp"
#include "posepilot/pose_ingest.hpp"
#include "posepilot/session.hpp"
