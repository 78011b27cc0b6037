// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "winoq/toy_model.hpp"

namespace winoq::rsq {

// Writes `manifest.json` plus one tensor file (with sidecar) per weight and
// bias tensor into `dir`, creating it if needed.
void save_checkpoint(const ToyModel& model, const std::filesystem::path& dir);
ToyModel load_checkpoint(const std::filesystem::path& dir);

}  // namespace winoq::rsq
