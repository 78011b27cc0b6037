// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "winoq/tensor.hpp"

namespace winoq::io {

// Raw little-endian payload at `path`, JSON sidecar `{"shape":[b,c,w],"dtype":..}`
// at `sidecar_path(path)`.
std::filesystem::path sidecar_path(const std::filesystem::path& path);

void write_tensor(const std::filesystem::path& path, const TensorF32& t);
void write_tensor(const std::filesystem::path& path, const TensorI32& t);
void write_tensor(const std::filesystem::path& path, const TensorI8& t);

// Reads the sidecar's dtype; throws kIo on missing files, malformed sidecars,
// payload size mismatches or a dtype other than the one requested.
std::string read_dtype(const std::filesystem::path& path);
TensorF32 read_tensor_f32(const std::filesystem::path& path);
TensorI32 read_tensor_i32(const std::filesystem::path& path);
TensorI8 read_tensor_i8(const std::filesystem::path& path);

}  // namespace winoq::io
