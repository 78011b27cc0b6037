// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/tensor_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace winoq::io {
namespace {

using nlohmann::json;

template <typename T>
constexpr const char* dtype_name();
template <>
constexpr const char* dtype_name<float>() { return "f32"; }
template <>
constexpr const char* dtype_name<std::int32_t>() { return "i32"; }
template <>
constexpr const char* dtype_name<std::int8_t>() { return "i8"; }

template <typename T>
void to_little_endian(std::array<char, sizeof(T)>& bytes) {
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
}

template <typename T>
void write_impl(const std::filesystem::path& path, const Tensor<T>& t) {
  std::ofstream raw(path, std::ios::binary | std::ios::trunc);
  if (!raw) fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  for (T v : t.data()) {
    std::array<char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &v, sizeof(T));
    to_little_endian<T>(bytes);
    raw.write(bytes.data(), bytes.size());
  }
  if (!raw) fail(ErrorCode::kIo, "write failed for " + path.string());

  const auto& s = t.shape();
  json meta = {{"shape", {s.batch, s.channels, s.width}}, {"dtype", dtype_name<T>()}};
  std::ofstream side(sidecar_path(path), std::ios::trunc);
  if (!side) fail(ErrorCode::kIo, "cannot open sidecar for " + path.string());
  side << meta.dump() << "\n";
}

struct Sidecar {
  Shape shape;
  std::string dtype;
};

Sidecar read_sidecar(const std::filesystem::path& path) {
  std::ifstream side(sidecar_path(path));
  if (!side) fail(ErrorCode::kIo, "missing sidecar " + sidecar_path(path).string());
  json meta;
  try {
    side >> meta;
    const auto& dims = meta.at("shape");
    if (!dims.is_array() || dims.size() != 3) {
      fail(ErrorCode::kIo, "sidecar shape must have three dimensions");
    }
    Sidecar out;
    out.shape = Shape{dims[0].get<std::size_t>(), dims[1].get<std::size_t>(),
                      dims[2].get<std::size_t>()};
    out.dtype = meta.at("dtype").get<std::string>();
    return out;
  } catch (const json::exception& e) {
    fail(ErrorCode::kIo, "malformed sidecar " + sidecar_path(path).string() + ": " + e.what());
  }
}

template <typename T>
Tensor<T> read_impl(const std::filesystem::path& path) {
  const Sidecar meta = read_sidecar(path);
  if (meta.dtype != dtype_name<T>()) {
    fail(ErrorCode::kIo, path.string() + " holds dtype " + meta.dtype + ", expected " +
                             dtype_name<T>());
  }
  if (meta.shape.numel() == 0) fail(ErrorCode::kIo, "zero-sized shape in " + path.string());

  std::ifstream raw(path, std::ios::binary);
  if (!raw) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::error_code ec;
  const auto bytes = std::filesystem::file_size(path, ec);
  if (ec || bytes != meta.shape.numel() * sizeof(T)) {
    fail(ErrorCode::kIo, path.string() + " payload size does not match its sidecar shape");
  }
  std::vector<T> data(meta.shape.numel());
  for (auto& v : data) {
    std::array<char, sizeof(T)> buf{};
    raw.read(buf.data(), buf.size());
    to_little_endian<T>(buf);
    std::memcpy(&v, buf.data(), sizeof(T));
  }
  if (!raw) fail(ErrorCode::kIo, "short read from " + path.string());
  return Tensor<T>(meta.shape, std::move(data));
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto side = path;
  side += ".json";
  return side;
}

void write_tensor(const std::filesystem::path& path, const TensorF32& t) { write_impl(path, t); }
void write_tensor(const std::filesystem::path& path, const TensorI32& t) { write_impl(path, t); }
void write_tensor(const std::filesystem::path& path, const TensorI8& t) { write_impl(path, t); }

std::string read_dtype(const std::filesystem::path& path) { return read_sidecar(path).dtype; }

TensorF32 read_tensor_f32(const std::filesystem::path& path) { return read_impl<float>(path); }
TensorI32 read_tensor_i32(const std::filesystem::path& path) { return read_impl<std::int32_t>(path); }
TensorI8 read_tensor_i8(const std::filesystem::path& path) { return read_impl<std::int8_t>(path); }

}  // namespace winoq::io
