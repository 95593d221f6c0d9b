// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "zeroswot/tensor.hpp"

namespace zeroswot {

// Container layout (all integers little-endian):
//   "ZSWCKPT1"            8-byte magic
//   u32 count
//   count x { u32 name_len, name bytes, u32 rank, u64 dims[rank], u8 frozen }
//   count x row-major float64 payloads, in manifest order
void WriteCheckpoint(const std::filesystem::path& path, std::span<const Parameter> params);
void WriteCheckpoint(const std::filesystem::path& path,
                     std::span<const Parameter* const> params);
std::vector<Parameter> ReadCheckpoint(const std::filesystem::path& path);

/// Copies values by name into `model`. Every model parameter must be present
/// with the same shape, otherwise kManifestMismatch.
void AssignCheckpoint(std::span<Parameter* const> model, std::span<const Parameter> ckpt);

/// Arithmetic mean per parameter; manifests are matched by name, so file
/// order is irrelevant. Frozen flags come from the first checkpoint.
std::vector<Parameter> AverageCheckpoints(std::span<const std::vector<Parameter>> ckpts);

/// FNV-1a over names, shapes and raw float64 bits.
std::uint64_t HashParameters(std::span<const Parameter* const> params);

}  // namespace zeroswot
