// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "zeroswot/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>

#include "zeroswot/error.hpp"

namespace zeroswot {
namespace {

constexpr char kMagic[8] = {'Z', 'S', 'W', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void PutLe(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  }
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T GetLe(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw Error(ErrorCode::kFormat, "truncated checkpoint");
  }
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
  return v;
}

void Write(const std::filesystem::path& path, std::span<const Parameter* const> params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof(kMagic));
  PutLe<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
  for (const Parameter* p : params) {
    PutLe<std::uint32_t>(os, static_cast<std::uint32_t>(p->name.size()));
    os.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    PutLe<std::uint32_t>(os, static_cast<std::uint32_t>(p->value.shape().size()));
    for (std::size_t d : p->value.shape()) PutLe<std::uint64_t>(os, d);
    PutLe<std::uint8_t>(os, p->frozen ? 1 : 0);
  }
  for (const Parameter* p : params) {
    for (double v : p->value.values()) PutLe<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v));
  }
  if (!os) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace

void WriteCheckpoint(const std::filesystem::path& path, std::span<const Parameter> params) {
  std::vector<const Parameter*> ptrs;
  for (const Parameter& p : params) ptrs.push_back(&p);
  Write(path, ptrs);
}

void WriteCheckpoint(const std::filesystem::path& path,
                     std::span<const Parameter* const> params) {
  Write(path, params);
}

std::vector<Parameter> ReadCheckpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kFormat, path.string() + " is not a checkpoint");
  }
  const auto count = GetLe<std::uint32_t>(is);
  std::vector<Parameter> out(count);
  std::vector<std::vector<std::size_t>> shapes(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto len = GetLe<std::uint32_t>(is);
    out[k].name.resize(len);
    if (!is.read(out[k].name.data(), len)) throw Error(ErrorCode::kFormat, "truncated name");
    const auto rank = GetLe<std::uint32_t>(is);
    for (std::uint32_t r = 0; r < rank; ++r) {
      shapes[k].push_back(static_cast<std::size_t>(GetLe<std::uint64_t>(is)));
    }
    out[k].frozen = GetLe<std::uint8_t>(is) != 0;
  }
  for (std::uint32_t k = 0; k < count; ++k) {
    Tensor t(shapes[k]);
    for (double& v : t.values()) v = std::bit_cast<double>(GetLe<std::uint64_t>(is));
    out[k].value = std::move(t);
  }
  return out;
}

void AssignCheckpoint(std::span<Parameter* const> model, std::span<const Parameter> ckpt) {
  std::map<std::string, const Parameter*> by_name;
  for (const Parameter& p : ckpt) by_name[p.name] = &p;
  for (Parameter* p : model) {
    auto it = by_name.find(p->name);
    if (it == by_name.end()) {
      throw Error(ErrorCode::kManifestMismatch, "checkpoint lacks " + p->name);
    }
    if (!it->second->value.SameShape(p->value)) {
      throw Error(ErrorCode::kManifestMismatch,
                  p->name + " shape " + it->second->value.ShapeString() + " vs model " +
                      p->value.ShapeString());
    }
    p->value = it->second->value;
  }
}

std::vector<Parameter> AverageCheckpoints(std::span<const std::vector<Parameter>> ckpts) {
  if (ckpts.empty()) throw Error(ErrorCode::kManifestMismatch, "no checkpoints to average");
  // Accumulate offsets from the first checkpoint so identical inputs
  // average to themselves bit for bit.
  std::vector<Parameter> avg = ckpts[0];
  std::vector<Tensor> offset;
  offset.reserve(avg.size());
  for (const Parameter& p : avg) offset.emplace_back(p.value.shape());
  for (std::size_t k = 1; k < ckpts.size(); ++k) {
    if (ckpts[k].size() != avg.size()) {
      throw Error(ErrorCode::kManifestMismatch, "checkpoint parameter counts differ");
    }
    std::map<std::string, const Parameter*> by_name;
    for (const Parameter& p : ckpts[k]) by_name[p.name] = &p;
    for (std::size_t j = 0; j < avg.size(); ++j) {
      const Parameter& p = avg[j];
      auto it = by_name.find(p.name);
      if (it == by_name.end() || !it->second->value.SameShape(p.value)) {
        throw Error(ErrorCode::kManifestMismatch, "manifest differs at " + p.name);
      }
      for (std::size_t i = 0; i < p.value.size(); ++i) {
        offset[j][i] += it->second->value[i] - p.value[i];
      }
    }
  }
  const auto k = static_cast<double>(ckpts.size());
  for (std::size_t j = 0; j < avg.size(); ++j) {
    for (std::size_t i = 0; i < avg[j].value.size(); ++i) avg[j].value[i] += offset[j][i] / k;
  }
  return avg;
}

std::uint64_t HashParameters(std::span<const Parameter* const> params) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (const Parameter* p : params) {
    mix(p->name.data(), p->name.size());
    for (std::size_t d : p->value.shape()) mix(&d, sizeof(d));
    for (double v : p->value.values()) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      mix(&bits, sizeof(bits));
    }
  }
  return h;
}

}  // namespace zeroswot
