#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "voxmat/grid.hpp"

// Volumes persist as a <stem>.json header plus a <stem>.raw payload.
// Payload is little-endian: IEEE-754 32-bit floats for f32, single bytes
// for u8, voxels in x-fastest order. Round-trips are bit-exact.

namespace voxmat {

enum class VolumeKind { Image, Mask, TrimapKind, Alpha };

struct VolumeHeader {
  std::array<int, 3> dims{0, 0, 0};
  std::array<double, 3> spacing_mm{1.0, 1.0, 1.0};
  std::string dtype;  // "f32" or "u8"
  std::string unit;
  VolumeKind kind = VolumeKind::Image;
};

using AnyVolume = std::variant<VolumeGrid, LabelMask, Trimap, AlphaMatte>;

namespace detail {

inline std::string kind_to_string(VolumeKind k) {
  switch (k) {
    case VolumeKind::Image: return "image";
    case VolumeKind::Mask: return "mask";
    case VolumeKind::TrimapKind: return "trimap";
    case VolumeKind::Alpha: return "alpha";
  }
  return "image";
}

inline void append_f32_le(std::vector<std::uint8_t>& out, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  out.push_back(static_cast<std::uint8_t>(bits & 0xff));
  out.push_back(static_cast<std::uint8_t>((bits >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>((bits >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((bits >> 24) & 0xff));
}

inline float read_f32_le(const std::uint8_t* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

inline void write_file(const std::filesystem::path& path,
                       const void* data, std::size_t bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open for writing: " + path.string());
  }
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) {
    throw IoError("cannot open for reading: " + path.string());
  }
  const auto size = in.tellg();
  in.seekg(0);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(size));
  if (size > 0) {
    in.read(reinterpret_cast<char*>(data.data()), size);
  }
  if (!in) {
    throw IoError("read failed: " + path.string());
  }
  return data;
}

inline void write_pair(const std::string& path_stem, const VolumeHeader& h,
                       const std::vector<std::uint8_t>& payload) {
  nlohmann::ordered_json j;
  j["dims"] = h.dims;
  j["spacing_mm"] = h.spacing_mm;
  j["dtype"] = h.dtype;
  j["order"] = "x-fastest";
  j["endianness"] = "little";
  j["unit"] = h.unit;
  j["kind"] = kind_to_string(h.kind);
  const std::string text = j.dump(2) + "\n";
  write_file(path_stem + ".json", text.data(), text.size());
  write_file(path_stem + ".raw", payload.data(), payload.size());
}

template <typename GridT>
inline std::vector<std::uint8_t> encode_f32(const GridT& g) {
  std::vector<std::uint8_t> payload;
  payload.reserve(g.values.size() * 4);
  for (float v : g.values) append_f32_le(payload, v);
  return payload;
}

}  // namespace detail

inline void write_volume(const VolumeGrid& vol, const std::string& path_stem) {
  require_nondegenerate(vol, "write_volume");
  if (vol.unit == Unit::Normalized) {
    for (std::size_t i = 0; i < vol.values.size(); ++i) {
      if (!(vol.values[i] >= 0.0f && vol.values[i] <= 1.0f)) {
        throw OutOfRangeValue("write_volume: normalized value out of [0,1] at voxel " +
                              std::to_string(i));
      }
    }
  }
  VolumeHeader h{vol.dims, vol.spacing,
                 "f32", vol.unit == Unit::HU ? "HU" : "normalized",
                 VolumeKind::Image};
  detail::write_pair(path_stem, h, detail::encode_f32(vol));
}

inline void write_volume(const AlphaMatte& a, const std::string& path_stem) {
  require_nondegenerate(a, "write_volume");
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (!(a.values[i] >= 0.0f && a.values[i] <= 1.0f)) {
      throw OutOfRangeValue("write_volume: alpha value out of [0,1] at voxel " +
                            std::to_string(i));
    }
  }
  VolumeHeader h{a.dims, a.spacing, "f32", "alpha", VolumeKind::Alpha};
  detail::write_pair(path_stem, h, detail::encode_f32(a));
}

inline void write_volume(const LabelMask& m, const std::string& path_stem) {
  require_nondegenerate(m, "write_volume");
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    if (m.values[i] > 1) {
      throw OutOfRangeValue("write_volume: mask value not in {0,1} at voxel " +
                            std::to_string(i));
    }
  }
  VolumeHeader h{m.dims, m.spacing, "u8", "binary", VolumeKind::Mask};
  detail::write_pair(path_stem, h, m.values);
}

inline void write_volume(const Trimap& t, const std::string& path_stem) {
  require_nondegenerate(t, "write_volume");
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    if (t.values[i] > 2) {
      throw OutOfRangeValue("write_volume: trimap label not in {0,1,2} at voxel " +
                            std::to_string(i));
    }
  }
  VolumeHeader h{t.dims, t.spacing, "u8", "label", VolumeKind::TrimapKind};
  detail::write_pair(path_stem, h, t.values);
}

inline VolumeHeader read_header(const std::string& path_stem) {
  const auto text = detail::read_file(path_stem + ".json");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed header JSON at " + path_stem + ".json: " +
                     e.what());
  }
  VolumeHeader h;
  try {
    h.dims = j.at("dims").get<std::array<int, 3>>();
    h.spacing_mm = j.at("spacing_mm").get<std::array<double, 3>>();
    h.dtype = j.at("dtype").get<std::string>();
    h.unit = j.at("unit").get<std::string>();
    const auto order = j.at("order").get<std::string>();
    const auto endian = j.at("endianness").get<std::string>();
    const auto kind = j.at("kind").get<std::string>();
    if (order != "x-fastest") {
      throw UnsupportedFormat("unsupported voxel order: " + order);
    }
    if (endian != "little") {
      throw UnsupportedFormat("unsupported endianness: " + endian);
    }
    if (kind == "image") h.kind = VolumeKind::Image;
    else if (kind == "mask") h.kind = VolumeKind::Mask;
    else if (kind == "trimap") h.kind = VolumeKind::TrimapKind;
    else if (kind == "alpha") h.kind = VolumeKind::Alpha;
    else throw UnsupportedFormat("unknown volume kind: " + kind);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid header fields at " + path_stem + ".json: " +
                     e.what());
  }
  if (h.dims[0] <= 0 || h.dims[1] <= 0 || h.dims[2] <= 0) {
    throw UnsupportedFormat("header dims must be positive: " + path_stem);
  }
  if (h.dtype != "f32" && h.dtype != "u8") {
    throw UnsupportedFormat("unknown dtype: " + h.dtype);
  }
  const bool u8_kind =
      h.kind == VolumeKind::Mask || h.kind == VolumeKind::TrimapKind;
  if ((h.dtype == "u8") != u8_kind) {
    throw UnsupportedFormat("dtype " + h.dtype + " not allowed for kind " +
                            detail::kind_to_string(h.kind));
  }
  return h;
}

// The payload is validated against the header before decoding; readers never
// trust it (out-of-range alpha/mask/trimap values are rejected, not clamped).
inline AnyVolume read_volume(const std::string& path_stem) {
  const VolumeHeader h = read_header(path_stem);
  const auto payload = detail::read_file(path_stem + ".raw");
  const std::int64_t n =
      static_cast<std::int64_t>(h.dims[0]) * h.dims[1] * h.dims[2];
  const std::size_t expected =
      static_cast<std::size_t>(n) * (h.dtype == "f32" ? 4 : 1);
  if (payload.size() != expected) {
    throw CorruptFile("payload length " + std::to_string(payload.size()) +
                      " != expected " + std::to_string(expected) + " for " +
                      path_stem + ".raw");
  }

  if (h.kind == VolumeKind::Image) {
    VolumeGrid v;
    v.dims = h.dims;
    v.spacing = h.spacing_mm;
    if (h.unit == "HU") v.unit = Unit::HU;
    else if (h.unit == "normalized") v.unit = Unit::Normalized;
    else throw UnsupportedFormat("unknown image unit: " + h.unit);
    v.values.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      v.values[i] = detail::read_f32_le(payload.data() + 4 * i);
      if (!std::isfinite(v.values[i])) {
        throw OutOfRangeValue("image value not finite at voxel " +
                              std::to_string(i));
      }
      if (v.unit == Unit::Normalized &&
          !(v.values[i] >= 0.0f && v.values[i] <= 1.0f)) {
        throw OutOfRangeValue("normalized value out of [0,1] at voxel " +
                              std::to_string(i));
      }
    }
    return v;
  }
  if (h.kind == VolumeKind::Alpha) {
    AlphaMatte a;
    a.dims = h.dims;
    a.spacing = h.spacing_mm;
    a.values.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      a.values[i] = detail::read_f32_le(payload.data() + 4 * i);
      if (!(a.values[i] >= 0.0f && a.values[i] <= 1.0f)) {
        throw OutOfRangeValue("alpha value out of [0,1] at voxel " +
                              std::to_string(i));
      }
    }
    return a;
  }
  if (h.kind == VolumeKind::Mask) {
    LabelMask m;
    m.dims = h.dims;
    m.spacing = h.spacing_mm;
    m.values = payload;
    for (std::int64_t i = 0; i < n; ++i) {
      if (m.values[i] > 1) {
        throw OutOfRangeValue("mask value not in {0,1} at voxel " +
                              std::to_string(i));
      }
    }
    return m;
  }
  Trimap t;
  t.dims = h.dims;
  t.spacing = h.spacing_mm;
  t.values = payload;
  for (std::int64_t i = 0; i < n; ++i) {
    if (t.values[i] > 2) {
      throw OutOfRangeValue("trimap label not in {0,1,2} at voxel " +
                            std::to_string(i));
    }
  }
  return t;
}

inline VolumeGrid read_image(const std::string& path_stem) {
  auto any = read_volume(path_stem);
  if (auto* v = std::get_if<VolumeGrid>(&any)) return std::move(*v);
  throw UnsupportedFormat("expected kind image at " + path_stem);
}

inline LabelMask read_mask(const std::string& path_stem) {
  auto any = read_volume(path_stem);
  if (auto* v = std::get_if<LabelMask>(&any)) return std::move(*v);
  throw UnsupportedFormat("expected kind mask at " + path_stem);
}

inline Trimap read_trimap(const std::string& path_stem) {
  auto any = read_volume(path_stem);
  if (auto* v = std::get_if<Trimap>(&any)) return std::move(*v);
  throw UnsupportedFormat("expected kind trimap at " + path_stem);
}

inline AlphaMatte read_alpha(const std::string& path_stem) {
  auto any = read_volume(path_stem);
  if (auto* v = std::get_if<AlphaMatte>(&any)) return std::move(*v);
  throw UnsupportedFormat("expected kind alpha at " + path_stem);
}

}  // namespace voxmat
