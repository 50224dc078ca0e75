#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dscale/wave_field.hpp"

namespace dscale {

// Binary snapshot layout (all little-endian):
//   magic "DSWF" | u16 version | u16 dim | u32 points[dim] |
//   f64 (lower, upper)[dim] | f64 hbar | f64 mass | u8 frame |
//   f64 (re, im) per node, row-major.
// Real-valued fields (actions, densities) use magic "DSRF" with an identical
// header followed by one f64 per node.
inline constexpr std::uint16_t kDswfVersion = 1;

std::vector<std::byte> encode_dswf(const WaveField& field);
WaveField decode_dswf(std::span<const std::byte> bytes);

void write_dswf(const std::filesystem::path& path, const WaveField& field);
WaveField read_dswf(const std::filesystem::path& path);

struct RealField {
  Grid grid;
  std::vector<double> values;
  double hbar = 1.0;
  double mass = 1.0;
  Frame frame = Frame::laboratory;
};

std::vector<std::byte> encode_real_field(const RealField& field);
RealField decode_real_field(std::span<const std::byte> bytes);
void write_real_field(const std::filesystem::path& path, const RealField& field);
RealField read_real_field(const std::filesystem::path& path);

}  // namespace dscale
