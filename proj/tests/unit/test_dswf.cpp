#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "dscale/dswf.hpp"
#include "dscale/error.hpp"

using namespace dscale;

namespace {

template <class T>
T read_le(const std::vector<std::byte>& bytes, std::size_t offset) {
  T value{};
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

}  // namespace

TEST_SUITE("dswf") {
  TEST_CASE("header layout") {
    const Grid g = make_plane(-2, 2, 16, -1, 3, 32);
    const WaveField f = gaussian_packet(make_plane(-8, 8, 16, -8, 8, 32), {0, 0}, {1, 0}, 1.0,
                                        0.5, 2.0);
    const WaveField h(g, std::vector<Complex>(f.amplitudes().begin(), f.amplitudes().end()), 0.5,
                      2.0, Frame::center_of_mass);
    const auto bytes = encode_dswf(h);
    CHECK(std::memcmp(bytes.data(), "DSWF", 4) == 0);
    CHECK(read_le<std::uint16_t>(bytes, 4) == 1);
    CHECK(read_le<std::uint16_t>(bytes, 6) == 2);
    CHECK(read_le<std::uint32_t>(bytes, 8) == 16);
    CHECK(read_le<std::uint32_t>(bytes, 12) == 32);
    CHECK(read_le<double>(bytes, 16) == -2.0);
    CHECK(read_le<double>(bytes, 24) == 2.0);
    CHECK(read_le<double>(bytes, 32) == -1.0);
    CHECK(read_le<double>(bytes, 40) == 3.0);
    CHECK(read_le<double>(bytes, 48) == 0.5);
    CHECK(read_le<double>(bytes, 56) == 2.0);
    CHECK(static_cast<std::uint8_t>(bytes[64]) == 1);
    CHECK(bytes.size() == 65 + 16u * 32u * 16u);
    CHECK(read_le<double>(bytes, 65) == h[0].real());
    CHECK(read_le<double>(bytes, 73) == h[0].imag());
  }

  TEST_CASE("round trip through a file") {
    const Grid g = make_line(-10, 10, 64);
    const WaveField f = gaussian_packet(g, {1, 0}, {2, 0}, 1.0, 1.0, 3.0);
    const auto path = std::filesystem::temp_directory_path() / "dscale_unit_roundtrip.dswf";
    write_dswf(path, f);
    const WaveField back = read_dswf(path);
    CHECK(back.grid() == f.grid());
    CHECK(back.hbar() == f.hbar());
    CHECK(back.mass() == f.mass());
    CHECK(back.frame() == f.frame());
    CHECK(std::equal(back.amplitudes().begin(), back.amplitudes().end(), f.amplitudes().begin()));
    std::filesystem::remove(path);
  }

  TEST_CASE("real fields use their own magic") {
    RealField r;
    r.grid = make_line(0, 1, 16);
    r.values.assign(16, 0.25);
    r.values[3] = -1.5;
    const auto bytes = encode_real_field(r);
    CHECK(std::memcmp(bytes.data(), "DSRF", 4) == 0);
    const RealField back = decode_real_field(bytes);
    CHECK(back.values == r.values);
    CHECK(back.grid == r.grid);
    CHECK_THROWS_AS(decode_dswf(bytes), FormatError);
  }

  TEST_CASE("corrupt input is a format error") {
    const Grid g = make_line(-10, 10, 16);
    auto bytes = encode_dswf(gaussian_packet(make_line(-10, 10, 16), {0, 0}, {0, 0}, 1.5, 1, 1));
    (void)g;
    auto truncated = bytes;
    truncated.resize(truncated.size() - 3);
    CHECK_THROWS_AS(decode_dswf(truncated), FormatError);
    auto bad = bytes;
    bad[0] = std::byte{'X'};
    CHECK_THROWS_AS(decode_dswf(bad), FormatError);
    auto version = bytes;
    version[4] = std::byte{9};
    CHECK_THROWS_AS(decode_dswf(version), FormatError);
  }
}
