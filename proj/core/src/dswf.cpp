#include "dscale/dswf.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "dscale/error.hpp"

namespace dscale {
namespace {

constexpr std::string_view kComplexMagic = "DSWF";
constexpr std::string_view kRealMagic = "DSRF";

class Writer {
 public:
  void magic(std::string_view m) {
    for (char c : m) bytes_.push_back(static_cast<std::byte>(c));
  }
  template <class T>
  void put(T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                    std::conditional_t<sizeof(T) == 2,
                                                                       std::uint16_t,
                                                                       std::uint8_t>>>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bytes_.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xffu));
    }
  }
  std::vector<std::byte> take() { return std::move(bytes_); }

 private:
  std::vector<std::byte> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  std::string magic() {
    need(4);
    std::string m;
    for (int i = 0; i < 4; ++i) m.push_back(static_cast<char>(bytes_[pos_++]));
    return m;
  }
  template <class T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                    std::conditional_t<sizeof(T) == 2,
                                                                       std::uint16_t,
                                                                       std::uint8_t>>>;
    need(sizeof(U));
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bits |= static_cast<U>(static_cast<U>(bytes_[pos_++]) << (8 * i));
    }
    return std::bit_cast<T>(bits);
  }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("snapshot truncated at byte " + std::to_string(pos_));
  }
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

struct Header {
  Grid grid;
  double hbar = 1.0;
  double mass = 1.0;
  Frame frame = Frame::laboratory;
};

void write_header(Writer& w, std::string_view magic, const Grid& grid, double hbar, double mass,
                  Frame frame) {
  w.magic(magic);
  w.put<std::uint16_t>(kDswfVersion);
  w.put<std::uint16_t>(static_cast<std::uint16_t>(grid.dim()));
  for (const Axis& a : grid.axes()) w.put<std::uint32_t>(static_cast<std::uint32_t>(a.points));
  for (const Axis& a : grid.axes()) {
    w.put<double>(a.lower);
    w.put<double>(a.upper);
  }
  w.put<double>(hbar);
  w.put<double>(mass);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(frame));
}

Header read_header(Reader& r, std::string_view magic) {
  const std::string m = r.magic();
  if (m != magic) throw FormatError("bad magic '" + m + "', expected '" + std::string(magic) + "'");
  const auto version = r.get<std::uint16_t>();
  if (version != kDswfVersion) {
    throw FormatError("unsupported snapshot version " + std::to_string(version));
  }
  const auto dim = r.get<std::uint16_t>();
  if (dim < 1 || dim > kMaxDim) throw FormatError("unsupported dimension " + std::to_string(dim));
  std::vector<Axis> axes(dim);
  for (auto& a : axes) a.points = r.get<std::uint32_t>();
  for (auto& a : axes) {
    a.lower = r.get<double>();
    a.upper = r.get<double>();
  }
  Header h;
  try {
    h.grid = Grid(std::move(axes));
  } catch (const ConfigurationError& e) {
    throw FormatError(std::string("invalid grid in snapshot: ") + e.what());
  }
  h.hbar = r.get<double>();
  h.mass = r.get<double>();
  const auto frame = r.get<std::uint8_t>();
  if (frame > 1) throw FormatError("unknown frame tag " + std::to_string(frame));
  h.frame = static_cast<Frame>(frame);
  return h;
}

std::vector<std::byte> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<std::byte>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

std::vector<std::byte> encode_dswf(const WaveField& field) {
  Writer w;
  write_header(w, kComplexMagic, field.grid(), field.hbar(), field.mass(), field.frame());
  for (const Complex& a : field.amplitudes()) {
    w.put<double>(a.real());
    w.put<double>(a.imag());
  }
  return w.take();
}

WaveField decode_dswf(std::span<const std::byte> bytes) {
  Reader r(bytes);
  Header h = read_header(r, kComplexMagic);
  const std::size_t n = h.grid.size();
  if (r.remaining() != n * 16) {
    throw FormatError("payload holds " + std::to_string(r.remaining()) + " bytes, expected " +
                      std::to_string(n * 16));
  }
  std::vector<Complex> amplitudes(n);
  for (auto& a : amplitudes) {
    const double re = r.get<double>();
    const double im = r.get<double>();
    a = {re, im};
  }
  try {
    return WaveField(std::move(h.grid), std::move(amplitudes), h.hbar, h.mass, h.frame);
  } catch (const ConfigurationError& e) {
    throw FormatError(std::string("invalid constants in snapshot: ") + e.what());
  }
}

void write_dswf(const std::filesystem::path& path, const WaveField& field) {
  write_file(path, encode_dswf(field));
}

WaveField read_dswf(const std::filesystem::path& path) { return decode_dswf(read_file(path)); }

std::vector<std::byte> encode_real_field(const RealField& field) {
  if (field.values.size() != field.grid.size()) {
    throw GridMismatchError("real field value count does not match grid");
  }
  Writer w;
  write_header(w, kRealMagic, field.grid, field.hbar, field.mass, field.frame);
  for (double v : field.values) w.put<double>(v);
  return w.take();
}

RealField decode_real_field(std::span<const std::byte> bytes) {
  Reader r(bytes);
  Header h = read_header(r, kRealMagic);
  const std::size_t n = h.grid.size();
  if (r.remaining() != n * 8) {
    throw FormatError("payload holds " + std::to_string(r.remaining()) + " bytes, expected " +
                      std::to_string(n * 8));
  }
  RealField out{std::move(h.grid), std::vector<double>(n), h.hbar, h.mass, h.frame};
  for (auto& v : out.values) v = r.get<double>();
  return out;
}

void write_real_field(const std::filesystem::path& path, const RealField& field) {
  write_file(path, encode_real_field(field));
}

RealField read_real_field(const std::filesystem::path& path) {
  return decode_real_field(read_file(path));
}

}  // namespace dscale
