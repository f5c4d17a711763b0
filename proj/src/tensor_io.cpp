#include "fbcp/tensor_io.hpp"

#include <array>
#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "fbcp/errors.hpp"

namespace fbcp {

namespace {

constexpr std::array<char, 4> kTensorMagic{'B', 'T', 'F', '1'};
constexpr std::array<char, 4> kMaskMagic{'B', 'T', 'M', '1'};

static_assert(sizeof(double) == 8);

template <typename T>
void put_le(std::ostream& os, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <typename T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!is.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw FormatError("unexpected end of file");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void write_header(std::ostream& os, const std::array<char, 4>& magic, const Shape& shape) {
  os.write(magic.data(), magic.size());
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(shape.order()));
  for (std::size_t d : shape.dims()) put_le<std::uint32_t>(os, static_cast<std::uint32_t>(d));
}

Shape read_header(std::istream& is, const std::array<char, 4>& magic) {
  std::array<char, 4> got{};
  if (!is.read(got.data(), got.size()) || got != magic) {
    throw FormatError(std::string("bad magic, expected ") + std::string(magic.data(), 4));
  }
  const auto order = get_le<std::uint32_t>(is);
  if (order == 0 || order > kMaxOrder) {
    throw FormatError("unsupported tensor order " + std::to_string(order));
  }
  std::vector<std::size_t> dims(order);
  for (auto& d : dims) d = get_le<std::uint32_t>(is);
  try {
    return Shape(std::move(dims));
  } catch (const ShapeError& e) {
    throw FormatError(std::string("invalid extents: ") + e.what());
  }
}

void expect_eof(std::istream& is) {
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after payload");
}

}  // namespace

void write_tensor(std::ostream& os, const DenseTensor& t) {
  write_header(os, kTensorMagic, t.shape());
  for (double v : t.values()) put_le<double>(os, v);
}

DenseTensor read_tensor(std::istream& is) {
  Shape shape = read_header(is, kTensorMagic);
  std::vector<double> values(shape.numel());
  for (auto& v : values) v = get_le<double>(is);
  expect_eof(is);
  return DenseTensor(std::move(shape), std::move(values));
}

void write_mask(std::ostream& os, const ObservationMask& m) {
  write_header(os, kMaskMagic, m.shape());
  const auto flags = m.flags();
  os.write(reinterpret_cast<const char*>(flags.data()), static_cast<std::streamsize>(flags.size()));
}

ObservationMask read_mask(std::istream& is) {
  Shape shape = read_header(is, kMaskMagic);
  std::vector<std::uint8_t> flags(shape.numel());
  if (!is.read(reinterpret_cast<char*>(flags.data()), static_cast<std::streamsize>(flags.size()))) {
    throw FormatError("unexpected end of file");
  }
  for (auto f : flags) {
    if (f > 1) throw FormatError("mask payload byte must be 0 or 1");
  }
  expect_eof(is);
  return ObservationMask(std::move(shape), std::move(flags));
}

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return is;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot write " + path.string());
  return os;
}

}  // namespace

void save_tensor(const std::filesystem::path& path, const DenseTensor& t) {
  auto os = open_out(path);
  write_tensor(os, t);
}

DenseTensor load_tensor(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_tensor(is);
}

void save_mask(const std::filesystem::path& path, const ObservationMask& m) {
  auto os = open_out(path);
  write_mask(os, m);
}

ObservationMask load_mask(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_mask(is);
}

}  // namespace fbcp
