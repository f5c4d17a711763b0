#pragma once

#include <filesystem>
#include <iosfwd>

#include "fbcp/tensor.hpp"

namespace fbcp {

// BTF1: "BTF1", u32 LE order N, N x u32 LE extents, prod(I) x f64 LE values
// in column-major order. BTM1: same header with magic "BTM1" and a
// prod(I) x u8 payload (0 = missing, 1 = observed).

void write_tensor(std::ostream& os, const DenseTensor& t);
DenseTensor read_tensor(std::istream& is);
void write_mask(std::ostream& os, const ObservationMask& m);
ObservationMask read_mask(std::istream& is);

void save_tensor(const std::filesystem::path& path, const DenseTensor& t);
DenseTensor load_tensor(const std::filesystem::path& path);
void save_mask(const std::filesystem::path& path, const ObservationMask& m);
ObservationMask load_mask(const std::filesystem::path& path);

}  // namespace fbcp
