#pragma once

#include <filesystem>
#include <iosfwd>

#include "ufb/grid.hpp"

namespace ufb {

/// Binary field container, little-endian, layout in docs/FORMAT.md:
///
///   offset  size  content
///        0     4  magic "UFBF"
///        4     4  uint32 format version (1)
///        8     4  uint32 spatial_dim
///       12     4  uint32 nx
///       16     4  uint32 nt
///       20     4  uint32 reserved (0)
///       24    32  float64 a, b, t0, t1
///       56     *  float64 values, row-major (time, x_1[, x_2])
inline constexpr char kFieldMagic[4] = {'U', 'F', 'B', 'F'};
inline constexpr unsigned kFieldFormatVersion = 1;
inline constexpr std::size_t kFieldHeaderBytes = 56;

void write_field(std::ostream& os, const SpaceTimeField& u);
SpaceTimeField read_field(std::istream& is);

void write_field(const std::filesystem::path& path, const SpaceTimeField& u);
SpaceTimeField read_field(const std::filesystem::path& path);

/// CSV with header `t,x,value` (1D) or `t,x1,x2,value` (2D); one row per node,
/// values printed with 17 significant digits.
void write_field_csv(std::ostream& os, const SpaceTimeField& u);
void write_field_csv(const std::filesystem::path& path, const SpaceTimeField& u);

}  // namespace ufb
