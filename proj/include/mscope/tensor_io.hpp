#pragma once

#include "mscope/point_cloud.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mscope {

enum class DType : std::uint8_t { F32 = 0, F64 = 1 };

DType parse_dtype(const std::string& name);

/**
 * GATM layout (all integers little-endian):
 *
 *   0..3   "GATM"
 *   4..7   u32 version (1)
 *   8      u8 dtype code (0 = f32, 1 = f64)
 *   9..16  u64 N
 *   17..24 u64 D
 *   25..   N*D values, row-major
 */
inline constexpr std::uint32_t kGatmVersion = 1;
inline constexpr std::size_t kGatmHeaderSize = 25;

std::vector<std::uint8_t> encode_gatm(const PointCloud& cloud, DType dtype);
PointCloud decode_gatm(const std::vector<std::uint8_t>& bytes, std::string label = {});

/// Parses a NumPy v1.0 container holding a 2-D C-order f4/f8 array.
PointCloud decode_npy(const std::vector<std::uint8_t>& bytes, std::string label = {});

void save_pointcloud(const PointCloud& cloud, const std::filesystem::path& path, DType dtype);

/// Loads a GATM or .npy file; the format is detected from the leading magic bytes.
PointCloud load_pointcloud(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

} // namespace mscope
