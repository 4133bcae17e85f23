#include "mscope/tensor_io.hpp"

#include "mscope/error.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <regex>

namespace mscope {

PointCloud::PointCloud(RowMatrix data, std::string label)
    : data_(std::move(data)), label_(std::move(label)) {
    if (data_.rows() == 0) throw DataError("empty cloud");
    if (data_.cols() == 0) throw DataError("cloud has zero extrinsic dimension");
    if (!data_.allFinite()) throw DataError("non-finite value in cloud");
}

PointCloud PointCloud::select(std::span<const std::size_t> indices) const {
    RowMatrix out(static_cast<Eigen::Index>(indices.size()), data_.cols());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        if (indices[r] >= size()) throw ArgumentError("row index out of range");
        out.row(static_cast<Eigen::Index>(r)) = data_.row(static_cast<Eigen::Index>(indices[r]));
    }
    return PointCloud(std::move(out), label_);
}

DType parse_dtype(const std::string& name) {
    if (name == "f32") return DType::F32;
    if (name == "f64") return DType::F64;
    throw ArgumentError("unsupported dtype '" + name + "' (expected f32 or f64)");
}

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    for (std::size_t b = 0; b < sizeof(T); ++b)
        out.push_back(static_cast<std::uint8_t>((value >> (8 * b)) & 0xFFu));
}

template <typename T>
T get_le(const std::uint8_t* p) {
    T value = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) value |= static_cast<T>(p[b]) << (8 * b);
    return value;
}

double read_value(const std::uint8_t* p, DType dtype) {
    if (dtype == DType::F32) return static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(p)));
    return std::bit_cast<double>(get_le<std::uint64_t>(p));
}

std::size_t dtype_size(DType dtype) { return dtype == DType::F32 ? 4 : 8; }

// Fills a matrix from a little-endian payload, rejecting non-finite values.
RowMatrix read_payload(const std::uint8_t* p, std::uint64_t n, std::uint64_t d, DType dtype) {
    RowMatrix data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    double* dst = data.data();
    const std::size_t width = dtype_size(dtype);
    for (std::uint64_t i = 0; i < n * d; ++i) {
        const double v = read_value(p + i * width, dtype);
        if (!std::isfinite(v)) throw DataError("non-finite value in payload");
        dst[i] = v;
    }
    return data;
}

std::uint64_t checked_count(std::uint64_t n, std::uint64_t d, std::size_t width) {
    if (n != 0 && d > std::numeric_limits<std::uint64_t>::max() / n / width)
        throw DataError("declared shape overflows");
    return n * d * width;
}

} // namespace

std::vector<std::uint8_t> encode_gatm(const PointCloud& cloud, DType dtype) {
    if (cloud.empty()) throw DataError("empty cloud");
    const auto& m = cloud.data();
    if (!m.allFinite()) throw DataError("non-finite value in cloud");

    std::vector<std::uint8_t> out;
    out.reserve(kGatmHeaderSize + cloud.size() * cloud.dim() * dtype_size(dtype));
    for (char c : {'G', 'A', 'T', 'M'}) out.push_back(static_cast<std::uint8_t>(c));
    put_le<std::uint32_t>(out, kGatmVersion);
    out.push_back(static_cast<std::uint8_t>(dtype));
    put_le<std::uint64_t>(out, cloud.size());
    put_le<std::uint64_t>(out, cloud.dim());

    const double* src = m.data();
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        if (dtype == DType::F32) {
            const float f = static_cast<float>(src[i]);
            if (!std::isfinite(f)) throw DataError("value overflows f32");
            put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
        } else {
            put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(src[i]));
        }
    }
    return out;
}

PointCloud decode_gatm(const std::vector<std::uint8_t>& bytes, std::string label) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "GATM", 4) != 0) throw DataError("bad magic");
    if (bytes.size() < kGatmHeaderSize) throw DataError("truncated header");
    const auto version = get_le<std::uint32_t>(bytes.data() + 4);
    if (version != kGatmVersion) throw DataError("unsupported GATM version " + std::to_string(version));
    const std::uint8_t code = bytes[8];
    if (code > 1) throw DataError("unsupported dtype code " + std::to_string(code));
    const auto dtype = static_cast<DType>(code);
    const auto n = get_le<std::uint64_t>(bytes.data() + 9);
    const auto d = get_le<std::uint64_t>(bytes.data() + 17);
    if (n == 0) throw DataError("empty cloud");
    if (d == 0) throw DataError("cloud has zero extrinsic dimension");

    const std::uint64_t payload = checked_count(n, d, dtype_size(dtype));
    const std::uint64_t present = bytes.size() - kGatmHeaderSize;
    if (payload > present) throw DataError("truncated payload");
    if (payload < present) throw DataError("trailing bytes after payload");
    return PointCloud(read_payload(bytes.data() + kGatmHeaderSize, n, d, dtype), std::move(label));
}

PointCloud decode_npy(const std::vector<std::uint8_t>& bytes, std::string label) {
    static const std::uint8_t magic[] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
    if (bytes.size() < 10 || std::memcmp(bytes.data(), magic, sizeof magic) != 0)
        throw DataError("bad magic");
    if (bytes[6] != 1 || bytes[7] != 0)
        throw DataError("unsupported .npy version " + std::to_string(bytes[6]) + "." +
                        std::to_string(bytes[7]));
    const std::size_t header_len = get_le<std::uint16_t>(bytes.data() + 8);
    if (bytes.size() < 10 + header_len) throw DataError("truncated header");
    const std::string header(reinterpret_cast<const char*>(bytes.data() + 10), header_len);

    std::smatch m;
    if (!std::regex_search(header, m, std::regex(R"('descr'\s*:\s*'([^']*)')")))
        throw DataError(".npy header lacks descr");
    const std::string descr = m[1];
    DType dtype;
    if (descr == "<f8" || (descr == "=f8" && std::endian::native == std::endian::little))
        dtype = DType::F64;
    else if (descr == "<f4" || (descr == "=f4" && std::endian::native == std::endian::little))
        dtype = DType::F32;
    else
        throw DataError("unsupported dtype '" + descr + "'");

    if (!std::regex_search(header, m, std::regex(R"('fortran_order'\s*:\s*(True|False))")))
        throw DataError(".npy header lacks fortran_order");
    if (m[1] == "True") throw DataError("Fortran-order arrays are not supported");

    if (!std::regex_search(header, m, std::regex(R"('shape'\s*:\s*\(\s*(\d+)\s*,\s*(\d+)\s*,?\s*\))")))
        throw DataError("only 2-D arrays are supported");
    const std::uint64_t n = std::stoull(m[1]);
    const std::uint64_t d = std::stoull(m[2]);
    if (n == 0) throw DataError("empty cloud");
    if (d == 0) throw DataError("cloud has zero extrinsic dimension");

    const std::uint64_t payload = checked_count(n, d, dtype_size(dtype));
    const std::uint64_t present = bytes.size() - 10 - header_len;
    if (payload > present) throw DataError("truncated payload");
    if (payload < present) throw DataError("trailing bytes after payload");
    return PointCloud(read_payload(bytes.data() + 10 + header_len, n, d, dtype), std::move(label));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw DataError("read failure on " + path.string());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failure on " + path.string());
}

void save_pointcloud(const PointCloud& cloud, const std::filesystem::path& path, DType dtype) {
    write_file_bytes(path, encode_gatm(cloud, dtype));
}

PointCloud load_pointcloud(const std::filesystem::path& path) {
    auto bytes = read_file_bytes(path);
    if (!bytes.empty() && bytes[0] == 0x93) return decode_npy(bytes, path.stem().string());
    return decode_gatm(bytes, path.stem().string());
}

} // namespace mscope
