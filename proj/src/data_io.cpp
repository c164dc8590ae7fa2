#include "relucert/data_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace relucert {

namespace {

constexpr char kMagic[4] = {'R', 'L', 'U', 'C'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

template <typename T>
T byteswap(T value) {
    T out;
    auto* src = reinterpret_cast<const unsigned char*>(&value);
    auto* dst = reinterpret_cast<unsigned char*>(&out);
    for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = src[sizeof(T) - 1 - i];
    return out;
}

template <typename T>
void write_le(std::ostream& out, T value) {
    if constexpr (std::endian::native == std::endian::big) value = byteswap(value);
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool read_le(std::istream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) return false;
    if constexpr (std::endian::native == std::endian::big) value = byteswap(value);
    return true;
}

std::uint32_t read_be_u32(std::istream& in, const std::string& what) {
    std::uint32_t value = 0;
    in.read(reinterpret_cast<char*>(&value), sizeof(value));
    if (!in) {
        throw TruncatedFileError(what + ": truncated header", sizeof(value), 0);
    }
    if constexpr (std::endian::native == std::endian::little) value = byteswap(value);
    return value;
}

std::size_t file_size_of(const std::filesystem::path& path) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    return ec ? 0 : static_cast<std::size_t>(size);
}

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

} // namespace

void save_weights(const MlpNetwork& net, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("save_weights: cannot open " + path.string() + " for writing");
    }
    out.write(kMagic, 4);
    write_le(out, kVersion);
    write_le(out, static_cast<std::uint32_t>(net.depth()));
    for (std::size_t w : net.widths()) write_le(out, static_cast<std::uint32_t>(w));
    for (const Layer& l : net.layers()) {
        for (double v : l.weight.entries()) write_le(out, v);
        for (std::size_t i = 0; i < l.bias.dim(); ++i) write_le(out, l.bias[i]);
    }
    if (!out) {
        throw IoError("save_weights: write failed for " + path.string());
    }
    out.close();

    nlohmann::json manifest;
    manifest["format"] = "RLUC";
    manifest["version"] = kVersion;
    manifest["widths"] = net.widths();
    manifest["activation"] = "relu";
    manifest["num_classes"] = net.num_classes();
    std::ofstream side(path.string() + ".json", std::ios::trunc);
    side << manifest.dump(2) << "\n";
}

MlpNetwork load_weights(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("load_weights: cannot open " + path.string());
    }
    const std::size_t total_size = file_size_of(path);

    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw BadMagicError("load_weights: " + path.string() + " is not an RLUC weight file");
    }
    std::uint32_t version = 0;
    if (!read_le(in, version)) {
        throw TruncatedFileError("load_weights: truncated before version field", 8, total_size);
    }
    if (version != kVersion) {
        throw VersionError("load_weights: unsupported version " + std::to_string(version) +
                           " (expected " + std::to_string(kVersion) + ")");
    }
    std::uint32_t num_layers = 0;
    if (!read_le(in, num_layers)) {
        throw TruncatedFileError("load_weights: truncated before layer count", 12, total_size);
    }
    if (num_layers < 2 || num_layers > 1024) {
        throw ValidationError("load_weights: implausible layer count " + std::to_string(num_layers));
    }
    std::vector<std::size_t> widths(num_layers + 1);
    for (std::size_t i = 0; i < widths.size(); ++i) {
        std::uint32_t w = 0;
        if (!read_le(in, w)) {
            throw TruncatedFileError("load_weights: truncated inside width table",
                                     12 + 4 * widths.size(), total_size);
        }
        if (w == 0) {
            throw ValidationError("load_weights: zero width at position " + std::to_string(i));
        }
        widths[i] = w;
    }

    std::size_t payload_doubles = 0;
    for (std::size_t i = 1; i < widths.size(); ++i) {
        payload_doubles += widths[i] * widths[i - 1] + widths[i];
    }
    const std::size_t expected_size = 12 + 4 * widths.size() + 8 * payload_doubles;
    if (total_size < expected_size) {
        throw TruncatedFileError("load_weights: " + path.string() + " holds " +
                                     std::to_string(total_size) + " bytes but the width header needs " +
                                     std::to_string(expected_size),
                                 expected_size, total_size);
    }
    if (total_size > expected_size) {
        throw WidthMismatchError("load_weights: width header implies " +
                                 std::to_string(expected_size) + " bytes but " + path.string() +
                                 " holds " + std::to_string(total_size) +
                                 "; header and payload disagree");
    }

    std::vector<Layer> layers;
    layers.reserve(num_layers);
    for (std::size_t i = 1; i < widths.size(); ++i) {
        std::vector<double> w(widths[i] * widths[i - 1]);
        for (double& v : w) {
            if (!read_le(in, v)) {
                throw TruncatedFileError("load_weights: truncated inside layer " + std::to_string(i),
                                         expected_size, total_size);
            }
        }
        Vector bias(widths[i]);
        for (std::size_t r = 0; r < widths[i]; ++r) {
            if (!read_le(in, bias[r])) {
                throw TruncatedFileError("load_weights: truncated inside layer " + std::to_string(i),
                                         expected_size, total_size);
            }
        }
        layers.push_back({Matrix::from(widths[i], widths[i - 1], std::move(w)), std::move(bias)});
    }
    return MlpNetwork(std::move(layers));
}

IdxImages load_idx_images(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("load_idx_images: cannot open " + path.string());
    }
    const std::uint32_t magic = read_be_u32(in, "load_idx_images");
    if (magic != kIdxImagesMagic) {
        throw BadMagicError("load_idx_images: bad magic in " + path.string());
    }
    const std::uint32_t count = read_be_u32(in, "load_idx_images");
    const std::uint32_t rows = read_be_u32(in, "load_idx_images");
    const std::uint32_t cols = read_be_u32(in, "load_idx_images");
    if (rows == 0 || cols == 0 ||
        static_cast<std::uint64_t>(count) * rows * cols > (std::uint64_t(1) << 33)) {
        throw ValidationError("load_idx_images: implausible dimensions in " + path.string());
    }
    const std::size_t pixels = static_cast<std::size_t>(count) * rows * cols;
    std::vector<unsigned char> bytes(pixels);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(pixels));
    if (static_cast<std::size_t>(in.gcount()) != pixels) {
        throw TruncatedFileError("load_idx_images: expected " + std::to_string(pixels) +
                                     " pixel bytes, found " + std::to_string(in.gcount()),
                                 pixels + 16, static_cast<std::size_t>(in.gcount()) + 16);
    }

    IdxImages images;
    images.count = count;
    images.rows = rows;
    images.cols = cols;
    images.data = Matrix(count, static_cast<std::size_t>(rows) * cols);
    double* dst = images.data.data();
    for (std::size_t i = 0; i < pixels; ++i) dst[i] = static_cast<double>(bytes[i]) / 255.0;
    return images;
}

std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("load_idx_labels: cannot open " + path.string());
    }
    const std::uint32_t magic = read_be_u32(in, "load_idx_labels");
    if (magic != kIdxLabelsMagic) {
        throw BadMagicError("load_idx_labels: bad magic in " + path.string());
    }
    const std::uint32_t count = read_be_u32(in, "load_idx_labels");
    std::vector<std::uint8_t> labels(count);
    in.read(reinterpret_cast<char*>(labels.data()), count);
    if (static_cast<std::size_t>(in.gcount()) != count) {
        throw TruncatedFileError("load_idx_labels: expected " + std::to_string(count) +
                                     " label bytes, found " + std::to_string(in.gcount()),
                                 count + 8, static_cast<std::size_t>(in.gcount()) + 8);
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] > 9) {
            throw ValidationError("load_idx_labels: label " + std::to_string(labels[i]) +
                                  " at index " + std::to_string(i) + " exceeds 9");
        }
    }
    return labels;
}

void write_idx_images(const Matrix& images, std::size_t rows, std::size_t cols,
                      const std::filesystem::path& path) {
    if (images.cols() != rows * cols) {
        throw DimensionError("write_idx_images: row length " + std::to_string(images.cols()) +
                             " does not equal rows*cols = " + std::to_string(rows * cols));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("write_idx_images: cannot open " + path.string());
    }
    auto write_be = [&](std::uint32_t v) {
        if constexpr (std::endian::native == std::endian::little) v = byteswap(v);
        out.write(reinterpret_cast<const char*>(&v), 4);
    };
    write_be(kIdxImagesMagic);
    write_be(static_cast<std::uint32_t>(images.rows()));
    write_be(static_cast<std::uint32_t>(rows));
    write_be(static_cast<std::uint32_t>(cols));
    std::vector<unsigned char> bytes(images.entries().size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const double v = std::clamp(images.data()[i], 0.0, 1.0);
        bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

void write_idx_labels(const std::vector<std::uint8_t>& labels, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("write_idx_labels: cannot open " + path.string());
    }
    auto write_be = [&](std::uint32_t v) {
        if constexpr (std::endian::native == std::endian::little) v = byteswap(v);
        out.write(reinterpret_cast<const char*>(&v), 4);
    };
    write_be(kIdxLabelsMagic);
    write_be(static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
}

std::string report_header() {
    return "sample_id,true_label,predicted,p_min,d_min,simplex,db_cert,deepfool,ifgsm,wall_time_us";
}

void write_report(const std::vector<CertRecord>& records, const std::filesystem::path& path) {
    if (records.empty()) {
        throw ValidationError("write_report: no records");
    }
    std::vector<CertRecord> sorted = records;
    std::sort(sorted.begin(), sorted.end(),
              [](const CertRecord& a, const CertRecord& b) { return a.sample_id < b.sample_id; });

    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("write_report: cannot open " + path.string());
    }
    out << report_header() << "\n";
    for (const CertRecord& r : sorted) {
        out << r.sample_id << ',' << r.true_label << ',' << r.predicted << ','
            << format_double(r.p_min) << ',' << format_double(r.d_min) << ','
            << format_double(r.simplex_value) << ',';
        if (r.db_value) out << format_double(*r.db_value);
        out << ',';
        if (r.deepfool_dist) out << format_double(*r.deepfool_dist);
        out << ',';
        if (r.ifgsm_dist) out << format_double(*r.ifgsm_dist);
        out << ',' << r.wall_time_us << "\n";
    }
    if (!out) {
        throw IoError("write_report: write failed for " + path.string());
    }
}

} // namespace relucert
