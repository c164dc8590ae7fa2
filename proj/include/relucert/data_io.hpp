#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "relucert/network.hpp"
#include "relucert/trainer.hpp"

namespace relucert {

/// Binary weight container, little-endian throughout:
///   magic "RLUC", u32 version=1, u32 num_layers M, u32 widths[M+1],
///   then per layer the row-major f64 weight matrix and the f64 bias.
/// A JSON sidecar `<path>.json` mirrors the header (widths, activation
/// "relu", class count) for human inspection; loading reads only the
/// binary file. Round-trips are bit-exact.
void save_weights(const MlpNetwork& net, const std::filesystem::path& path);
MlpNetwork load_weights(const std::filesystem::path& path);

struct IdxImages {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    Matrix data; // count x (rows*cols), pixels scaled to [0,1]
};

/// IDX containers as distributed with MNIST: big-endian headers, magic
/// 0x00000803 for images and 0x00000801 for labels.
IdxImages load_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path);

/// Inverse writers (pixels rounded back to bytes); used for fixtures and
/// the synthetic datasets.
void write_idx_images(const Matrix& images, std::size_t rows, std::size_t cols,
                      const std::filesystem::path& path);
void write_idx_labels(const std::vector<std::uint8_t>& labels, const std::filesystem::path& path);

/// One certified sample. Unset optionals print as empty CSV cells
/// (db_value stays empty for depths other than 2, attack distances when
/// attacks were not run).
struct CertRecord {
    std::size_t sample_id = 0;
    std::size_t true_label = 0;
    std::size_t predicted = 0;
    double p_min = 0.0;
    double d_min = 0.0;
    double simplex_value = 0.0;
    std::optional<double> db_value;
    std::optional<double> deepfool_dist;
    std::optional<double> ifgsm_dist;
    std::uint64_t wall_time_us = 0;
};

/// Fixed CSV column header.
std::string report_header();

/// RFC-4180-style CSV, one row per record sorted by sample_id, floats
/// with 9 significant digits. Deterministic: same records, same bytes.
void write_report(const std::vector<CertRecord>& records, const std::filesystem::path& path);

} // namespace relucert
