#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>

#include "relucert/data_io.hpp"
#include "relucert/synthdata.hpp"
#include "oracles.hpp"

using namespace relucert;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("relucert_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void spit(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("weight files round-trip bit-exactly") {
    TempDir tmp;
    std::mt19937_64 rng(701);
    const MlpNetwork net = testoracle::random_net(rng, {5, 11, 7, 3});
    const fs::path path = tmp.path / "net.rluc";
    save_weights(net, path);
    const MlpNetwork loaded = load_weights(path);
    CHECK(loaded == net);

    // Sidecar manifest exists and is readable.
    const std::string manifest = slurp(path.string() + ".json");
    CHECK(manifest.find("\"relu\"") != std::string::npos);
    CHECK(manifest.find("RLUC") != std::string::npos);

    // Saving again produces identical bytes.
    const std::string first = slurp(path);
    save_weights(net, path);
    CHECK(slurp(path) == first);
}

TEST_CASE("weight loading rejects malformed files with distinct errors") {
    TempDir tmp;
    std::mt19937_64 rng(709);
    const MlpNetwork net = testoracle::random_net(rng, {3, 4, 2});
    const fs::path path = tmp.path / "net.rluc";
    save_weights(net, path);
    const std::string good = slurp(path);

    SUBCASE("bad magic") {
        std::string bad = good;
        bad[0] = 'X';
        spit(tmp.path / "bad_magic.rluc", bad);
        CHECK_THROWS_AS(load_weights(tmp.path / "bad_magic.rluc"), BadMagicError);
    }
    SUBCASE("unsupported version") {
        std::string bad = good;
        bad[4] = 9;
        spit(tmp.path / "bad_version.rluc", bad);
        CHECK_THROWS_AS(load_weights(tmp.path / "bad_version.rluc"), VersionError);
    }
    SUBCASE("truncation names expected and found byte counts") {
        const std::string cut = good.substr(0, good.size() - 5);
        spit(tmp.path / "cut.rluc", cut);
        try {
            load_weights(tmp.path / "cut.rluc");
            FAIL("expected TruncatedFileError");
        } catch (const TruncatedFileError& e) {
            CHECK(e.expected_bytes() == good.size());
            CHECK(e.found_bytes() == good.size() - 5);
        }
    }
    SUBCASE("width header disagreeing with the payload") {
        const std::string padded = good + std::string(8, '\0');
        spit(tmp.path / "padded.rluc", padded);
        CHECK_THROWS_AS(load_weights(tmp.path / "padded.rluc"), WidthMismatchError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_weights(tmp.path / "nope.rluc"), IoError);
    }
}

TEST_CASE("the checked-in IDX fixture parses to exact pixel values") {
    const fs::path dir = RELUCERT_FIXTURE_DIR;
    const IdxImages images = load_idx_images(dir / "two_images.idx");
    CHECK(images.count == 2);
    CHECK(images.rows == 2);
    CHECK(images.cols == 3);
    const double expected0[6] = {0, 255, 128, 7, 9, 11};
    const double expected1[6] = {1, 2, 3, 4, 5, 6};
    for (std::size_t p = 0; p < 6; ++p) {
        CHECK(images.data(0, p) == expected0[p] / 255.0);
        CHECK(images.data(1, p) == expected1[p] / 255.0);
    }
    const std::vector<std::uint8_t> labels = load_idx_labels(dir / "two_labels.idx");
    CHECK(labels == std::vector<std::uint8_t>{3, 7});
}

TEST_CASE("IDX parsing validates magic, truncation and label range") {
    TempDir tmp;
    SUBCASE("wrong image magic") {
        spit(tmp.path / "bad.idx", std::string("\x00\x00\x08\x01\x00\x00\x00\x00", 8));
        CHECK_THROWS_AS(load_idx_images(tmp.path / "bad.idx"), BadMagicError);
    }
    SUBCASE("truncated image payload") {
        std::string bytes("\x00\x00\x08\x03", 4);
        bytes += std::string("\x00\x00\x00\x02", 4); // 2 images
        bytes += std::string("\x00\x00\x00\x02", 4); // 2x2
        bytes += std::string("\x00\x00\x00\x02", 4);
        bytes += std::string(5, '\x01'); // needs 8 pixel bytes
        spit(tmp.path / "trunc.idx", bytes);
        CHECK_THROWS_AS(load_idx_images(tmp.path / "trunc.idx"), TruncatedFileError);
    }
    SUBCASE("label out of range") {
        std::string bytes("\x00\x00\x08\x01", 4);
        bytes += std::string("\x00\x00\x00\x02", 4);
        bytes += '\x03';
        bytes += '\x0A'; // 10 is not a digit label
        spit(tmp.path / "labels.idx", bytes);
        CHECK_THROWS_AS(load_idx_labels(tmp.path / "labels.idx"), ValidationError);
    }
}

TEST_CASE("IDX writers invert the loaders on quantized data") {
    TempDir tmp;
    const Dataset digits = synth_digits(25, 13);
    write_idx_images(digits.inputs, 28, 28, tmp.path / "imgs.idx");
    std::vector<std::uint8_t> labels(digits.size());
    for (std::size_t i = 0; i < digits.size(); ++i) {
        labels[i] = static_cast<std::uint8_t>(digits.labels[i]);
    }
    write_idx_labels(labels, tmp.path / "labels.idx");

    const IdxImages back = load_idx_images(tmp.path / "imgs.idx");
    REQUIRE(back.count == 25);
    CHECK(back.data == digits.inputs); // synth pixels sit on the byte grid
    CHECK(load_idx_labels(tmp.path / "labels.idx") == labels);
}

TEST_CASE("certification reports have a fixed header and deterministic bytes") {
    TempDir tmp;
    CertRecord r;
    r.sample_id = 4;
    r.true_label = 1;
    r.predicted = 0;
    r.p_min = 0.123456789123;
    r.d_min = 2.0;
    r.simplex_value = 0.123456789123;
    r.db_value = 0.05;
    // attacks not run: deepfool/ifgsm stay blank

    write_report({r}, tmp.path / "one.csv");
    const std::string text = slurp(tmp.path / "one.csv");
    CHECK(text == "sample_id,true_label,predicted,p_min,d_min,simplex,db_cert,deepfool,ifgsm,"
                  "wall_time_us\n"
                  "4,1,0,0.123456789,2,0.123456789,0.05,,,0\n");

    write_report({r}, tmp.path / "two.csv");
    CHECK(slurp(tmp.path / "two.csv") == text);

    CHECK_THROWS_AS(write_report({}, tmp.path / "empty.csv"), ValidationError);
}

TEST_CASE("reports sort records by sample id") {
    TempDir tmp;
    std::vector<CertRecord> records;
    for (std::size_t i = 0; i < 1000; ++i) {
        CertRecord r;
        r.sample_id = 999 - i; // reversed on purpose
        r.simplex_value = static_cast<double>(i);
        records.push_back(r);
    }
    write_report(records, tmp.path / "many.csv");
    std::ifstream in(tmp.path / "many.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == report_header());
    std::size_t lines = 0;
    long prev = -1;
    while (std::getline(in, line)) {
        ++lines;
        const long id = std::stol(line.substr(0, line.find(',')));
        CHECK(id > prev);
        prev = id;
    }
    CHECK(lines == 1000);
}

TEST_CASE("infinite attack distances are written as inf") {
    TempDir tmp;
    CertRecord r;
    r.sample_id = 0;
    r.deepfool_dist = std::numeric_limits<double>::infinity();
    write_report({r}, tmp.path / "inf.csv");
    const std::string text = slurp(tmp.path / "inf.csv");
    CHECK(text.find(",inf,") != std::string::npos);
}
