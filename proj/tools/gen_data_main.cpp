// Writes synthetic datasets as IDX image/label files, so the train and
// certify workflows are runnable without external data.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "relucert/data_io.hpp"
#include "relucert/synthdata.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate synthetic IDX datasets"};

    std::string kind = "digits";
    std::size_t count = 10000;
    std::uint64_t seed = 0;
    std::string images_path, labels_path;
    app.add_option("--kind", kind, "digits (28x28, 10 classes) or blobs2d (2-D, 2 classes)")
        ->check(CLI::IsMember({"digits", "blobs2d"}));
    app.add_option("--count", count);
    app.add_option("--seed", seed);
    app.add_option("--out-images", images_path)->required();
    app.add_option("--out-labels", labels_path)->required();
    CLI11_PARSE(app, argc, argv);

    try {
        const relucert::Dataset data = kind == "digits" ? relucert::synth_digits(count, seed)
                                                        : relucert::synth_blobs2d(count, seed);
        if (kind == "digits") {
            relucert::write_idx_images(data.inputs, 28, 28, images_path);
        } else {
            relucert::write_idx_images(data.inputs, 1, 2, images_path);
        }
        std::vector<std::uint8_t> labels(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            labels[i] = static_cast<std::uint8_t>(data.labels[i]);
        }
        relucert::write_idx_labels(labels, labels_path);
        std::printf("wrote %zu %s samples -> %s, %s\n", data.size(), kind.c_str(),
                    images_path.c_str(), labels_path.c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
