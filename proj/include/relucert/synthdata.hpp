#pragma once

#include <cstdint>

#include "relucert/trainer.hpp"

namespace relucert {

/// Deterministic 28x28 digit corpus: ten glyph classes rendered from a
/// 5x7 font, upscaled, placed with positional jitter, intensity-scaled
/// and noised. Pixels are in [0,1] and quantize cleanly to bytes, so
/// the corpus round-trips through the IDX container.
Dataset synth_digits(std::size_t count, std::uint64_t seed);

/// Two linearly separable 2-D blobs in the unit square (labels 0 and 1),
/// centered at x=0.25 and x=0.75 with jitter bounded inside the margin.
Dataset synth_blobs2d(std::size_t count, std::uint64_t seed);

} // namespace relucert
