#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "facets/network.hpp"
#include "facets/trainer.hpp"

namespace facets {

/// IDX image container (big-endian header, magic 0x00000803).
struct IdxImages {
    std::size_t count = 0, rows = 0, cols = 0;
    std::vector<std::uint8_t> pixels; // count*rows*cols bytes
};

/// IDX label container (magic 0x00000801), every label < 10.
struct IdxLabels {
    std::size_t count = 0;
    std::vector<std::uint8_t> labels;
};

IdxImages load_idx_images(const std::filesystem::path& path);
IdxLabels load_idx_labels(const std::filesystem::path& path);
void save_idx_images(const std::filesystem::path& path, const IdxImages& images);
void save_idx_labels(const std::filesystem::path& path, const IdxLabels& labels);

/// Pixels scaled to [0,1], flattened row-major. subset < count draws a
/// seeded stratified sample without replacement (original order when
/// subset == count).
Dataset to_dataset(const IdxImages& images, const IdxLabels& labels,
                   std::size_t subset, std::uint64_t seed);

/// Deterministic 28x28 digit images (glyphs with random shift, thickness
/// and noise), for pipeline runs where no real digit data is on disk.
std::pair<IdxImages, IdxLabels> make_synthetic_digits(std::size_t count,
                                                      std::uint64_t seed);

/// CSV with header x0,...,x{d-1},label.
Dataset load_csv_dataset(const std::filesystem::path& path);
void save_csv_dataset(const std::filesystem::path& path, const Dataset& data);

/// Network weight file: decimal text, bit-exact round trip for doubles.
void save_mlp(std::ostream& os, const Mlp& net);
void save_mlp(const std::filesystem::path& path, const Mlp& net);
Mlp load_mlp(std::istream& is);
Mlp load_mlp(const std::filesystem::path& path);

} // namespace facets
