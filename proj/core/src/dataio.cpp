#include "facets/dataio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "facets/error.hpp"
#include "facets/rng.hpp"

namespace facets {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be32(std::istream& is) {
    std::array<unsigned char, 4> b{};
    is.read(reinterpret_cast<char*>(b.data()), 4);
    if (!is) throw DataError("idx: truncated header");
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_be32(std::ostream& os, std::uint32_t v) {
    std::array<unsigned char, 4> b{static_cast<unsigned char>(v >> 24),
                                   static_cast<unsigned char>(v >> 16),
                                   static_cast<unsigned char>(v >> 8),
                                   static_cast<unsigned char>(v)};
    os.write(reinterpret_cast<const char*>(b.data()), 4);
}

std::ifstream open_binary(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open " + path.string());
    return is;
}

} // namespace

IdxImages load_idx_images(const std::filesystem::path& path) {
    std::ifstream is = open_binary(path);
    const std::uint32_t magic = read_be32(is);
    if (magic != kImagesMagic) throw DataError("idx images: bad magic");
    IdxImages img;
    img.count = read_be32(is);
    img.rows = read_be32(is);
    img.cols = read_be32(is);
    img.pixels.resize(img.count * img.rows * img.cols);
    is.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (is.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw DataError("idx images: truncated pixel data");
    return img;
}

IdxLabels load_idx_labels(const std::filesystem::path& path) {
    std::ifstream is = open_binary(path);
    const std::uint32_t magic = read_be32(is);
    if (magic != kLabelsMagic) throw DataError("idx labels: bad magic");
    IdxLabels lab;
    lab.count = read_be32(is);
    lab.labels.resize(lab.count);
    is.read(reinterpret_cast<char*>(lab.labels.data()),
            static_cast<std::streamsize>(lab.labels.size()));
    if (is.gcount() != static_cast<std::streamsize>(lab.labels.size()))
        throw DataError("idx labels: truncated label data");
    for (std::uint8_t l : lab.labels)
        if (l > 9) throw DataError("idx labels: label > 9");
    return lab;
}

void save_idx_images(const std::filesystem::path& path, const IdxImages& images) {
    check(images.pixels.size() == images.count * images.rows * images.cols,
          "idx images: pixel length mismatch");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write " + path.string());
    write_be32(os, kImagesMagic);
    write_be32(os, static_cast<std::uint32_t>(images.count));
    write_be32(os, static_cast<std::uint32_t>(images.rows));
    write_be32(os, static_cast<std::uint32_t>(images.cols));
    os.write(reinterpret_cast<const char*>(images.pixels.data()),
             static_cast<std::streamsize>(images.pixels.size()));
    if (!os) throw DataError("idx images: write failed");
}

void save_idx_labels(const std::filesystem::path& path, const IdxLabels& labels) {
    check(labels.labels.size() == labels.count, "idx labels: length mismatch");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write " + path.string());
    write_be32(os, kLabelsMagic);
    write_be32(os, static_cast<std::uint32_t>(labels.count));
    os.write(reinterpret_cast<const char*>(labels.labels.data()),
             static_cast<std::streamsize>(labels.labels.size()));
    if (!os) throw DataError("idx labels: write failed");
}

Dataset to_dataset(const IdxImages& images, const IdxLabels& labels,
                   std::size_t subset, std::uint64_t seed) {
    check(images.count == labels.count, "to_dataset: image/label count mismatch");
    check(subset <= images.count, "to_dataset: subset exceeds count");
    const std::size_t d = images.rows * images.cols;

    std::vector<std::size_t> pick;
    if (subset == images.count) {
        pick.resize(images.count);
        std::iota(pick.begin(), pick.end(), std::size_t{0});
    } else {
        // Stratified sampling without replacement: per-class quotas by
        // largest remainder, seeded shuffle within each class.
        std::array<std::vector<std::size_t>, 10> by_class;
        for (std::size_t i = 0; i < labels.count; ++i)
            by_class[labels.labels[i]].push_back(i);
        std::array<std::size_t, 10> quota{};
        std::array<double, 10> frac{};
        std::size_t assigned = 0;
        for (int c = 0; c < 10; ++c) {
            const double share =
                double(subset) * double(by_class[c].size()) / double(images.count);
            quota[c] = std::min(by_class[c].size(), std::size_t(share));
            frac[c] = share - double(quota[c]);
            assigned += quota[c];
        }
        while (assigned < subset) {
            int best = -1;
            for (int c = 0; c < 10; ++c) {
                if (quota[c] >= by_class[c].size()) continue;
                if (best < 0 || frac[c] > frac[best]) best = c;
            }
            check(best >= 0, "to_dataset: subset not reachable");
            ++quota[best];
            frac[best] = -1.0;
            ++assigned;
        }
        Rng rng(derive_seed(seed, 0x20));
        for (int c = 0; c < 10; ++c) {
            rng.shuffle(by_class[c]);
            pick.insert(pick.end(), by_class[c].begin(), by_class[c].begin() + quota[c]);
        }
        std::sort(pick.begin(), pick.end());
    }

    Dataset out;
    out.name = "idx";
    out.inputs = Matrix(pick.size(), d);
    out.labels.resize(pick.size());
    for (std::size_t r = 0; r < pick.size(); ++r) {
        const std::size_t i = pick[r];
        const std::uint8_t* px = images.pixels.data() + i * d;
        auto row = out.inputs.row(r);
        for (std::size_t j = 0; j < d; ++j) row[j] = double(px[j]) / 255.0;
        out.labels[r] = labels.labels[i];
    }
    return out;
}

namespace {

// 5x7 digit glyphs, one string per row, '#' = ink.
const char* kGlyphs[10][7] = {
    {" ### ", "#   #", "#  ##", "# # #", "##  #", "#   #", " ### "},
    {"  #  ", " ##  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "},
    {" ### ", "#   #", "    #", "  ## ", " #   ", "#    ", "#####"},
    {" ### ", "#   #", "    #", "  ## ", "    #", "#   #", " ### "},
    {"   # ", "  ## ", " # # ", "#  # ", "#####", "   # ", "   # "},
    {"#####", "#    ", "#### ", "    #", "    #", "#   #", " ### "},
    {" ### ", "#    ", "#    ", "#### ", "#   #", "#   #", " ### "},
    {"#####", "    #", "   # ", "  #  ", " #   ", " #   ", " #   "},
    {" ### ", "#   #", "#   #", " ### ", "#   #", "#   #", " ### "},
    {" ### ", "#   #", "#   #", " ####", "    #", "    #", " ### "},
};

} // namespace

std::pair<IdxImages, IdxLabels> make_synthetic_digits(std::size_t count,
                                                      std::uint64_t seed) {
    constexpr std::size_t side = 28;
    IdxImages img;
    img.count = count;
    img.rows = side;
    img.cols = side;
    img.pixels.assign(count * side * side, 0);
    IdxLabels lab;
    lab.count = count;
    lab.labels.resize(count);

    Rng rng(derive_seed(seed, 0x30));
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint8_t digit = static_cast<std::uint8_t>(rng.below(10));
        lab.labels[i] = digit;
        std::uint8_t* px = img.pixels.data() + i * side * side;

        // Glyph scaled to ~20x20, random shift, stroke intensity and noise.
        const double scale = rng.uniform(2.4, 3.2);
        const double ox = rng.uniform(-3.0, 3.0) + (side - 5.0 * scale) / 2.0;
        const double oy = rng.uniform(-3.0, 3.0) + (side - 7.0 * scale) / 2.0;
        const double ink = rng.uniform(160.0, 255.0);
        for (std::size_t y = 0; y < side; ++y)
            for (std::size_t x = 0; x < side; ++x) {
                const int gx = int(std::floor((double(x) - ox) / scale));
                const int gy = int(std::floor((double(y) - oy) / scale));
                double v = 0.0;
                if (gx >= 0 && gx < 5 && gy >= 0 && gy < 7 &&
                    kGlyphs[digit][gy][gx] == '#')
                    v = ink * rng.uniform(0.75, 1.0);
                v += rng.uniform(0.0, 28.0); // background noise
                px[y * side + x] = static_cast<std::uint8_t>(std::min(255.0, v));
            }
    }
    return {std::move(img), std::move(lab)};
}

Dataset load_csv_dataset(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open " + path.string());
    std::string header;
    if (!std::getline(is, header)) throw DataError("csv: empty file");

    std::size_t d = 0;
    bool has_label = false;
    {
        std::stringstream ss(header);
        std::string col;
        std::size_t idx = 0;
        while (std::getline(ss, col, ',')) {
            if (col == "label") {
                has_label = true;
            } else if (col == "x" + std::to_string(idx)) {
                ++idx;
            } else {
                throw DataError("csv: unexpected column '" + col + "'");
            }
        }
        d = idx;
    }
    if (d == 0) throw DataError("csv: no feature columns");

    std::vector<double> values;
    std::vector<std::uint8_t> labels;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        for (std::size_t j = 0; j < d; ++j) {
            if (!std::getline(ss, cell, ',')) throw DataError("csv: short row");
            values.push_back(std::stod(cell));
        }
        if (has_label) {
            if (!std::getline(ss, cell, ',')) throw DataError("csv: missing label");
            const int l = std::stoi(cell);
            if (l < 0 || l > 255) throw DataError("csv: label out of range");
            labels.push_back(static_cast<std::uint8_t>(l));
        }
    }
    Dataset out;
    out.name = path.stem().string();
    const std::size_t n = values.size() / d;
    out.inputs = Matrix(n, d, std::move(values));
    out.labels = std::move(labels);
    return out;
}

void save_csv_dataset(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    const std::size_t d = data.inputs.cols();
    const bool has_label = !data.labels.empty() || !data.targets.empty();
    for (std::size_t j = 0; j < d; ++j) {
        if (j) os << ',';
        os << 'x' << j;
    }
    if (has_label) os << ",label";
    os << '\n';
    char buf[32];
    for (std::size_t i = 0; i < data.inputs.rows(); ++i) {
        auto row = data.inputs.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            if (j) os << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
            os << buf;
        }
        if (has_label) os << ',' << dataset_label(data, i);
        os << '\n';
    }
    if (!os) throw DataError("csv: write failed");
}

void save_mlp(std::ostream& os, const Mlp& net) {
    os << "facets-mlp 1\n";
    os << "input_dim " << net.input_dim() << "\n";
    os << "layers " << net.layer_count() << "\n";
    char buf[32];
    for (std::size_t k = 0; k < net.layer_count(); ++k) {
        const Layer& l = net.layers()[k];
        os << "layer " << l.weight.rows() << ' ' << l.weight.cols() << ' '
           << (l.relu_after ? "relu" : "linear") << "\n";
        for (std::size_t i = 0; i < l.weight.rows(); ++i) {
            auto row = l.weight.row(i);
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (j) os << ' ';
                std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
                os << buf;
            }
            os << '\n';
        }
        for (std::size_t i = 0; i < l.bias.size(); ++i) {
            if (i) os << ' ';
            std::snprintf(buf, sizeof(buf), "%.17g", l.bias[i]);
            os << buf;
        }
        os << '\n';
    }
}

void save_mlp(const std::filesystem::path& path, const Mlp& net) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    save_mlp(os, net);
    if (!os) throw DataError("mlp: write failed");
}

Mlp load_mlp(std::istream& is) {
    std::string tag;
    int version = 0;
    is >> tag >> version;
    if (tag != "facets-mlp" || version != 1) throw DataError("mlp: bad header");
    std::string kw;
    std::size_t input_dim = 0, nlayers = 0;
    is >> kw >> input_dim;
    if (kw != "input_dim") throw DataError("mlp: expected input_dim");
    is >> kw >> nlayers;
    if (kw != "layers") throw DataError("mlp: expected layers");

    std::vector<Layer> layers;
    for (std::size_t k = 0; k < nlayers; ++k) {
        std::size_t rows = 0, cols = 0;
        std::string kind;
        is >> kw >> rows >> cols >> kind;
        if (kw != "layer" || (kind != "relu" && kind != "linear"))
            throw DataError("mlp: bad layer header");
        Layer l;
        l.relu_after = kind == "relu";
        std::vector<double> w(rows * cols);
        for (double& v : w) is >> v;
        l.weight = Matrix(rows, cols, std::move(w));
        l.bias.resize(rows);
        for (double& v : l.bias) is >> v;
        if (!is) throw DataError("mlp: truncated file");
        layers.push_back(std::move(l));
    }
    Mlp net(std::move(layers));
    if (net.input_dim() != input_dim) throw DataError("mlp: input_dim mismatch");
    return net;
}

Mlp load_mlp(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open " + path.string());
    return load_mlp(is);
}

} // namespace facets
