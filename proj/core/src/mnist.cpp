#include "qrobust/mnist.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace qrobust {

static_assert(std::endian::native == std::endian::little,
              "cache serialization assumes a little-endian host");

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes,
                        std::size_t offset, const std::string& path) {
    if (offset + 4 > bytes.size()) {
        throw std::runtime_error("truncated IDX file " + path +
                                 ": header field at byte offset " +
                                 std::to_string(offset) + " past end (" +
                                 std::to_string(bytes.size()) + " bytes)");
    }
    return (std::uint32_t(bytes[offset]) << 24) |
           (std::uint32_t(bytes[offset + 1]) << 16) |
           (std::uint32_t(bytes[offset + 2]) << 8) |
           std::uint32_t(bytes[offset + 3]);
}

void check_payload(const std::vector<std::uint8_t>& bytes, std::size_t header,
                   std::size_t payload, const std::string& path) {
    if (bytes.size() < header + payload) {
        throw std::runtime_error(
            "truncated IDX file " + path + ": expected " +
            std::to_string(header + payload) + " bytes, data ends at byte " +
            std::to_string(bytes.size()));
    }
}

char hex_digit(std::uint32_t v) {
    return static_cast<char>(v < 10 ? '0' + v : 'a' + (v - 10));
}

std::string hex32(std::uint32_t v) {
    std::string s = "0x";
    for (int shift = 28; shift >= 0; shift -= 4) {
        s += hex_digit((v >> shift) & 0xF);
    }
    return s;
}

}  // namespace

std::vector<RawImage> load_idx(const std::string& images_path,
                               const std::string& labels_path) {
    const std::vector<std::uint8_t> img_bytes = read_file(images_path);
    const std::vector<std::uint8_t> lbl_bytes = read_file(labels_path);

    const std::uint32_t img_magic = read_be32(img_bytes, 0, images_path);
    if (img_magic != kImagesMagic) {
        throw std::runtime_error("bad magic " + hex32(img_magic) +
                                 " in images file " + images_path +
                                 " (expected " + hex32(kImagesMagic) + ")");
    }
    const std::uint32_t lbl_magic = read_be32(lbl_bytes, 0, labels_path);
    if (lbl_magic != kLabelsMagic) {
        throw std::runtime_error("bad magic " + hex32(lbl_magic) +
                                 " in labels file " + labels_path +
                                 " (expected " + hex32(kLabelsMagic) + ")");
    }

    const std::uint32_t img_count = read_be32(img_bytes, 4, images_path);
    const std::uint32_t rows = read_be32(img_bytes, 8, images_path);
    const std::uint32_t cols = read_be32(img_bytes, 12, images_path);
    if (rows != kMnistSide || cols != kMnistSide) {
        throw std::runtime_error("images file " + images_path + " is " +
                                 std::to_string(rows) + "x" +
                                 std::to_string(cols) + ", expected 28x28");
    }
    const std::uint32_t lbl_count = read_be32(lbl_bytes, 4, labels_path);
    if (img_count != lbl_count) {
        throw std::runtime_error(
            "count mismatch: " + std::to_string(img_count) + " images vs " +
            std::to_string(lbl_count) + " labels");
    }

    constexpr std::size_t pixels = kMnistSide * kMnistSide;
    check_payload(img_bytes, 16, std::size_t(img_count) * pixels, images_path);
    check_payload(lbl_bytes, 8, lbl_count, labels_path);

    std::vector<RawImage> images(img_count);
    for (std::uint32_t i = 0; i < img_count; ++i) {
        std::memcpy(images[i].pixels.data(), img_bytes.data() + 16 + i * pixels,
                    pixels);
        const int label = lbl_bytes[8 + i];
        if (label > 9) {
            throw std::runtime_error("label " + std::to_string(label) +
                                     " at index " + std::to_string(i) +
                                     " out of range 0..9");
        }
        images[i].label = label;
    }
    return images;
}

std::vector<RawImage> filter_binary(const std::vector<RawImage>& images) {
    std::vector<RawImage> out;
    for (const RawImage& img : images) {
        if (img.label == 0 || img.label == 1) out.push_back(img);
    }
    return out;
}

Grid16 downscale_16(const RawImage& img) {
    constexpr int src = kMnistSide;  // 28
    constexpr int dst = 16;
    constexpr double ratio = double(src) / dst;  // 1.75
    Grid16 out{};
    for (int oy = 0; oy < dst; ++oy) {
        const double y0 = oy * ratio, y1 = (oy + 1) * ratio;
        for (int ox = 0; ox < dst; ++ox) {
            const double x0 = ox * ratio, x1 = (ox + 1) * ratio;
            double acc = 0.0;
            for (int sy = int(y0); sy < src && sy < y1; ++sy) {
                const double wy =
                    std::min<double>(sy + 1, y1) - std::max<double>(sy, y0);
                if (wy <= 0.0) continue;
                for (int sx = int(x0); sx < src && sx < x1; ++sx) {
                    const double wx =
                        std::min<double>(sx + 1, x1) - std::max<double>(sx, x0);
                    if (wx <= 0.0) continue;
                    acc += wy * wx * img.pixels[sy * src + sx];
                }
            }
            out[oy * dst + ox] = acc / (ratio * ratio);
        }
    }
    return out;
}

EncodedSample to_sample(const Grid16& grid, int label) {
    if (label != 0 && label != 1) {
        throw std::invalid_argument("sample label must be 0 or 1, got " +
                                    std::to_string(label));
    }
    double sum = 0.0;
    for (double v : grid) sum += v * v;
    if (sum <= 0.0) {
        throw std::invalid_argument("cannot normalize an all-zero image");
    }
    const double inv = 1.0 / std::sqrt(sum);
    EncodedSample sample;
    sample.features.reserve(grid.size());
    for (double v : grid) sample.features.push_back(v * inv);
    sample.label = label;
    return sample;
}

void save_cache(const std::string& path,
                std::span<const EncodedSample> samples) {
    if (samples.empty()) {
        throw std::invalid_argument("refusing to write an empty cache");
    }
    const std::uint32_t dim = static_cast<std::uint32_t>(samples[0].features.size());
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open cache file for writing: " + path);
    }
    out.write("QRB1", 4);
    const std::uint32_t count = static_cast<std::uint32_t>(samples.size());
    out.write(reinterpret_cast<const char*>(&count), 4);
    out.write(reinterpret_cast<const char*>(&dim), 4);
    for (const EncodedSample& s : samples) {
        if (s.features.size() != dim) {
            throw std::invalid_argument("inconsistent feature dimension in cache");
        }
        out.write(reinterpret_cast<const char*>(s.features.data()),
                  static_cast<std::streamsize>(dim * sizeof(double)));
        const std::uint8_t label = static_cast<std::uint8_t>(s.label);
        out.write(reinterpret_cast<const char*>(&label), 1);
    }
    if (!out) {
        throw std::runtime_error("failed writing cache file: " + path);
    }
}

std::vector<EncodedSample> load_cache(const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_file(path);
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "QRB1", 4) != 0) {
        throw std::runtime_error("file " + path +
                                 " is not a QRB1 dataset cache");
    }
    std::uint32_t count, dim;
    std::memcpy(&count, bytes.data() + 4, 4);
    std::memcpy(&dim, bytes.data() + 8, 4);
    const std::size_t record = std::size_t(dim) * sizeof(double) + 1;
    if (bytes.size() != 12 + std::size_t(count) * record) {
        throw std::runtime_error(
            "cache file " + path + " has " + std::to_string(bytes.size()) +
            " bytes, expected " + std::to_string(12 + std::size_t(count) * record));
    }
    std::vector<EncodedSample> samples(count);
    std::size_t offset = 12;
    for (std::uint32_t i = 0; i < count; ++i) {
        samples[i].features.resize(dim);
        std::memcpy(samples[i].features.data(), bytes.data() + offset,
                    dim * sizeof(double));
        offset += dim * sizeof(double);
        const std::uint8_t label = bytes[offset++];
        if (label > 1) {
            throw std::runtime_error("cache sample " + std::to_string(i) +
                                     " has label " + std::to_string(label) +
                                     ", expected 0 or 1");
        }
        samples[i].label = label;
        double norm2 = 0.0;
        for (double f : samples[i].features) norm2 += f * f;
        if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9) {
            throw std::runtime_error("cache sample " + std::to_string(i) +
                                     " is not unit-normalized (norm " +
                                     std::to_string(std::sqrt(norm2)) + ")");
        }
    }
    return samples;
}

}  // namespace qrobust
