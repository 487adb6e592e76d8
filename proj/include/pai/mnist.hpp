#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "pai/distribution.hpp"
#include "pai/errors.hpp"
#include "pai/network.hpp"
#include "pai/rng.hpp"

namespace pai {

/// Block-threshold abstraction of grayscale images: the image is split into
/// equal blocks, each block is flagged bright when its mean pixel value
/// exceeds the threshold, and the flag vector is the abstract cell.
struct ImageAbstractionConfig {
  std::size_t image_h = 28;
  std::size_t image_w = 28;
  std::size_t block_h = 7;
  std::size_t block_w = 7;
  int brightness_threshold = 127;
  int dark_value = 0;
  int bright_value = 255;
  std::size_t cell_cap = std::size_t{1} << 20;

  std::size_t groups_h() const { return image_h / block_h; }
  std::size_t groups_w() const { return image_w / block_w; }
  std::size_t group_count() const { return groups_h() * groups_w(); }
  std::size_t pixel_count() const { return image_h * image_w; }
  std::size_t cell_count() const { return std::size_t{1} << group_count(); }

  void validate() const {
    if (image_h == 0 || image_w == 0 || block_h == 0 || block_w == 0)
      throw ConfigError("image abstraction: shapes must be positive");
    if (image_h % block_h != 0 || image_w % block_w != 0)
      throw ConfigError("image abstraction: block shape must divide the image shape");
    if (brightness_threshold < 0 || brightness_threshold > 255)
      throw ConfigError("image abstraction: threshold must be in 0..255");
    if (group_count() >= 63 || cell_count() > cell_cap)
      throw ConfigError("image abstraction: 2^" + std::to_string(group_count()) +
                        " cells exceed the cap");
  }
};

using ImageCell = std::uint64_t;

/// Cell id of an image: one bit per block, block-major in row-major block
/// order, most significant bit = first block.
template <class Pixel>
ImageCell abstract_image(const std::vector<Pixel>& pixels, const ImageAbstractionConfig& cfg) {
  cfg.validate();
  if (pixels.size() != cfg.pixel_count())
    throw DimensionError("abstract_image: expected " + std::to_string(cfg.pixel_count()) +
                         " pixels, got " + std::to_string(pixels.size()));
  const std::size_t groups = cfg.group_count();
  ImageCell cell = 0;
  std::size_t block = 0;
  for (std::size_t gr = 0; gr < cfg.groups_h(); ++gr) {
    for (std::size_t gc = 0; gc < cfg.groups_w(); ++gc, ++block) {
      long long sum = 0;
      for (std::size_t r = 0; r < cfg.block_h; ++r)
        for (std::size_t c = 0; c < cfg.block_w; ++c)
          sum += static_cast<long long>(
              pixels[(gr * cfg.block_h + r) * cfg.image_w + (gc * cfg.block_w + c)]);
      // mean > threshold, compared in integers: sum > threshold * block area
      const bool bright =
          sum > static_cast<long long>(cfg.brightness_threshold) *
                    static_cast<long long>(cfg.block_h * cfg.block_w);
      if (bright) cell |= ImageCell{1} << (groups - 1 - block);
    }
  }
  return cell;
}

/// The block-constant image a cell concretizes to: every block entirely at
/// dark_value or bright_value according to its flag.
inline std::vector<int> concretize_cell(ImageCell cell, const ImageAbstractionConfig& cfg) {
  cfg.validate();
  std::vector<int> pixels(cfg.pixel_count(), cfg.dark_value);
  const std::size_t groups = cfg.group_count();
  std::size_t block = 0;
  for (std::size_t gr = 0; gr < cfg.groups_h(); ++gr) {
    for (std::size_t gc = 0; gc < cfg.groups_w(); ++gc, ++block) {
      if (!(cell & (ImageCell{1} << (groups - 1 - block)))) continue;
      for (std::size_t r = 0; r < cfg.block_h; ++r)
        for (std::size_t c = 0; c < cfg.block_w; ++c)
          pixels[(gr * cfg.block_h + r) * cfg.image_w + (gc * cfg.block_w + c)] =
              cfg.bright_value;
    }
  }
  return pixels;
}

struct LabeledImage {
  int label = 0;
  std::vector<int> pixels;  // 0..255
};

/// Kaggle digit-recognizer CSV: header label,pixel0,...,pixelN-1 then one
/// row per image.
inline std::vector<LabeledImage> load_mnist_csv(std::istream& in, std::size_t pixel_count) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("mnist csv: empty file", line_no);
  if (line.rfind("label,pixel0", 0) != 0)
    throw ParseError("mnist csv: expected header 'label,pixel0,...'", line_no);
  std::vector<LabeledImage> images;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    LabeledImage img;
    img.pixels.reserve(pixel_count);
    std::size_t start = 0;
    std::size_t field = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i != line.size() && line[i] != ',') continue;
      int value = 0;
      bool any = false;
      for (std::size_t j = start; j < i; ++j) {
        char ch = line[j];
        if (ch < '0' || ch > '9')
          throw ParseError("mnist csv: non-numeric field", line_no, j + 1);
        value = value * 10 + (ch - '0');
        any = true;
      }
      if (!any) throw ParseError("mnist csv: empty field", line_no, start + 1);
      if (field == 0) {
        img.label = value;
      } else {
        if (value > 255) throw ParseError("mnist csv: pixel value out of range", line_no);
        img.pixels.push_back(value);
      }
      ++field;
      start = i + 1;
    }
    if (img.pixels.size() != pixel_count)
      throw ParseError("mnist csv: expected " + std::to_string(pixel_count) + " pixels, got " +
                           std::to_string(img.pixels.size()),
                       line_no);
    images.push_back(std::move(img));
  }
  return images;
}

/// Empirical cell frequencies of a dataset; sparse over 2^groups cells.
template <class S>
Distribution<S> init_distribution(const std::vector<LabeledImage>& images,
                                  const ImageAbstractionConfig& cfg) {
  cfg.validate();
  if (images.empty()) throw ConfigError("init_distribution: empty dataset");
  std::vector<typename Distribution<S>::entry_type> entries;
  entries.reserve(images.size());
  const S weight = scalar_traits<S>::one() /
                   scalar_traits<S>::from_int(static_cast<long long>(images.size()));
  for (const auto& img : images)
    entries.emplace_back(static_cast<std::size_t>(abstract_image(img.pixels, cfg)), weight);
  return Distribution<S>(cfg.cell_count(), std::move(entries));
}

template <class S>
struct CellContribution {
  ImageCell cell;
  S mass;
  std::vector<S> class_frequencies;
};

template <class S>
struct ClassifierAnalysis {
  Distribution<S> class_distribution;           // over the network's classes
  std::vector<CellContribution<S>> per_cell;    // ordered by cell id
  std::size_t sample_count;
  std::uint64_t seed;
};

/// Density flow of the abstracted input towards predicted classes: for every
/// support cell, k concretization samples are classified by argmax (first
/// maximum wins) and their class frequencies are weighted by the cell mass.
template <class S>
ClassifierAnalysis<S> analyze_classifier(const Network& net, const Distribution<S>& cell_dist,
                                         const ImageAbstractionConfig& cfg, std::size_t k,
                                         std::uint64_t seed) {
  cfg.validate();
  if (k == 0) throw ConfigError("analyze_classifier: need k >= 1");
  if (net.input_width() != cfg.pixel_count())
    throw DimensionError("analyze_classifier: network input width " +
                         std::to_string(net.input_width()) + " does not match " +
                         std::to_string(cfg.pixel_count()) + " pixels");
  if (cell_dist.domain_size() != cfg.cell_count())
    throw DimensionError("analyze_classifier: distribution is not over the image cells");
  const std::size_t classes = net.output_width();
  std::vector<typename Distribution<S>::entry_type> class_mass;
  ClassifierAnalysis<S> analysis{Distribution<S>(classes, {}), {}, k, seed};
  const S k_scalar = scalar_traits<S>::from_int(static_cast<long long>(k));
  for (const auto& [cell_index, mass] : cell_dist.entries()) {
    const ImageCell cell = static_cast<ImageCell>(cell_index);
    CounterRng rng(seed, cell);
    std::vector<std::size_t> counts(classes, 0);
    for (std::size_t s = 0; s < k; ++s) {
      // The cell's concretization grid has one image per flag vector, so
      // every draw returns the same block-constant image.
      (void)rng.next();
      auto pixels = concretize_cell(cell, cfg);
      std::vector<S> x;
      x.reserve(pixels.size());
      for (int v : pixels) x.push_back(scalar_traits<S>::from_int(v));
      auto out = eval_network<S>(net, std::move(x));
      std::size_t best = 0;
      for (std::size_t c = 1; c < out.size(); ++c)
        if (out[c] > out[best]) best = c;
      ++counts[best];
    }
    CellContribution<S> contribution{cell, mass, std::vector<S>(classes, scalar_traits<S>::zero())};
    for (std::size_t c = 0; c < classes; ++c) {
      if (counts[c] == 0) continue;
      S freq = scalar_traits<S>::from_int(static_cast<long long>(counts[c])) / k_scalar;
      contribution.class_frequencies[c] = freq;
      class_mass.emplace_back(c, mass * freq);
    }
    analysis.per_cell.push_back(std::move(contribution));
  }
  analysis.class_distribution = Distribution<S>(classes, std::move(class_mass));
  return analysis;
}

}  // namespace pai
