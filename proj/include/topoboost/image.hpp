#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace topoboost {

/// Row-major image with interleaved channels, intensities in [0,1].
class Image {
 public:
  Image() = default;
  /// Throws BadChannelCount unless channels is 1 or 3, InvalidArgument when the
  /// data length or value range is wrong.
  Image(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }

  double at(std::size_t row, std::size_t col, std::size_t channel = 0) const {
    return data_[(row * width_ + col) * channels_ + channel];
  }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 1;
  std::vector<double> data_;
};

/// Single-channel image, intensities in [0,1].
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  double at(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

}  // namespace topoboost
