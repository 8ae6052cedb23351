#include "topoboost/image.hpp"

#include <string>

#include "topoboost/error.hpp"

namespace topoboost {

namespace {

void check_values(std::span<const double> data) {
  for (double v : data) {
    // Written so that NaN fails too.
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "pixel intensity outside [0,1]: " + std::to_string(v));
    }
  }
}

}  // namespace

Image::Image(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::BadChannelCount,
                "image must have 1 or 3 channels, got " + std::to_string(channels));
  }
  if (data_.size() != height * width * channels) {
    throw Error(ErrorCode::InvalidArgument, "image data length does not match H*W*C");
  }
  check_values(data_);
}

GrayImage::GrayImage(std::size_t height, std::size_t width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (data_.size() != height * width) {
    throw Error(ErrorCode::InvalidArgument, "gray image data length does not match H*W");
  }
  check_values(data_);
}

}  // namespace topoboost
