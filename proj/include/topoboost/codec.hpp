#pragma once

#include <filesystem>

#include "topoboost/image.hpp"

namespace topoboost::codec {

/// Decodes an 8-bit PNG or BMP (chosen by extension, case-insensitive) into
/// [0,1] intensities. Grayscale sources give one channel, colour sources three.
/// Throws UnreadableImage naming the file.
Image read_image(const std::filesystem::path& path);

/// Encodes by extension (.png or .bmp). Values are rounded to 8 bits.
/// Throws IoError.
void write_image(const std::filesystem::path& path, const Image& img);

Image read_png(const std::filesystem::path& path);
Image read_bmp(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);
void write_bmp(const std::filesystem::path& path, const Image& img);

bool is_image_path(const std::filesystem::path& path);

}  // namespace topoboost::codec
