#include "topoboost/codec.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "topoboost/error.hpp"

namespace topoboost::codec {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

[[noreturn]] void unreadable(const std::filesystem::path& path, const std::string& why) {
  throw Error(ErrorCode::UnreadableImage, "unreadable image " + path.string() + ": " + why);
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

std::vector<std::uint8_t> to_bytes(const Image& img) {
  std::vector<std::uint8_t> out(img.size());
  std::transform(img.data().begin(), img.data().end(), out.begin(), to_byte);
  return out;
}

Image from_bytes(std::size_t h, std::size_t w, std::size_t c, const std::vector<std::uint8_t>& bytes) {
  std::vector<double> data(bytes.size());
  std::transform(bytes.begin(), bytes.end(), data.begin(), [](std::uint8_t b) { return b / 255.0; });
  return Image(h, w, c, std::move(data));
}

std::uint32_t le32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t le16(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

void put32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

}  // namespace

bool is_image_path(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  return ext == ".png" || ext == ".bmp";
}

Image read_png(const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.string().c_str())) unreadable(path, png.message);
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    const std::string why = png.message;
    png_image_free(&png);
    unreadable(path, why);
  }
  return from_bytes(png.height, png.width, color ? 3 : 1, buffer);
}

void write_png(const std::filesystem::path& path, const Image& img) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::vector<std::uint8_t> bytes = to_bytes(img);
  if (!png_image_write_to_file(&png, path.string().c_str(), 0, bytes.data(), 0, nullptr)) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string() + ": " + png.message);
  }
}

Image read_bmp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) unreadable(path, "cannot open");
  const std::vector<std::uint8_t> b{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (b.size() < 54 || b[0] != 'B' || b[1] != 'M') unreadable(path, "not a BMP file");

  const std::uint32_t offset = le32(b, 10);
  const std::uint32_t dib_size = le32(b, 14);
  const auto width = static_cast<std::int32_t>(le32(b, 18));
  const auto height_raw = static_cast<std::int32_t>(le32(b, 22));
  const std::uint16_t bpp = le16(b, 28);
  const std::uint32_t compression = le32(b, 30);
  if (dib_size < 40) unreadable(path, "unsupported BMP header");
  if (compression != 0) unreadable(path, "compressed BMP is not supported");
  if (bpp != 8 && bpp != 24 && bpp != 32) unreadable(path, "unsupported bit depth " + std::to_string(bpp));
  if (width <= 0 || height_raw == 0) unreadable(path, "bad dimensions");

  const bool top_down = height_raw < 0;
  const auto w = static_cast<std::size_t>(width);
  const auto h = static_cast<std::size_t>(top_down ? -static_cast<std::int64_t>(height_raw) : height_raw);
  const std::size_t stride = (w * bpp / 8 + 3) / 4 * 4;
  if (offset > b.size() || b.size() - offset < stride * h) unreadable(path, "truncated pixel data");

  std::vector<std::array<std::uint8_t, 3>> palette;
  if (bpp == 8) {
    std::uint32_t colors = le32(b, 46);
    if (colors == 0) colors = 256;
    const std::size_t start = 14 + dib_size;
    if (colors > 256 || start + 4 * colors > offset) unreadable(path, "bad palette");
    for (std::uint32_t i = 0; i < colors; ++i) {
      palette.push_back({b[start + 4 * i + 2], b[start + 4 * i + 1], b[start + 4 * i]});
    }
  }
  const bool gray = bpp == 8 && std::all_of(palette.begin(), palette.end(), [](const auto& c) {
                      return c[0] == c[1] && c[1] == c[2];
                    });
  const std::size_t channels = gray ? 1 : 3;

  std::vector<std::uint8_t> bytes(h * w * channels);
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t src_row = top_down ? r : h - 1 - r;
    const std::uint8_t* src = b.data() + offset + src_row * stride;
    for (std::size_t c = 0; c < w; ++c) {
      std::uint8_t* dst = bytes.data() + (r * w + c) * channels;
      if (bpp == 8) {
        if (src[c] >= palette.size()) unreadable(path, "palette index out of range");
        const auto& rgb = palette[src[c]];
        if (gray) {
          dst[0] = rgb[0];
        } else {
          std::copy(rgb.begin(), rgb.end(), dst);
        }
      } else {
        const std::uint8_t* px = src + c * (bpp / 8);
        dst[0] = px[2];
        dst[1] = px[1];
        dst[2] = px[0];
      }
    }
  }
  return from_bytes(h, w, channels, bytes);
}

void write_bmp(const std::filesystem::path& path, const Image& img) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const bool gray = img.channels() == 1;
  const std::uint16_t bpp = gray ? 8 : 24;
  const std::size_t stride = (w * bpp / 8 + 3) / 4 * 4;
  const std::uint32_t palette_bytes = gray ? 256 * 4 : 0;
  const std::uint32_t offset = 54 + palette_bytes;
  const auto total = static_cast<std::uint32_t>(offset + stride * h);

  std::vector<std::uint8_t> b;
  b.reserve(total);
  b.push_back('B');
  b.push_back('M');
  put32(b, total);
  put32(b, 0);
  put32(b, offset);
  put32(b, 40);
  put32(b, static_cast<std::uint32_t>(w));
  put32(b, static_cast<std::uint32_t>(h));
  put16(b, 1);
  put16(b, bpp);
  put32(b, 0);
  put32(b, static_cast<std::uint32_t>(stride * h));
  put32(b, 2835);
  put32(b, 2835);
  put32(b, gray ? 256 : 0);
  put32(b, 0);
  if (gray) {
    for (int i = 0; i < 256; ++i) {
      for (int k = 0; k < 3; ++k) b.push_back(static_cast<std::uint8_t>(i));
      b.push_back(0);
    }
  }
  const std::vector<std::uint8_t> bytes = to_bytes(img);
  for (std::size_t rr = 0; rr < h; ++rr) {
    const std::size_t r = h - 1 - rr;
    std::size_t written = 0;
    for (std::size_t c = 0; c < w; ++c) {
      const std::uint8_t* px = bytes.data() + (r * w + c) * img.channels();
      if (gray) {
        b.push_back(px[0]);
        written += 1;
      } else {
        b.push_back(px[2]);
        b.push_back(px[1]);
        b.push_back(px[0]);
        written += 3;
      }
    }
    for (; written < stride; ++written) b.push_back(0);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

Image read_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".bmp") return read_bmp(path);
  unreadable(path, "unsupported extension");
}

void write_image(const std::filesystem::path& path, const Image& img) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return write_png(path, img);
  if (ext == ".bmp") return write_bmp(path, img);
  throw Error(ErrorCode::IoError, "output must end in .png or .bmp: " + path.string());
}

}  // namespace topoboost::codec
