#ifndef CHARTLINK_RASTER_H_
#define CHARTLINK_RASTER_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace chartlink {

// 8-bit RGBA image, rows top to bottom.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgba(static_cast<size_t>(w) * h * 4, 0) {}

  std::uint8_t *at(int x, int y) { return &rgba[(static_cast<size_t>(y) * width + x) * 4]; }
  const std::uint8_t *at(int x, int y) const {
    return &rgba[(static_cast<size_t>(y) * width + x) * 4];
  }
  bool operator==(const Image &) const = default;
};

// Decodes any PNG into RGBA. Throws LoadError on malformed data.
Image DecodePng(std::string_view bytes);
Image ReadPng(const std::filesystem::path &path);
std::string EncodePng(const Image &image);
void WritePng(const Image &image, const std::filesystem::path &path);

}  // namespace chartlink

#endif  // CHARTLINK_RASTER_H_
