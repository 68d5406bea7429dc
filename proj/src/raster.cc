#include "chartlink/raster.h"

#include <png.h>

#include <cstring>
#include <fstream>
#include <sstream>

#include "chartlink/errors.h"

namespace chartlink {

Image DecodePng(std::string_view bytes) {
  png_image header;
  std::memset(&header, 0, sizeof header);
  header.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&header, bytes.data(), bytes.size())) {
    throw LoadError(std::string("invalid PNG: ") + header.message);
  }
  header.format = PNG_FORMAT_RGBA;
  Image image(static_cast<int>(header.width), static_cast<int>(header.height));
  if (!png_image_finish_read(&header, nullptr, image.rgba.data(), 0, nullptr)) {
    std::string message = header.message;
    png_image_free(&header);
    throw LoadError("invalid PNG: " + message);
  }
  return image;
}

Image ReadPng(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return DecodePng(buffer.str());
  } catch (const LoadError &e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

std::string EncodePng(const Image &image) {
  png_image header;
  std::memset(&header, 0, sizeof header);
  header.version = PNG_IMAGE_VERSION;
  header.width = image.width;
  header.height = image.height;
  header.format = PNG_FORMAT_RGBA;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&header, nullptr, &size, 0, image.rgba.data(), 0, nullptr)) {
    throw Error(std::string("PNG encoding failed: ") + header.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&header, out.data(), &size, 0, image.rgba.data(), 0,
                                 nullptr)) {
    throw Error(std::string("PNG encoding failed: ") + header.message);
  }
  out.resize(size);
  return out;
}

void WritePng(const Image &image, const std::filesystem::path &path) {
  std::string bytes = EncodePng(image);
  std::ofstream out(path, std::ios::binary);
  if (!out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw Error("cannot write " + path.string());
  }
}

}  // namespace chartlink
