#pragma once

#include <filesystem>

#include "otbmorph/morph.hpp"

namespace otb {

/// Reads any PNG libpng understands, converted to 8-bit RGB.
Image read_png(const std::filesystem::path& path);
void write_png(const Image& image, const std::filesystem::path& path);

/// Landmark file: {"image_id": str, "width": int, "height": int, "points": [[x, y], ...]}.
struct LandmarkFile {
  std::string image_id;
  Landmarks landmarks;
};

LandmarkFile read_landmarks(const std::filesystem::path& path);
void write_landmarks(const LandmarkFile& file, const std::filesystem::path& path);

/// Image plus its landmark file; the landmark frame must match the image.
RasterFace load_raster_face(const std::filesystem::path& image_path,
                            const std::filesystem::path& landmark_path);

}  // namespace otb
