#include "otbmorph/image_io.hpp"

#include <png.h>

#include <fstream>

#include <fmt/format.h>
#include "json.hpp"

namespace otb {

Image read_png(const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw LoadError(fmt::format("{}: {}", path.string(), png.message));
  }
  png.format = PNG_FORMAT_RGB;
  Image img(static_cast<int>(png.width), static_cast<int>(png.height));
  if (!png_image_finish_read(&png, nullptr, img.data().data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw LoadError(fmt::format("{}: {}", path.string(), msg));
  }
  return img;
}

void write_png(const Image& image, const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.data().data(), 0, nullptr)) {
    throw Error(fmt::format("{}: {}", path.string(), png.message));
  }
}

LandmarkFile read_landmarks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(fmt::format("{}: cannot open landmark file", path.string()));
  try {
    const auto j = nlohmann::json::parse(in);
    LandmarkFile f;
    f.image_id = j.at("image_id").get<std::string>();
    f.landmarks.width = j.at("width").get<int>();
    f.landmarks.height = j.at("height").get<int>();
    for (const auto& p : j.at("points")) {
      if (p.size() != 2) throw LoadError(fmt::format("{}: landmark is not an [x, y] pair", path.string()));
      f.landmarks.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    f.landmarks.validate();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(fmt::format("{}: {}", path.string(), e.what()));
  } catch (const LoadError&) {
    throw;
  } catch (const Error& e) {
    throw LoadError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_landmarks(const LandmarkFile& file, const std::filesystem::path& path) {
  nlohmann::json j;
  j["image_id"] = file.image_id;
  j["width"] = file.landmarks.width;
  j["height"] = file.landmarks.height;
  j["points"] = nlohmann::json::array();
  for (const auto& p : file.landmarks.points) j["points"].push_back({p.x, p.y});
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("{}: cannot write landmark file", path.string()));
  out << j.dump(2) << '\n';
}

RasterFace load_raster_face(const std::filesystem::path& image_path,
                            const std::filesystem::path& landmark_path) {
  RasterFace face{read_png(image_path), read_landmarks(landmark_path).landmarks};
  try {
    face.validate();
  } catch (const Error& e) {
    throw LoadError(fmt::format("{}: {}", landmark_path.string(), e.what()));
  }
  return face;
}

}  // namespace otb
