#include "otbmorph/face.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace otb {

FaceAsset morph(const FaceAsset& face, const FaceAsset& key, double alpha) {
  std::string id = fmt::format("{}~{}@{}", face.id, key.id, alpha);
  if (const auto* a = std::get_if<ParametricFace>(&face.repr)) {
    const auto* b = std::get_if<ParametricFace>(&key.repr);
    if (b == nullptr) throw Error(fmt::format("cannot morph parametric face {} with raster key {}", face.id, key.id));
    return {std::move(id), morph_parametric(*a, *b, alpha)};
  }
  const auto* b = std::get_if<RasterFace>(&key.repr);
  if (b == nullptr) throw Error(fmt::format("cannot morph raster face {} with parametric key {}", face.id, key.id));
  return {std::move(id), morph_raster(std::get<RasterFace>(face.repr), *b, alpha)};
}

std::vector<double> face_values(const FaceAsset& face) {
  if (const auto* p = std::get_if<ParametricFace>(&face.repr)) return p->params;
  const auto data = std::get<RasterFace>(face.repr).pixels.data();
  return {data.begin(), data.end()};
}

FaceAsset with_values(const FaceAsset& like, std::span<const double> values, std::string id) {
  if (std::holds_alternative<ParametricFace>(like.repr)) {
    return {std::move(id), ParametricFace{{values.begin(), values.end()}}};
  }
  RasterFace raster = std::get<RasterFace>(like.repr);
  auto data = raster.pixels.data();
  if (values.size() != data.size()) {
    throw DimensionMismatchError(fmt::format("{} values for a raster of {} channels", values.size(), data.size()));
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = static_cast<std::uint8_t>(std::clamp(std::floor(values[i] + 0.5), 0.0, 255.0));
  }
  return {std::move(id), std::move(raster)};
}

}  // namespace otb
