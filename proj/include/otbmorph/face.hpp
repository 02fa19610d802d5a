#pragma once

#include <string>
#include <variant>

#include "otbmorph/morph.hpp"

namespace otb {

/// A face sample in either representation, with a stable identifier.
struct FaceAsset {
  std::string id;
  std::variant<RasterFace, ParametricFace> repr;

  bool is_raster() const { return std::holds_alternative<RasterFace>(repr); }
  bool is_parametric() const { return std::holds_alternative<ParametricFace>(repr); }
};

/// Morphs `face` with `key` at weight alpha. Both must share a
/// representation. The result id records both inputs: "<face>~<key>@<alpha>".
FaceAsset morph(const FaceAsset& face, const FaceAsset& key, double alpha);

/// Flat real-valued view of a face: parameters, or raw channel values.
std::vector<double> face_values(const FaceAsset& face);

/// Replaces the values of `like` with `values` under a new id. Raster values
/// are rounded to nearest and clamped to [0, 255].
FaceAsset with_values(const FaceAsset& like, std::span<const double> values, std::string id);

}  // namespace otb
