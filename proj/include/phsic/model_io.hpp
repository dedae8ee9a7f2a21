#pragma once

#include "phsic/feature_estimator.hpp"
#include "phsic/icd_estimator.hpp"
#include "phsic/naive_estimator.hpp"

#include <string>
#include <variant>

namespace phsic {

// On-disk model envelope:
//   "PHSC" | u32 version | u8 estimator kind | payload | u32 CRC-32(payload)
// All integers little-endian; matrices are row-major 64-bit floats. The ICD
// payload carries the scoring state (pivots, pivot rows, means, cross matrix)
// but not the n x d training factor itself.
struct SavedModel {
  enum class Kind : std::uint8_t { feature = 0, icd = 1, naive = 2 };

  KernelSpec kernel_x, kernel_y;
  bool normalized_inputs = false;  // sentence vectors were length-normalized at fit time
  bool lowercased = false;         // tokens were lowercased at fit time
  std::variant<FeatureModel, IcdModel, NaiveModel> model;

  Kind kind() const { return static_cast<Kind>(model.index()); }
};

void save_model(const SavedModel& saved, const std::string& path);
SavedModel load_model(const std::string& path);

// CRC-32 (IEEE), exposed for integrity tests.
std::uint32_t crc32(const unsigned char* data, std::size_t len);

}  // namespace phsic
