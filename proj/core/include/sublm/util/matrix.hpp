#pragma once

#include <cstddef>
#include <vector>

#include "sublm/error.hpp"

namespace sublm::util {

// Plain row-major double matrix for non-trainable numeric data
// (cepstra, filterbanks, probe features).
struct RealMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> v;

  RealMatrix() = default;
  RealMatrix(size_t r, size_t c, double fill = 0.0) : rows(r), cols(c), v(r * c, fill) {}

  double& at(size_t r, size_t c) { return v[r * cols + c]; }
  double at(size_t r, size_t c) const { return v[r * cols + c]; }
  const double* row(size_t r) const { return v.data() + r * cols; }
  double* row(size_t r) { return v.data() + r * cols; }

  void require_shape(size_t r, size_t c, const char* what) const {
    if (rows != r || cols != c)
      throw ValidationError(std::string(what) + ": shape mismatch");
  }
};

} // namespace sublm::util
