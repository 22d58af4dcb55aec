#pragma once

#include <cstddef>
#include <string>

#include "vinecop/data_matrix.hpp"

namespace vinecop {

struct ScatterOptions {
  double cell = 160.0;             // pixels per panel
  std::size_t max_points = 5000;   // per data set; larger sets are thinned evenly
};

/// d x d scatter matrix: variable names on the diagonal, `points` drawn as
/// "+" markers, `overlay` (may be null) as grey dots underneath. Both must
/// share column names.
std::string scatter_matrix_svg(const DataMatrix& points, const DataMatrix* overlay,
                               const ScatterOptions& options = {});

}  // namespace vinecop
