#pragma once

#include <filesystem>

#include "rnls/grid.hpp"

namespace rnls {

// Field file format v1: header line
//   # radial-field v1 r_max=<..> n=<..>
// followed by one node per line: `r value_re [value_im]`.
void save_field(const std::filesystem::path& path, const RadialField& u);

// Reconstructs the grid from the header; the grid kind is inferred from
// the node layout (uniform spacing vs scaled Bessel zeros).
RadialField load_field(const std::filesystem::path& path);

}  // namespace rnls
