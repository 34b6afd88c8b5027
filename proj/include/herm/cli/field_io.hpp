#pragma once

#include <string>

#include "herm/cli/config.hpp"
#include "herm/grid.hpp"

namespace herm::cli {

/// Row-major dump of every sample (last axis fastest). CSV: '#' header lines with the grid
/// shape and axis order, a column header, then one row per sample holding the value (or
/// re,im for complex fields). JSON: {"grid": {...}, "values": [...]} with [re, im] pairs
/// for complex fields. Throws IoError.
void write_field(const ScalarField& field, const std::string& path, FieldFormat format);
/// Reads a file written by write_field; the grid is reconstructed from the header.
ScalarField read_field(const std::string& path);

/// 1-D slice through the origin along one axis: columns coordinate,value.
void write_slice_csv(const ScalarField& field, int axis, const std::string& path);

}  // namespace herm::cli
