#pragma once

#include <string>

#include "liequant/fourier.hpp"
#include "liequant/quantization.hpp"

namespace liequant {

// Plain-text spectral format: header lines (group, band), then one record per
// irrep: label, dimension, row-major entries as "re im" decimal pairs.
void save_spectral(const SpectralCoefficients& c, const std::string& path);
SpectralCoefficients load_spectral(const std::string& path);

// CSV with per-point rows: coordinates, weight, re, im. Grid metadata in
// comment headers; loading rebuilds the grid and checks the node count.
void save_grid_function(const GridFunction& f, const std::string& path);
GridFunction load_grid_function(const std::string& path);

// Spectral format extended with one "mode" record per spatial mode.
void save_symbol(const Symbol& a, const std::string& path);
Symbol load_symbol(const std::string& path);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace liequant
