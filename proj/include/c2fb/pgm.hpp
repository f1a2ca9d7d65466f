#pragma once

#include <string>

#include "c2fb/types.hpp"

namespace c2fb {

/// Binary P5 PGM with maxval 255. Header comments are accepted; errors carry
/// the byte offset where parsing failed.
Vector load_pgm(const std::string& path);
Vector parse_pgm(const std::string& bytes);

/// Clamps to [0, 255] and rounds to nearest.
void save_pgm(const std::string& path, const Vector& image);
std::string encode_pgm(const Vector& image);

}  // namespace c2fb
