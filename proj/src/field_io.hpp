#pragma once

// Binary field files: "MSLF", u16 version (=1), u8 dtype (0 float64,
// 1 complex128), u8 ndim, u32 dims per axis, raw little-endian values in
// row-major order (last axis fastest).

#include <string>
#include <variant>

#include "grid.hpp"

namespace mslab {

using AnyField = std::variant<RealField, ComplexField>;

void write_field(const std::string& path, const RealField& f);
void write_field(const std::string& path, const ComplexField& f);
std::string encode_field(const RealField& f);
std::string encode_field(const ComplexField& f);

// The format carries no box length; the caller supplies L.
AnyField read_field(const std::string& path, double L = 1.0);
AnyField decode_field(const std::string& bytes, double L = 1.0);

}  // namespace mslab
