// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>

#include "field.hpp"

namespace geotomo {

// Field CSV: first line "h,Q"; then one "i,j,value" line per node for
// (i, j) in [-Q, Q]^2, i-major then j, values with 17 significant digits.

void write_field_csv(const ScalarField& field, std::ostream& out);
void write_field_csv(const ScalarField& field, const std::filesystem::path& path);

ScalarField read_field_csv(std::istream& in, bool require_positive = true);
ScalarField read_field_csv(const std::filesystem::path& path, bool require_positive = true);

}  // namespace geotomo
