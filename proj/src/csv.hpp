// SPDX-License-Identifier: Apache-2.0
#pragma once

// Small helpers shared by the CSV readers and writers.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace geotomo::csv {

/// 17 significant digits: enough for an exact binary64 round trip.
std::string format_double(double v);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

/// Parses a full token as a finite or non-finite double; throws Error(Format)
/// naming `what` on failure.
double parse_double(std::string_view token, std::string_view what);
long long parse_int(std::string_view token, std::string_view what);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

/// Strips a trailing '\r' so files written on other platforms still parse.
std::string_view trim_eol(std::string_view line);

}  // namespace geotomo::csv
