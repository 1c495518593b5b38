#pragma once

// Small text helpers shared by the CSV, model and report writers.

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cpcapp {

/// Decimal with 17 significant digits; parses back to the identical double.
std::string format_double(double x);

/// Shortest decimal that round-trips, always with a fractional part ("1.0").
std::string format_short(double x);

/// Comma-joined format_double values.
std::string join_csv(std::span<const double> values);

std::vector<std::string_view> split(std::string_view line, char sep);

std::string_view trim(std::string_view s);

/// Strict parse of a whole field (surrounding whitespace allowed). Returns
/// false if the field is not a finite number.
bool parse_double(std::string_view field, double& out);

}  // namespace cpcapp
