#pragma once

#include "drcvar/milp/lp_model.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace drcvar::milp {

/// Serializes in the CPLEX LP text format; see docs/lp_format.md for the
/// exact subset. Every column is listed in the objective (zeros included) so
/// column order survives a round trip, and numbers use the shortest decimal
/// form that parses back to the same double.
std::string to_lp_string(const LpModel& model);
void write_lp(const LpModel& model, std::ostream& out);
/// Throws IoError with the path on failure.
void write_lp_file(const LpModel& model, const std::filesystem::path& path);

/// Parses the subset written by write_lp plus common spellings of the section
/// keywords. Throws InputError with a line number on malformed input.
LpModel parse_lp(const std::string& text);
LpModel read_lp_file(const std::filesystem::path& path);

} // namespace drcvar::milp
