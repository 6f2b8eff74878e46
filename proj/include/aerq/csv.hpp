#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "aerq/core.hpp"

namespace aerq {

/// Header `y,x1,...,xp`, one observation per line. `source` names the input
/// in error messages. Parse failures throw InputError with line and column.
Dataset read_csv(std::istream& in, const std::string& source = "<input>",
                 SizeMode mode = SizeMode::Strict);

Dataset load_csv(const std::filesystem::path& path, SizeMode mode = SizeMode::Strict);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// LF line endings, values in round-trip form.
void write_csv(std::ostream& out, const Dataset& data);

} // namespace aerq
