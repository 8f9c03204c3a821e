#pragma once

#include <string>
#include <vector>

namespace dexp::csv {

/// Shortest decimal that round-trips to the same double ("nan"/"inf" for
/// non-finite values).
std::string format(double value);

std::string header(const std::vector<std::string>& columns);

/// Comma-joined row terminated by LF.
std::string row(const std::vector<double>& values);

}  // namespace dexp::csv
