#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bai::cli {

// Runs one command. `args` excludes the program name. Returns the process
// exit code: 0 success, 1 domain or runtime error, 2 usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "a:b:step" (inclusive of b up to rounding) or "x,y,z". Throws UsageError.
std::vector<double> parse_grid(std::string_view text);

// Same syntax; every value must be an integer >= 1.
std::vector<std::uint64_t> parse_count_grid(std::string_view text);

// %.12g
std::string format_number(double x);

}  // namespace bai::cli
