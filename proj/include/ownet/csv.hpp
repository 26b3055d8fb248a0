#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ownet {

// Splits one CSV record. Handles RFC-4180 quoting: fields may be wrapped in
// double quotes, embedded quotes are doubled. No multi-line fields.
std::vector<std::string> split_csv_line(std::string_view line);

// Quotes a field if it contains a comma, quote, or newline.
std::string csv_escape(std::string_view field);

// Shortest decimal string that round-trips to the same double. Deterministic
// across runs; used by every text emitter so analytics outputs are
// byte-stable.
std::string format_double(double value);

} // namespace ownet
