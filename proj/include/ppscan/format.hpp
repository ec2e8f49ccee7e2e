#ifndef PPSCAN_FORMAT_HPP
#define PPSCAN_FORMAT_HPP

#include <cstdint>
#include <string>

namespace ppscan {

// Table values are displayed with two decimals, rounded half-up. All internal
// math stays in full precision; rounding happens once, at emission. Deltas are
// taken on the displayed values, so they are represented exactly as integer
// hundredths ("cents").

// Half-up rounding of a non-negative value to hundredths.
std::int64_t to_cents(double value);

// "1234.56" from integer hundredths (handles negatives).
std::string cents_to_string(std::int64_t cents);

// Round half-up and format with two decimals, e.g. 104.729 -> "104.73".
std::string format_2dp(double value);

// Signed delta rendering: +10.18 / -21.35 / 0.00 (zero carries no sign).
std::string format_delta(std::int64_t delta_cents);

// Half-up fixed-point with the given number of decimals ("0.9667" for 4).
std::string format_fixed(double value, int decimals);

// Inserts thousands separators into the integer part of an already formatted
// number ("3875.94" -> "3,875.94"); used by the human-facing tables.
std::string with_thousands(const std::string& number);

// Minimal CSV field quoting (commas, quotes, newlines).
std::string csv_escape(const std::string& field);

}  // namespace ppscan

#endif
