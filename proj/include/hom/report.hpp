#pragma once
// Plain key=value reports: run summaries and theory tables.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hom/config.hpp"
#include "hom/core.hpp"

namespace hom {

// One `key=value` line per field, fixed order, extras last as `extra.<key>`.
// Doubles use the shortest round-trip form, so parse(format(s)) == s.
std::string format_summary(RunSummary const& summary);
RunSummary parse_summary(std::string_view text);

using ReportRows = std::vector<std::pair<std::string, double>>;

// P0, P_inf, V, chi, g2_ex and the (g2_ex, chi) prediction for a TheoryPoint, and
// the visibility for a bare (g2_ex, chi) pair. Throws ConfigError when the
// input holds neither.
ReportRows theory_rows(TheoryInput const& input);

std::string format_rows(ReportRows const& rows);

}  // namespace hom
