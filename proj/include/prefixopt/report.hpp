#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "timing.hpp"

namespace prefixopt
{

/// CSV with the header "target,area,delay,slack,size,level,deficiency" and
/// one line per row. Doubles use the shortest text that reads back exactly.
std::string emit_report( std::vector<SweepRow> const& rows );

/// Inverse of `emit_report`. Throws std::invalid_argument on a wrong header,
/// a wrong field count or an unparsable field.
std::vector<SweepRow> parse_report( std::string_view text );

} // namespace prefixopt
