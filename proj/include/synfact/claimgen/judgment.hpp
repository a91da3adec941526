#pragma once

#include <string>
#include <string_view>

#include "synfact/records.hpp"

namespace synfact::claimgen {

/// Extracts the judgment from a model reply.
///
/// Takes the first balanced {...} object that parses as JSON, so prose and
/// code fences around it are ignored. Field names match the schema
/// case-insensitively. Scores may be integers, numeric strings or "4/5"-style
/// strings (leading integer); CATEGORY may embed C0/C1/C2 in longer text.
/// Throws ParseFailure when there is no object, CLAIM is missing/empty,
/// CATEGORY is unmappable, or a score is missing or outside 1-5.
GenerationJudgment parse_generation(std::string_view raw);

/// Renders a judgment in the schema's JSON shape (upper-case keys).
std::string serialize_judgment(const GenerationJudgment& judgment);

}  // namespace synfact::claimgen
