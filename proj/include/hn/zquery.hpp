#pragma once

#include <utility>
#include <vector>

#include "hn/formula.hpp"
#include "hn/path.hpp"

namespace hn {

class Site;

/// Pages matched by a z-pattern, segment by segment: a page of exactly the
/// pattern's depth matches when every literal segment equals its own and
/// every predicate is true on the page whose path ends at that segment.
/// Candidates are limited to pages under the literal prefix. Sorted by
/// canonical path.
std::vector<Path> match_pages(const ZPattern& pattern, const Site& site, double now = 0,
                              std::uint64_t seed = 0);

/// Cross product of matching pages with the target rectangle, page-major.
std::vector<std::pair<Path, CellAddr>> resolve_zref(const ZPattern& pattern, const Rect& target,
                                                    const Site& site, double now = 0, std::uint64_t seed = 0);

/// True when `page` has the pattern's depth and its segments agree with every
/// literal segment of the pattern (predicates ignored).
bool matches_skeleton(const ZPattern& pattern, const Path& page);

/// Cells of `page` a z-reference may read when evaluated: the target cells
/// when the page matches the skeleton, and predicate inputs when the page
/// sits at a predicate position. Independent of cell values.
std::vector<Rect> zref_inputs_on(const ZPattern& pattern, const Rect& target, const Path& page);

}  // namespace hn
