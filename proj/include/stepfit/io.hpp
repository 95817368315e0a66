#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stepfit/core.hpp"
#include "stepfit/solver.hpp"

namespace stepfit::io {

enum class Format { csv, json };

/// One `y` or `y,w` per line; a non-numeric first line is taken as a header,
/// blank lines are skipped. Errors name the offending line.
WeightedSeries read_csv(std::istream& in);

/// An object {"y": [...], "w": [...]} with "w" optional.
WeightedSeries read_json(std::istream& in);

/// Picks the format from the first non-blank character when not given.
WeightedSeries read_series(std::istream& in, std::optional<Format> format);

}  // namespace stepfit::io
