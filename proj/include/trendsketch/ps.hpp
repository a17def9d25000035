// Copyright 2026 The TrendSketch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// @file ps.hpp
/// @brief Proximity-semantics reference resolution.
///
/// Two elements are bound when their distance in some measurable space
/// (canvas, semantic or temporal) is within that space's threshold. A
/// connector such as an arrow collapses canvas distance between the elements
/// at its two ends to zero. A query resolves to every glyph or data region
/// reachable from it through a chain of bindings.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trendsketch/core.hpp"

namespace trendsketch::ps {

enum class ElementKind { kGlyph, kText, kDataRegion };

struct Position {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Position&) const = default;
};

struct Element {
  std::string id;
  ElementKind kind = ElementKind::kGlyph;
  Position position;
  std::optional<std::string> text;
  std::optional<double> timestamp;

  void validate() const {
    if (id.empty()) throw Error(ErrorKind::kInvalidArgument, "ps: element without id");
    if (kind == ElementKind::kText && !text) {
      throw Error(ErrorKind::kInvalidArgument,
                  "ps: text element '" + id + "' has no text");
    }
    if (!std::isfinite(position.x) || !std::isfinite(position.y)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "ps: element '" + id + "' has a non-finite position");
    }
  }
};

struct Connector {
  Position from_anchor;
  Position to_anchor;
};

struct CanvasSpace {
  double threshold = 0.0;
  double snap_radius = 0.0;  ///< how close an anchor must be to an element
};

/// Normalized edit distance in [0, 1].
struct SemanticSpace {
  double threshold = 0.34;
};

/// Seconds.
struct TemporalSpace {
  double threshold = 60.0;
};

using Space = std::variant<CanvasSpace, SemanticSpace, TemporalSpace>;

inline double threshold_of(const Space& s) {
  return std::visit([](const auto& v) { return v.threshold; }, s);
}

/// Canvas threshold 5% and snap radius 2% of the canvas diagonal; semantic
/// 0.34; temporal 60 s.
inline std::vector<Space> default_spaces(double canvas_width, double canvas_height) {
  const double diag = std::hypot(canvas_width, canvas_height);
  return {CanvasSpace{0.05 * diag, 0.02 * diag}, SemanticSpace{}, TemporalSpace{}};
}

enum class Cardinality { kZero, kOne, kMany };

struct ResolutionSet {
  std::vector<std::string> candidates;  ///< sorted ascending
  Cardinality cardinality = Cardinality::kZero;
};

namespace detail {

inline std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    int extra = c < 0x80 ? 0 : (c >> 5) == 0x6 ? 1 : (c >> 4) == 0xE ? 2 : (c >> 3) == 0x1E ? 3 : -1;
    if (extra < 0 || i + static_cast<std::size_t>(extra) >= s.size()) {
      out.push_back(c);  // invalid lead byte or truncated sequence: keep raw
      ++i;
      continue;
    }
    char32_t cp = extra == 0 ? c : (c & (0x3F >> extra));
    for (int k = 1; k <= extra; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

inline std::u32string fold(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  std::u32string out = decode_utf8(s.substr(b, e - b + 1));
  for (auto& c : out) {
    if (c < 0x80) c = static_cast<char32_t>(std::tolower(static_cast<int>(c)));
  }
  return out;
}

inline std::size_t levenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0u : 1u)});
      diag = up;
    }
  }
  return row[b.size()];
}

inline double canvas_distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace detail

/// Levenshtein distance over code points after trimming and ASCII case
/// folding, divided by the longer length. Two empty strings are at 0.
inline double semantic_distance(std::string_view a, std::string_view b) {
  const std::u32string fa = detail::fold(a), fb = detail::fold(b);
  const std::size_t longest = std::max(fa.size(), fb.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(detail::levenshtein(fa, fb)) / static_cast<double>(longest);
}

/// Distance between two elements in one space; +inf when the space cannot
/// measure one of them.
inline double effective_distance(const Element& a, const Element& b,
                                 const std::vector<Connector>& connectors,
                                 const Space& space) {
  if (const auto* canvas = std::get_if<CanvasSpace>(&space)) {
    const double r = canvas->snap_radius;
    for (const auto& c : connectors) {
      const bool forward = detail::canvas_distance(c.from_anchor, a.position) <= r &&
                           detail::canvas_distance(c.to_anchor, b.position) <= r;
      const bool backward = detail::canvas_distance(c.from_anchor, b.position) <= r &&
                            detail::canvas_distance(c.to_anchor, a.position) <= r;
      if (forward || backward) return 0.0;
    }
    return detail::canvas_distance(a.position, b.position);
  }
  if (std::holds_alternative<SemanticSpace>(space)) {
    if (!a.text || !b.text) return kInf;
    return semantic_distance(*a.text, *b.text);
  }
  if (!a.timestamp || !b.timestamp) return kInf;
  return std::abs(*a.timestamp - *b.timestamp);
}

/// True when @p a and @p b are bound in at least one space.
inline bool bound(const Element& a, const Element& b,
                  const std::vector<Connector>& connectors,
                  const std::vector<Space>& spaces) {
  return std::any_of(spaces.begin(), spaces.end(), [&](const Space& s) {
    return effective_distance(a, b, connectors, s) <= threshold_of(s);
  });
}

/// Breadth-first search over the binding graph from @p query. The query is
/// added to the node set if @p elements does not already hold its id.
inline ResolutionSet resolve(const Element& query, const std::vector<Element>& elements,
                             const std::vector<Connector>& connectors,
                             const std::vector<Space>& spaces) {
  query.validate();
  for (const auto& s : spaces) {
    if (!(threshold_of(s) >= 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "ps: thresholds must be >= 0");
    }
  }
  std::vector<const Element*> nodes{&query};
  for (const auto& e : elements) {
    e.validate();
    if (e.id != query.id) nodes.push_back(&e);
  }

  std::vector<bool> seen(nodes.size(), false);
  seen[0] = true;
  std::queue<std::size_t> frontier;
  frontier.push(0);
  while (!frontier.empty()) {
    const std::size_t cur = frontier.front();
    frontier.pop();
    for (std::size_t next = 0; next < nodes.size(); ++next) {
      if (!seen[next] && bound(*nodes[cur], *nodes[next], connectors, spaces)) {
        seen[next] = true;
        frontier.push(next);
      }
    }
  }

  ResolutionSet out;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (seen[i] && nodes[i]->kind != ElementKind::kText) {
      out.candidates.push_back(nodes[i]->id);
    }
  }
  std::sort(out.candidates.begin(), out.candidates.end());
  out.cardinality = out.candidates.empty()       ? Cardinality::kZero
                    : out.candidates.size() == 1 ? Cardinality::kOne
                                                 : Cardinality::kMany;
  return out;
}

}  // namespace trendsketch::ps
