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

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "trendsketch/ps.hpp"

namespace ps = trendsketch::ps;

namespace {

ps::Element glyph(std::string id, double x, double y) { return {std::move(id), ps::ElementKind::kGlyph, {x, y}, {}, {}}; }
ps::Element text(std::string id, std::string t, double x, double y) {
  return {std::move(id), ps::ElementKind::kText, {x, y}, std::move(t), {}};
}

/// Tool board: icons with labels, two labels joined to their icon by an
/// arrow, and three free-standing queries.
struct Board {
  std::vector<ps::Element> elements{
      glyph("hammer", 100, 100),         text("label-hammer", "Hammer", 100, 140),
      glyph("wrench", 300, 300),         text("label-wrench", "Wrench", 160, 200),
      glyph("pliers", 500, 100),         text("label-pliers", "Pliers", 400, 250),
      text("q1", "Wrench", 800, 100),    text("q2", "PPliers", 800, 250),
      text("q3", "Query 3", 800, 400)};
  std::vector<ps::Connector> connectors{{{160, 200}, {300, 300}}, {{400, 250}, {500, 100}}};
  std::vector<ps::Space> spaces = ps::default_spaces(1000, 600);

  const ps::Element& get(const std::string& id) const {
    return *std::find_if(elements.begin(), elements.end(), [&](const auto& e) { return e.id == id; });
  }
};

}  // namespace

TEST(SemanticDistance, Examples) {
  EXPECT_EQ(ps::semantic_distance("Wrench", "Wrench"), 0.0);
  EXPECT_DOUBLE_EQ(ps::semantic_distance("PPliers", "Pliers"), 1.0 / 7.0);
  EXPECT_GT(ps::semantic_distance("Query 3", "Wrench"), 0.34);
  EXPECT_EQ(ps::semantic_distance("", ""), 0.0);
  EXPECT_EQ(ps::semantic_distance("  HAMMER ", "hammer"), 0.0);
  EXPECT_EQ(ps::semantic_distance("abc", ""), 1.0);
}

TEST(SemanticDistance, AgreesWithNaiveEditDistance) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> len(0, 8), ch('a', 'e');
  for (int rep = 0; rep < 500; ++rep) {
    std::string a, b;
    for (int i = len(rng); i > 0; --i) a += static_cast<char>(ch(rng));
    for (int i = len(rng); i > 0; --i) b += static_cast<char>(ch(rng));
    const double longest = static_cast<double>(std::max(a.size(), b.size()));
    const double expect = longest == 0 ? 0.0 : static_cast<double>(oracle::levenshtein(a, b)) / longest;
    EXPECT_DOUBLE_EQ(ps::semantic_distance(a, b), expect);
    EXPECT_EQ(ps::semantic_distance(a, b), ps::semantic_distance(b, a));
  }
}

TEST(SemanticDistance, CountsCodePointsNotBytes) {
  EXPECT_DOUBLE_EQ(ps::semantic_distance("caf\xC3\xA9", "cafe"), 0.25);
}

TEST(EffectiveDistance, ConnectorCollapsesCanvasDistance) {
  const Board b;
  const auto& canvas = b.spaces[0];
  EXPECT_EQ(ps::effective_distance(b.get("label-wrench"), b.get("wrench"), b.connectors, canvas), 0.0);
  EXPECT_EQ(ps::effective_distance(b.get("wrench"), b.get("label-wrench"), b.connectors, canvas), 0.0);
  EXPECT_GT(ps::effective_distance(b.get("label-wrench"), b.get("wrench"), {}, canvas), 100.0);
}

TEST(EffectiveDistance, IncomparableIsInfinite) {
  const Board b;
  EXPECT_TRUE(std::isinf(ps::effective_distance(b.get("hammer"), b.get("q1"), {}, ps::SemanticSpace{})));
  EXPECT_TRUE(std::isinf(ps::effective_distance(b.get("q1"), b.get("q2"), {}, ps::TemporalSpace{})));
  auto a = b.get("q1"), c = b.get("q2");
  a.timestamp = 10;
  c.timestamp = 70;
  EXPECT_EQ(ps::effective_distance(a, c, {}, ps::TemporalSpace{}), 60.0);
  EXPECT_EQ(ps::effective_distance(text("x", "Hammer", 0, 0), text("y", "Hammer", 0, 0), {}, ps::SemanticSpace{}),
            0.0);
}

TEST(Resolve, ToolBoardQueries) {
  const Board b;
  auto r = ps::resolve(b.get("q1"), b.elements, b.connectors, b.spaces);
  EXPECT_EQ(r.candidates, (std::vector<std::string>{"wrench"}));
  EXPECT_EQ(r.cardinality, ps::Cardinality::kOne);

  r = ps::resolve(b.get("q2"), b.elements, b.connectors, b.spaces);
  EXPECT_EQ(r.candidates, (std::vector<std::string>{"pliers"}));
  EXPECT_EQ(r.cardinality, ps::Cardinality::kOne);

  r = ps::resolve(b.get("q3"), b.elements, b.connectors, b.spaces);
  EXPECT_TRUE(r.candidates.empty());
  EXPECT_EQ(r.cardinality, ps::Cardinality::kZero);
}

TEST(Resolve, LabelNearestToHammerStillResolvesToWrench) {
  const Board b;
  const auto& label = b.get("label-wrench");
  const double to_hammer = std::hypot(label.position.x - 100, label.position.y - 100);
  const double to_wrench = std::hypot(label.position.x - 300, label.position.y - 300);
  EXPECT_LT(to_hammer, to_wrench);
  const auto r = ps::resolve(label, b.elements, b.connectors, b.spaces);
  EXPECT_EQ(r.candidates, (std::vector<std::string>{"wrench"}));
}

TEST(Resolve, ManyWhenThresholdsGrow) {
  Board b;
  b.spaces = {ps::CanvasSpace{1e6, 1}, ps::SemanticSpace{}, ps::TemporalSpace{}};
  const auto r = ps::resolve(b.get("q3"), b.elements, b.connectors, b.spaces);
  EXPECT_EQ(r.candidates.size(), 3u);
  EXPECT_EQ(r.cardinality, ps::Cardinality::kMany);
}

TEST(Resolve, QueryNotInElementListIsAdded) {
  const Board b;
  const auto r = ps::resolve(text("fresh", "wrench ", 900, 500), b.elements, b.connectors, b.spaces);
  EXPECT_EQ(r.candidates, (std::vector<std::string>{"wrench"}));
}

TEST(Resolve, NegativeThresholdRejected) {
  const Board b;
  EXPECT_THROW(ps::resolve(b.get("q1"), b.elements, b.connectors, {ps::SemanticSpace{-1}}), trendsketch::Error);
  EXPECT_THROW(ps::resolve({"", ps::ElementKind::kGlyph, {}, {}, {}}, b.elements, {}, b.spaces), trendsketch::Error);
}

namespace {

struct RandomScene {
  std::vector<ps::Element> elements;
  std::vector<ps::Connector> connectors;
};

RandomScene random_scene(std::mt19937_64& rng) {
  static const char* words[] = {"Wrench", "Pliers", "PPliers", "Hammer", "Hamer", "Saw", "Drill", "Dril"};
  std::uniform_real_distribution<double> pos(0, 1000), ts(0, 600);
  std::uniform_int_distribution<int> kind(0, 2), word(0, 7), coin(0, 1);
  RandomScene s;
  const int n = 4 + static_cast<int>(rng() % 10);
  for (int i = 0; i < n; ++i) {
    ps::Element e{"e" + std::to_string(i), static_cast<ps::ElementKind>(kind(rng)), {pos(rng), pos(rng)}, {}, {}};
    if (e.kind == ps::ElementKind::kText || coin(rng)) e.text = words[word(rng)];
    if (coin(rng)) e.timestamp = ts(rng);
    s.elements.push_back(e);
  }
  for (int c = static_cast<int>(rng() % 3); c > 0; --c) {
    const auto& a = s.elements[rng() % s.elements.size()];
    const auto& b = s.elements[rng() % s.elements.size()];
    s.connectors.push_back({a.position, b.position});
  }
  return s;
}

}  // namespace

TEST(Resolve, AgreesWithTransitiveClosure) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const auto s = random_scene(rng);
    std::uniform_real_distribution<double> th(0, 1);
    const std::vector<ps::Space> spaces{ps::CanvasSpace{300 * th(rng), 5}, ps::SemanticSpace{th(rng)},
                                        ps::TemporalSpace{100 * th(rng)}};
    const std::size_t n = s.elements.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto& a = s.elements[i];
        const auto& b = s.elements[j];
        bool edge = false;
        // Canvas, with connector collapse.
        double cd = std::hypot(a.position.x - b.position.x, a.position.y - b.position.y);
        for (const auto& c : s.connectors) {
          auto near = [](ps::Position p, ps::Position q) { return std::hypot(p.x - q.x, p.y - q.y) <= 5; };
          if ((near(c.from_anchor, a.position) && near(c.to_anchor, b.position)) ||
              (near(c.from_anchor, b.position) && near(c.to_anchor, a.position))) {
            cd = 0;
          }
        }
        edge |= cd <= std::get<ps::CanvasSpace>(spaces[0]).threshold;
        if (a.text && b.text) {
          const double longest = static_cast<double>(std::max(a.text->size(), b.text->size()));
          std::string la = *a.text, lb = *b.text;
          for (auto& ch : la) ch = static_cast<char>(std::tolower(ch));
          for (auto& ch : lb) ch = static_cast<char>(std::tolower(ch));
          edge |= static_cast<double>(oracle::levenshtein(la, lb)) / longest <= ps::threshold_of(spaces[1]);
        }
        if (a.timestamp && b.timestamp) edge |= std::abs(*a.timestamp - *b.timestamp) <= ps::threshold_of(spaces[2]);
        adj[i][j] = edge;
      }
    }
    const auto reach = oracle::reachable(adj, 0);
    std::vector<std::string> expect;
    for (std::size_t i = 1; i < n; ++i) {
      if (reach[i] && s.elements[i].kind != ps::ElementKind::kText) expect.push_back(s.elements[i].id);
    }
    std::sort(expect.begin(), expect.end());
    EXPECT_EQ(ps::resolve(s.elements[0], s.elements, s.connectors, spaces).candidates, expect) << "rep " << rep;
  }
}

TEST(Resolve, MonotoneInThresholdsAndConnectors) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 200; ++rep) {
    auto s = random_scene(rng);
    std::uniform_real_distribution<double> th(0, 1);
    std::vector<ps::Space> small{ps::CanvasSpace{200 * th(rng), 5}, ps::SemanticSpace{0.5 * th(rng)},
                                 ps::TemporalSpace{50 * th(rng)}};
    const auto base = ps::resolve(s.elements[0], s.elements, s.connectors, small);
    auto includes = [&](const ps::ResolutionSet& big) {
      return std::includes(big.candidates.begin(), big.candidates.end(), base.candidates.begin(),
                           base.candidates.end());
    };
    for (std::size_t k = 0; k < small.size(); ++k) {
      auto big = small;
      std::visit([](auto& sp) { sp.threshold *= 2.0; sp.threshold += 1e-3; }, big[k]);
      EXPECT_TRUE(includes(ps::resolve(s.elements[0], s.elements, s.connectors, big)));
    }
    s.connectors.push_back({s.elements[0].position, s.elements.back().position});
    EXPECT_TRUE(includes(ps::resolve(s.elements[0], s.elements, s.connectors, small)));
  }
}
