// Copyright 2026 The factopt Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "factopt/render.hpp"

#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace factopt {
namespace {

char recipe_glyph(int recipe) {
  if (recipe >= 0 && recipe < 10) return char('0' + recipe);
  if (recipe >= 10 && recipe < 36) return char('a' + recipe - 10);
  return '#';
}

}  // namespace

std::string render_ascii(const Blueprint& bp, const RenderStyle& style) {
  std::set<char> seen;
  seen.insert(style.empty);
  for (int d = 1; d <= 4; ++d) {
    seen.insert(style.conveyor[d]);
    seen.insert(style.inserter[d]);
  }
  if (seen.size() != 9)
    throw std::invalid_argument("render style glyphs must be distinct");

  std::vector<std::string> canvas(bp.height, std::string(bp.width, style.empty));
  auto put = [&](int x, int y, char g) {
    if (x >= 1 && x <= bp.width && y >= 1 && y <= bp.height)
      canvas[y - 1][x - 1] = g;
  };

  for (int y = 1; y <= bp.height; ++y)
    for (int x = 1; x <= bp.width; ++x) {
      if (const int c = bp.conveyors.at(x, y); c != 0)
        put(x, y, style.conveyor[c]);
      else if (const int c2 = bp.inserters.at(x, y); c2 != 0)
        put(x, y, style.inserter[c2]);
    }

  for (const BlueprintAssembler& a : bp.assemblers) {
    const int x0 = a.anchor.x, y0 = a.anchor.y;
    for (int dx = 0; dx < 3; dx += 2) {
      put(x0 + dx, y0, '+');
      put(x0 + dx, y0 + 2, '+');
      put(x0 + dx, y0 + 1, '|');
    }
    put(x0 + 1, y0, '-');
    put(x0 + 1, y0 + 2, '-');
    put(x0 + 1, y0 + 1, recipe_glyph(a.recipe));
  }

  std::ostringstream os;
  for (const std::string& row : canvas) os << row << "\n";
  if (style.legend) {
    os << "legend: ";
    for (int d = 1; d <= 4; ++d) os << style.conveyor[d];
    os << " conveyor, ";
    for (int d = 1; d <= 4; ++d) os << style.inserter[d];
    os << " inserter, '" << style.empty << "' empty, 3x3 box assembler\n";
  }
  return os.str();
}

}  // namespace factopt
