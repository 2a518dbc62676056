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

#ifndef FACTOPT_RENDER_HPP_
#define FACTOPT_RENDER_HPP_

#include <array>
#include <string>

#include "factopt/blueprint.hpp"

namespace factopt {

// Glyph table for the ASCII renderer, indexed by direction code (slot 0 is
// unused). Every (kind, direction) pair must map to a distinct character.
struct RenderStyle {
  std::array<char, 5> conveyor = {'?', 'N', 'S', 'E', 'W'};
  std::array<char, 5> inserter = {'?', 'n', 's', 'e', 'w'};
  char empty = '.';
  bool legend = false;
};

// Draws the blueprint as height lines of width glyphs. Assemblers render
// as 3x3 boxes with the recipe id (base 36) in the center; conveyors and
// inserters use the style's directional glyphs. Throws std::invalid_argument
// when the style maps two cell kinds to the same character.
std::string render_ascii(const Blueprint& bp, const RenderStyle& style = {});

}  // namespace factopt

#endif  // FACTOPT_RENDER_HPP_
