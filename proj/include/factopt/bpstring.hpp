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

#ifndef FACTOPT_BPSTRING_HPP_
#define FACTOPT_BPSTRING_HPP_

#include <map>
#include <stdexcept>
#include <string>

#include "factopt/blueprint.hpp"

namespace factopt {

// Raised by blueprint serialization in either direction: bad framing,
// corrupt compression, malformed payloads, or names with no table entry.
struct CodecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Maps recipe ids to the recipe names written into exported strings. An
// empty table falls back to the generated scheme "item-<id>"; a non-empty
// table must cover every recipe id it meets or the codec throws.
struct NameTable {
  std::map<int, std::string> recipe_names;
};

// One-line exchange token: version prefix byte '0' followed by base64 of
// the zlib-compressed JSON payload. Entities are numbered sequentially;
// directions use the game encoding N=0, E=2, S=4, W=6, and inserters are
// written with the drop-to-pickup orientation (the opposite of the
// direction they move items), matching in-game conventions.
std::string export_blueprint(const Blueprint& bp, const NameTable& names = {});

// Inverse of export_blueprint on strings this codec produces. Throws
// CodecError on a foreign version prefix, broken base64 or compression,
// or entities outside the supported set (belt, inserter, assembler).
Blueprint import_blueprint(const std::string& text, const NameTable& names = {});

// Human-readable blueprint file: header lines for size, predicted rate and
// assemblers, then the conveyor and inserter grids one glyph per tile
// ('.' empty, NSEW by direction).
std::string blueprint_to_text(const Blueprint& bp);

// Inverse of blueprint_to_text. Throws CodecError on malformed input.
Blueprint blueprint_from_text(const std::string& text);

}  // namespace factopt

#endif  // FACTOPT_BPSTRING_HPP_
