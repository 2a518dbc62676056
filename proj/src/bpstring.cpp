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

#include "factopt/bpstring.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace factopt {
namespace {

using json = nlohmann::json;

constexpr char kVersionPrefix = '0';
// Game version packed major.minor.patch.dev, sixteen bits each.
constexpr std::uint64_t kGameVersion = (1ULL << 48) | (1ULL << 32);

const char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::string& in) {
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= in.size()) {
    const unsigned v = (unsigned(std::uint8_t(in[i])) << 16) |
                       (unsigned(std::uint8_t(in[i + 1])) << 8) |
                       unsigned(std::uint8_t(in[i + 2]));
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += kB64Alphabet[(v >> 6) & 63];
    out += kB64Alphabet[v & 63];
    i += 3;
  }
  const std::size_t rest = in.size() - i;
  if (rest == 1) {
    const unsigned v = unsigned(std::uint8_t(in[i])) << 16;
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const unsigned v = (unsigned(std::uint8_t(in[i])) << 16) |
                       (unsigned(std::uint8_t(in[i + 1])) << 8);
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += kB64Alphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::string base64_decode(const std::string& in) {
  if (in.size() % 4 != 0)
    throw CodecError("blueprint string: base64 length is not a multiple of 4");
  std::array<int, 256> lut;
  lut.fill(-1);
  for (int i = 0; i < 64; ++i) lut[std::uint8_t(kB64Alphabet[i])] = i;
  std::string out;
  out.reserve(in.size() / 4 * 3);
  for (std::size_t i = 0; i < in.size(); i += 4) {
    int pad = 0;
    unsigned v = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = in[i + k];
      if (c == '=' && i + 4 == in.size() && k >= 2) {
        ++pad;
        v <<= 6;
        continue;
      }
      const int bits = lut[std::uint8_t(c)];
      if (bits < 0 || pad > 0)
        throw CodecError("blueprint string: invalid base64 character");
      v = (v << 6) | unsigned(bits);
    }
    out += char((v >> 16) & 0xff);
    if (pad < 2) out += char((v >> 8) & 0xff);
    if (pad < 1) out += char(v & 0xff);
  }
  return out;
}

std::string zlib_deflate(const std::string& in) {
  uLongf cap = compressBound(uLong(in.size()));
  std::string out(cap, '\0');
  const int rc =
      compress2(reinterpret_cast<Bytef*>(out.data()), &cap,
                reinterpret_cast<const Bytef*>(in.data()), uLong(in.size()),
                Z_BEST_COMPRESSION);
  if (rc != Z_OK) throw CodecError("blueprint string: compression failed");
  out.resize(cap);
  return out;
}

std::string zlib_inflate(const std::string& in) {
  uLongf cap = std::max<uLongf>(256, uLongf(in.size()) * 4);
  for (;;) {
    std::string out(cap, '\0');
    uLongf len = cap;
    const int rc =
        uncompress(reinterpret_cast<Bytef*>(out.data()), &len,
                   reinterpret_cast<const Bytef*>(in.data()), uLong(in.size()));
    if (rc == Z_OK) {
      out.resize(len);
      return out;
    }
    if (rc == Z_BUF_ERROR && cap < (1u << 26)) {
      cap *= 2;
      continue;
    }
    throw CodecError("blueprint string: corrupt compressed payload");
  }
}

int game_direction(Dir d) {
  switch (d) {
    case Dir::North: return 0;
    case Dir::East: return 2;
    case Dir::South: return 4;
    case Dir::West: return 6;
  }
  return 0;
}

Dir direction_from_game(int code) {
  switch (code) {
    case 0: return Dir::North;
    case 2: return Dir::East;
    case 4: return Dir::South;
    case 6: return Dir::West;
  }
  throw CodecError("blueprint string: direction code " + std::to_string(code) +
                   " is not one of 0, 2, 4, 6");
}

std::string recipe_name(int recipe, const NameTable& names) {
  if (names.recipe_names.empty()) return "item-" + std::to_string(recipe);
  const auto it = names.recipe_names.find(recipe);
  if (it == names.recipe_names.end())
    throw CodecError("blueprint string: no name-table entry for recipe id " +
                     std::to_string(recipe));
  return it->second;
}

int recipe_from_name(const std::string& name, const NameTable& names) {
  if (names.recipe_names.empty()) {
    const std::string prefix = "item-";
    if (name.rfind(prefix, 0) == 0) {
      try {
        return std::stoi(name.substr(prefix.size()));
      } catch (const std::exception&) {
      }
    }
    throw CodecError("blueprint string: unsupported recipe name: " + name);
  }
  for (const auto& [id, entry] : names.recipe_names)
    if (entry == name) return id;
  throw CodecError("blueprint string: no name-table entry for recipe name: " +
                   name);
}

json entity_json(int number, const std::string& name, double cx, double cy,
                 int direction) {
  json e;
  e["entity_number"] = number;
  e["name"] = name;
  e["position"] = {{"x", cx}, {"y", cy}};
  e["direction"] = direction;
  return e;
}

// Tile coordinate from an entity center laid on the half-integer lattice.
int tile_from_center(double c) {
  const double shifted = c + 0.5;
  const int tile = int(std::lround(shifted));
  if (std::abs(shifted - double(tile)) > 1e-9)
    throw CodecError("blueprint string: entity is not centered on a tile");
  return tile;
}

}  // namespace

std::string export_blueprint(const Blueprint& bp, const NameTable& names) {
  json entities = json::array();
  int number = 1;
  for (int y = 1; y <= bp.height; ++y)
    for (int x = 1; x <= bp.width; ++x) {
      const double cx = x - 0.5, cy = y - 0.5;
      if (const int c = bp.conveyors.at(x, y); c != 0)
        entities.push_back(entity_json(number++, "transport-belt", cx, cy,
                                       game_direction(static_cast<Dir>(c))));
      if (const int c = bp.inserters.at(x, y); c != 0) {
        // In-game inserters are oriented from drop square to pickup square,
        // so the wire format stores the opposite of the movement direction.
        const Dir logical = static_cast<Dir>(c);
        entities.push_back(entity_json(number++, "inserter", cx, cy,
                                       game_direction(dir_opposite(logical))));
      }
    }
  for (const BlueprintAssembler& a : bp.assemblers) {
    json e = entity_json(number++, "assembling-machine-1", a.anchor.x + 0.5,
                         a.anchor.y + 0.5, 0);
    e["recipe"] = recipe_name(a.recipe, names);
    entities.push_back(e);
  }

  json doc;
  doc["blueprint"]["item"] = "blueprint";
  doc["blueprint"]["version"] = kGameVersion;
  doc["blueprint"]["snap-to-grid"] = {{"x", bp.width}, {"y", bp.height}};
  doc["blueprint"]["description"] =
      "predicted_rate=" + std::to_string(bp.predicted_rate);
  doc["blueprint"]["entities"] = std::move(entities);

  return kVersionPrefix + base64_encode(zlib_deflate(doc.dump()));
}

Blueprint import_blueprint(const std::string& text, const NameTable& names) {
  if (text.empty() || text[0] != kVersionPrefix)
    throw CodecError(
        "blueprint string: unsupported version prefix (expected '0')");
  json doc;
  try {
    doc = json::parse(zlib_inflate(base64_decode(text.substr(1))));
  } catch (const json::exception&) {
    throw CodecError("blueprint string: payload is not valid JSON");
  }
  if (!doc.contains("blueprint"))
    throw CodecError("blueprint string: payload has no blueprint object");
  const json& b = doc["blueprint"];
  if (!b.contains("snap-to-grid"))
    throw CodecError("blueprint string: payload lacks grid dimensions");

  Blueprint bp(b["snap-to-grid"].at("x").get<int>(),
               b["snap-to-grid"].at("y").get<int>());
  if (bp.width < 1 || bp.height < 1)
    throw CodecError("blueprint string: grid dimensions must be positive");

  if (b.contains("description")) {
    const std::string desc = b["description"].get<std::string>();
    const std::string key = "predicted_rate=";
    if (desc.rfind(key, 0) == 0)
      bp.predicted_rate = std::stoll(desc.substr(key.size()));
  }

  for (const json& e : b.value("entities", json::array())) {
    const std::string name = e.at("name").get<std::string>();
    const double cx = e.at("position").at("x").get<double>();
    const double cy = e.at("position").at("y").get<double>();
    const int dir_code = e.value("direction", 0);
    if (name == "transport-belt" || name == "inserter") {
      const int x = tile_from_center(cx), y = tile_from_center(cy);
      if (x < 1 || x > bp.width || y < 1 || y > bp.height)
        throw CodecError("blueprint string: entity outside the declared grid");
      if (bp.conveyors.at(x, y) != 0 || bp.inserters.at(x, y) != 0)
        throw CodecError("blueprint string: two entities share a tile");
      const Dir d = direction_from_game(dir_code);
      if (name == "transport-belt")
        bp.conveyors.at(x, y) = static_cast<int>(d);
      else
        bp.inserters.at(x, y) = static_cast<int>(dir_opposite(d));
    } else if (name == "assembling-machine-1") {
      const int ax = tile_from_center(cx) - 1, ay = tile_from_center(cy) - 1;
      if (ax < 1 || ax + 2 > bp.width || ay < 1 || ay + 2 > bp.height)
        throw CodecError("blueprint string: assembler outside the declared grid");
      bp.assemblers.push_back(
          {{ax, ay}, recipe_from_name(e.at("recipe").get<std::string>(), names)});
    } else {
      throw CodecError("blueprint string: unsupported entity: " + name);
    }
  }
  return bp;
}

namespace {

char tile_glyph(int code) {
  switch (code) {
    case 0: return '.';
    case 1: return 'N';
    case 2: return 'S';
    case 3: return 'E';
    case 4: return 'W';
  }
  return '?';
}

int code_from_glyph(char g) {
  switch (g) {
    case '.': return 0;
    case 'N': return 1;
    case 'S': return 2;
    case 'E': return 3;
    case 'W': return 4;
  }
  throw CodecError(std::string("blueprint file: unknown tile glyph '") + g +
                   "'");
}

void read_grid(std::istream& in, Grid<int>& g) {
  std::string row;
  for (int y = 1; y <= g.height(); ++y) {
    if (!std::getline(in, row) || int(row.size()) != g.width())
      throw CodecError("blueprint file: grid row has the wrong width");
    for (int x = 1; x <= g.width(); ++x) g.at(x, y) = code_from_glyph(row[x - 1]);
  }
}

}  // namespace

std::string blueprint_to_text(const Blueprint& bp) {
  std::ostringstream os;
  os << "size " << bp.width << " " << bp.height << "\n";
  os << "predicted_rate " << bp.predicted_rate << "\n";
  for (const BlueprintAssembler& a : bp.assemblers)
    os << "assembler " << a.anchor.x << " " << a.anchor.y << " " << a.recipe
       << "\n";
  os << "conveyors\n";
  for (int y = 1; y <= bp.height; ++y) {
    for (int x = 1; x <= bp.width; ++x) os << tile_glyph(bp.conveyors.at(x, y));
    os << "\n";
  }
  os << "inserters\n";
  for (int y = 1; y <= bp.height; ++y) {
    for (int x = 1; x <= bp.width; ++x) os << tile_glyph(bp.inserters.at(x, y));
    os << "\n";
  }
  return os.str();
}

Blueprint blueprint_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw CodecError("blueprint file: empty input");
  int w = 0, h = 0;
  {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag >> w >> h) || tag != "size" || w < 1 || h < 1)
      throw CodecError("blueprint file: expected 'size <w> <h>' header");
  }
  Blueprint bp(w, h);
  if (!std::getline(in, line))
    throw CodecError("blueprint file: missing predicted_rate line");
  {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag >> bp.predicted_rate) || tag != "predicted_rate")
      throw CodecError("blueprint file: expected 'predicted_rate <n>'");
  }
  while (std::getline(in, line) && line != "conveyors") {
    std::istringstream ls(line);
    std::string tag;
    BlueprintAssembler a;
    if (!(ls >> tag >> a.anchor.x >> a.anchor.y >> a.recipe) ||
        tag != "assembler")
      throw CodecError("blueprint file: expected assembler lines, then "
                       "'conveyors'");
    bp.assemblers.push_back(a);
  }
  if (line != "conveyors")
    throw CodecError("blueprint file: missing conveyors section");
  read_grid(in, bp.conveyors);
  if (!std::getline(in, line) || line != "inserters")
    throw CodecError("blueprint file: missing inserters section");
  read_grid(in, bp.inserters);
  return bp;
}

}  // namespace factopt
