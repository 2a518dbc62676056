// Copyright 2026 The factopt Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <zlib.h>

#include <string>
#include <vector>

#include "json.hpp"

#include "factopt/bpstring.hpp"
#include "factopt/render.hpp"

using namespace factopt;
using json = nlohmann::json;

namespace {

// Reference decoder, written independently of the production codec: strips
// the framing byte, undoes base64 with a table-free bit loop, inflates, and
// parses the JSON payload.
json reference_decode(const std::string& token) {
  REQUIRE(!token.empty());
  REQUIRE(token[0] == '0');
  const std::string b64 = token.substr(1);

  std::string bytes;
  int bits = 0, acc = 0;
  for (char c : b64) {
    int v = 0;
    if (c >= 'A' && c <= 'Z') v = c - 'A';
    else if (c >= 'a' && c <= 'z') v = c - 'a' + 26;
    else if (c >= '0' && c <= '9') v = c - '0' + 52;
    else if (c == '+') v = 62;
    else if (c == '/') v = 63;
    else if (c == '=') break;
    else FAIL("bad base64 character");
    acc = (acc << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      bytes += char((acc >> bits) & 0xff);
    }
  }

  std::string plain(1 << 20, '\0');
  uLongf len = uLongf(plain.size());
  REQUIRE(uncompress(reinterpret_cast<Bytef*>(plain.data()), &len,
                     reinterpret_cast<const Bytef*>(bytes.data()),
                     uLong(bytes.size())) == Z_OK);
  plain.resize(len);
  return json::parse(plain);
}

// Forge a wire token from an arbitrary payload (for malformed-input tests).
std::string forge_token(const std::string& payload) {
  uLongf cap = compressBound(uLong(payload.size()));
  std::string packed(cap, '\0');
  REQUIRE(compress2(reinterpret_cast<Bytef*>(packed.data()), &cap,
                    reinterpret_cast<const Bytef*>(payload.data()),
                    uLong(payload.size()), 9) == Z_OK);
  packed.resize(cap);

  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out = "0";
  std::size_t i = 0;
  while (i < packed.size()) {
    unsigned v = unsigned(std::uint8_t(packed[i])) << 16;
    int have = 1;
    if (i + 1 < packed.size()) {
      v |= unsigned(std::uint8_t(packed[i + 1])) << 8;
      have = 2;
    }
    if (i + 2 < packed.size()) {
      v |= unsigned(std::uint8_t(packed[i + 2]));
      have = 3;
    }
    out += alphabet[(v >> 18) & 63];
    out += alphabet[(v >> 12) & 63];
    out += have >= 2 ? alphabet[(v >> 6) & 63] : '=';
    out += have >= 3 ? alphabet[v & 63] : '=';
    i += 3;
  }
  return out;
}

// 3x5 strip: one assembler, one feeder, one drain, a short belt to the
// bottom-right destination.
Blueprint strip_blueprint() {
  Blueprint bp(3, 5);
  bp.assemblers.push_back({{1, 1}, 1});
  bp.conveyors.at(1, 5) = static_cast<int>(Dir::North);
  bp.inserters.at(1, 4) = static_cast<int>(Dir::North);
  bp.inserters.at(2, 4) = static_cast<int>(Dir::South);
  bp.conveyors.at(2, 5) = static_cast<int>(Dir::East);
  bp.conveyors.at(3, 5) = static_cast<int>(Dir::East);
  bp.predicted_rate = 50;
  return bp;
}

// 3x3 merge: two belts join in the middle row and leave to the east.
Blueprint merge_blueprint() {
  Blueprint bp(3, 3);
  bp.conveyors.at(2, 1) = static_cast<int>(Dir::South);
  bp.conveyors.at(1, 2) = static_cast<int>(Dir::East);
  bp.conveyors.at(2, 2) = static_cast<int>(Dir::East);
  bp.conveyors.at(3, 2) = static_cast<int>(Dir::East);
  bp.conveyors.at(1, 3) = static_cast<int>(Dir::North);
  bp.predicted_rate = 200;
  return bp;
}

}  // namespace

TEST_CASE("an empty blueprint renders as blank glyphs") {
  Blueprint bp(2, 2);
  CHECK(render_ascii(bp) == "..\n..\n");
}

TEST_CASE("the merge layout renders with directional letters") {
  CHECK(render_ascii(merge_blueprint()) ==
        ".S.\n"
        "EEE\n"
        "N..\n");
}

TEST_CASE("assemblers render as labeled boxes with arrows alongside") {
  CHECK(render_ascii(strip_blueprint()) ==
        "+-+\n"
        "|1|\n"
        "+-+\n"
        "ns.\n"
        "NEE\n");
}

TEST_CASE("the legend line names every glyph family") {
  RenderStyle style;
  style.legend = true;
  const std::string text = render_ascii(Blueprint(1, 1), style);
  CHECK(text == ".\nlegend: NSEW conveyor, nsew inserter, '.' empty, "
                "3x3 box assembler\n");
}

TEST_CASE("styles with colliding glyphs are rejected") {
  RenderStyle style;
  style.inserter = {'?', 'N', 's', 'e', 'w'};  // 'N' already means conveyor
  CHECK_THROWS_AS(render_ascii(Blueprint(1, 1), style), std::invalid_argument);
}

TEST_CASE("distinct blueprints of equal size render distinctly") {
  Blueprint a = merge_blueprint();
  Blueprint b = a;
  b.conveyors.at(3, 2) = static_cast<int>(Dir::North);
  Blueprint c = a;
  c.conveyors.at(3, 2) = 0;
  c.inserters.at(3, 2) = static_cast<int>(Dir::East);
  CHECK(render_ascii(a) != render_ascii(b));
  CHECK(render_ascii(a) != render_ascii(c));
  CHECK(render_ascii(b) != render_ascii(c));
}

TEST_CASE("blueprint files round-trip through text") {
  for (const Blueprint& bp :
       {strip_blueprint(), merge_blueprint(), Blueprint(4, 1)}) {
    const std::string text = blueprint_to_text(bp);
    CHECK(blueprint_from_text(text) == bp);
  }
}

TEST_CASE("blueprint file text is explicit about its contents") {
  CHECK(blueprint_to_text(strip_blueprint()) ==
        "size 3 5\n"
        "predicted_rate 50\n"
        "assembler 1 1 1\n"
        "conveyors\n"
        "...\n"
        "...\n"
        "...\n"
        "...\n"
        "NEE\n"
        "inserters\n"
        "...\n"
        "...\n"
        "...\n"
        "NS.\n"
        "...\n");
}

TEST_CASE("malformed blueprint files are rejected") {
  CHECK_THROWS_AS(blueprint_from_text(""), CodecError);
  CHECK_THROWS_AS(blueprint_from_text("size 0 3\n"), CodecError);
  CHECK_THROWS_AS(blueprint_from_text("size 2 1\npredicted_rate 0\n"),
                  CodecError);
  // Wrong row width.
  CHECK_THROWS_AS(
      blueprint_from_text("size 2 1\npredicted_rate 0\nconveyors\nEEE\n"),
      CodecError);
  // Unknown glyph.
  CHECK_THROWS_AS(
      blueprint_from_text(
          "size 2 1\npredicted_rate 0\nconveyors\nEX\ninserters\n..\n"),
      CodecError);
  // Missing inserter section.
  CHECK_THROWS_AS(
      blueprint_from_text("size 2 1\npredicted_rate 0\nconveyors\nEE\n"),
      CodecError);
}

TEST_CASE("wire strings round-trip every fixture") {
  for (const Blueprint& bp :
       {strip_blueprint(), merge_blueprint(), Blueprint(2, 2)}) {
    const std::string token = export_blueprint(bp);
    REQUIRE(!token.empty());
    CHECK(token[0] == '0');
    CHECK(token.find('\n') == std::string::npos);
    CHECK(import_blueprint(token) == bp);
  }
}

TEST_CASE("a single east belt exports with game direction 2 at tile center") {
  Blueprint bp(1, 1);
  bp.conveyors.at(1, 1) = static_cast<int>(Dir::East);
  const json doc = reference_decode(export_blueprint(bp));
  const json& b = doc.at("blueprint");
  CHECK(b.at("item") == "blueprint");
  REQUIRE(b.at("entities").size() == 1);
  const json& e = b.at("entities")[0];
  CHECK(e.at("entity_number") == 1);
  CHECK(e.at("name") == "transport-belt");
  CHECK(e.at("direction") == 2);
  CHECK(e.at("position").at("x") == 0.5);
  CHECK(e.at("position").at("y") == 0.5);
  CHECK(b.at("snap-to-grid").at("x") == 1);
  CHECK(b.at("snap-to-grid").at("y") == 1);
}

TEST_CASE("inserters are exported in drop-to-pickup orientation") {
  Blueprint bp(1, 3);
  bp.inserters.at(1, 2) = static_cast<int>(Dir::North);  // moves items north
  const json doc = reference_decode(export_blueprint(bp));
  const json& e = doc.at("blueprint").at("entities")[0];
  CHECK(e.at("name") == "inserter");
  CHECK(e.at("direction") == 4);  // wire form points south, at the pickup
  CHECK(import_blueprint(export_blueprint(bp)) == bp);
}

TEST_CASE("the strip exports one assembler, two inserters, three belts") {
  const json doc = reference_decode(export_blueprint(strip_blueprint()));
  const json& entities = doc.at("blueprint").at("entities");
  REQUIRE(entities.size() == 6);
  int belts = 0, inserters = 0, assemblers = 0;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    CHECK(entities[i].at("entity_number") == int(i) + 1);
    const std::string name = entities[i].at("name");
    if (name == "transport-belt") ++belts;
    if (name == "inserter") ++inserters;
    if (name == "assembling-machine-1") ++assemblers;
  }
  CHECK(belts == 3);
  CHECK(inserters == 2);
  CHECK(assemblers == 1);
  // Assembler block center: anchor (1,1) spans tiles 1..3 in both axes.
  const json& a = entities[5];
  CHECK(a.at("position").at("x") == 1.5);
  CHECK(a.at("position").at("y") == 1.5);
  CHECK(a.at("recipe") == "item-1");
  // Predicted rate travels in the description field.
  CHECK(doc.at("blueprint").at("description") == "predicted_rate=50");
}

TEST_CASE("custom name tables rename recipes both ways") {
  NameTable names;
  names.recipe_names[1] = "iron-gear-wheel";
  const Blueprint bp = strip_blueprint();
  const std::string token = export_blueprint(bp, names);
  const json doc = reference_decode(token);
  CHECK(doc.at("blueprint").at("entities")[5].at("recipe") ==
        "iron-gear-wheel");
  CHECK(import_blueprint(token, names) == bp);

  // A non-empty table must cover every recipe it meets.
  Blueprint two = bp;
  two.assemblers.push_back({{1, 1}, 2});
  CHECK_THROWS_WITH_AS(export_blueprint(two, names),
                       doctest::Contains("no name-table entry for recipe id 2"),
                       CodecError);
  CHECK_THROWS_AS(import_blueprint(export_blueprint(bp), names), CodecError);
}

TEST_CASE("foreign version prefixes are rejected") {
  const std::string token = export_blueprint(merge_blueprint());
  CHECK_THROWS_WITH_AS(import_blueprint("1" + token.substr(1)),
                       doctest::Contains("version prefix"), CodecError);
  CHECK_THROWS_AS(import_blueprint(""), CodecError);
}

TEST_CASE("corrupt payloads are rejected") {
  std::string token = export_blueprint(merge_blueprint());
  CHECK_THROWS_AS(import_blueprint("0@@@@"), CodecError);          // bad base64
  CHECK_THROWS_AS(import_blueprint("0QUJD"), CodecError);          // not deflate
  CHECK_THROWS_AS(import_blueprint(token.substr(0, 9)), CodecError);
  CHECK_THROWS_AS(import_blueprint(forge_token("this is not json")),
                  CodecError);
  CHECK_THROWS_AS(import_blueprint(forge_token("{\"book\":1}")), CodecError);
}

TEST_CASE("unsupported entities are reported by name") {
  const json doc = json::parse(
      R"({"blueprint":{"item":"blueprint","snap-to-grid":{"x":2,"y":2},
          "entities":[{"entity_number":1,"name":"laser-turret",
                       "position":{"x":0.5,"y":0.5},"direction":0}]}})");
  CHECK_THROWS_WITH_AS(import_blueprint(forge_token(doc.dump())),
                       doctest::Contains("laser-turret"), CodecError);
}

TEST_CASE("entities off the declared grid are rejected") {
  const json doc = json::parse(
      R"({"blueprint":{"item":"blueprint","snap-to-grid":{"x":2,"y":2},
          "entities":[{"entity_number":1,"name":"transport-belt",
                       "position":{"x":5.5,"y":0.5},"direction":0}]}})");
  CHECK_THROWS_WITH_AS(import_blueprint(forge_token(doc.dump())),
                       doctest::Contains("outside"), CodecError);
}

TEST_CASE("exports are deterministic") {
  CHECK(export_blueprint(strip_blueprint()) ==
        export_blueprint(strip_blueprint()));
  CHECK(blueprint_to_text(strip_blueprint()) ==
        blueprint_to_text(strip_blueprint()));
}
