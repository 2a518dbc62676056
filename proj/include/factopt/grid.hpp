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

#ifndef FACTOPT_GRID_HPP
#define FACTOPT_GRID_HPP

#include <cassert>
#include <compare>
#include <vector>

namespace factopt {

// Tile coordinates are 1-based. x runs west->east in 1..w, y runs
// north->south in 1..h; (1,1) is the north-west corner.
struct GridCoord {
  int x = 0;
  int y = 0;
  auto operator<=>(const GridCoord&) const = default;
};

// Direction codes. North decreases y, South increases y, East increases x,
// West decreases x. Code 0 is reserved for "no object" in object grids.
enum class Dir : int { North = 1, South = 2, East = 3, West = 4 };

inline constexpr Dir kAllDirs[4] = {Dir::North, Dir::South, Dir::East,
                                    Dir::West};

inline int dir_dx(Dir d) {
  switch (d) {
    case Dir::East: return 1;
    case Dir::West: return -1;
    default: return 0;
  }
}

inline int dir_dy(Dir d) {
  switch (d) {
    case Dir::North: return -1;
    case Dir::South: return 1;
    default: return 0;
  }
}

inline Dir dir_opposite(Dir d) {
  switch (d) {
    case Dir::North: return Dir::South;
    case Dir::South: return Dir::North;
    case Dir::East: return Dir::West;
    default: return Dir::East;
  }
}

inline GridCoord step(GridCoord c, Dir d) {
  return {c.x + dir_dx(d), c.y + dir_dy(d)};
}

inline char dir_letter(Dir d) {
  switch (d) {
    case Dir::North: return 'N';
    case Dir::South: return 'S';
    case Dir::East: return 'E';
    default: return 'W';
  }
}

// Row-major w x h grid with 1-based accessors matching GridCoord.
template <typename T>
class Grid {
 public:
  Grid() : w_(0), h_(0) {}
  Grid(int w, int h, T fill = T()) : w_(w), h_(h), data_(size_t(w) * h, fill) {}

  int width() const { return w_; }
  int height() const { return h_; }

  bool in_bounds(GridCoord c) const {
    return c.x >= 1 && c.x <= w_ && c.y >= 1 && c.y <= h_;
  }

  T& at(int x, int y) {
    assert(in_bounds({x, y}));
    return data_[size_t(y - 1) * w_ + (x - 1)];
  }
  const T& at(int x, int y) const {
    assert(in_bounds({x, y}));
    return data_[size_t(y - 1) * w_ + (x - 1)];
  }
  T& at(GridCoord c) { return at(c.x, c.y); }
  const T& at(GridCoord c) const { return at(c.x, c.y); }

  // Flattened 1-based tile index (y-1)*w + x, as used by packing ledgers.
  int flat_index(GridCoord c) const { return (c.y - 1) * w_ + c.x; }
  GridCoord from_flat(int idx) const {
    return {(idx - 1) % w_ + 1, (idx - 1) / w_ + 1};
  }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  int w_, h_;
  std::vector<T> data_;
};

}  // namespace factopt

#endif  // FACTOPT_GRID_HPP
