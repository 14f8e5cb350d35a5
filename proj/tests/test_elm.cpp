#include <doctest.h>

#include <cmath>
#include <random>

#include "elasticlane/elm.hpp"
#include "elasticlane/error.hpp"
#include "support.hpp"

using namespace elasticlane;

TEST_SUITE("elm") {

TEST_CASE("lane polyline validation") {
  CHECK_THROWS_AS(LanePolyline({0, 1}, {1.0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(LanePolyline({2, 1}, {1.0, 2.0}).validate(), InvalidArgument);
  CHECK_NOTHROW(LanePolyline({0, 3}, {1.0, 2.0}).validate());
  const auto v = LanePolyline::vertical(7.5, 5);
  CHECK(v.size() == 5);
  CHECK(v.valid_count() == 5);
  CHECK(v.xs[4] == 7.5);
}

TEST_CASE("level set is the per-row horizontal distance") {
  SUBCASE("vertical lane") {
    const auto phi = build_level_set(LanePolyline::vertical(5.0, 16), GridShape(16, 16));
    for (int y = 0; y < 16; ++y) {
      CHECK(phi(3, y) == -2.0);
      CHECK(phi(5, y) == 0.0);
    }
  }
  SUBCASE("slanted lane x_r = r") {
    std::vector<int> rows{0, 1, 2, 3, 4, 5, 6, 7};
    std::vector<double> xs{0, 1, 2, 3, 4, 5, 6, 7};
    const auto phi = build_level_set(LanePolyline(rows, xs), GridShape(8, 8));
    CHECK(phi(4, 2) == 2.0);
    for (int r = 0; r < 8; ++r) CHECK(phi(r, r) == 0.0);
  }
  SUBCASE("constant extension outside the lane extent, ties to the upper row") {
    LanePolyline lane({4, 8}, {10.0, 14.0});
    const auto phi = build_level_set(lane, GridShape(20, 12));
    CHECK(phi(10, 0) == 0.0);   // above: row 4
    CHECK(phi(14, 11) == 0.0);  // below: row 8
    CHECK(phi(10, 6) == 0.0);   // equidistant between 4 and 8 -> row 4
    CHECK(phi(14, 7) == 0.0);   // nearer row 8
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(build_level_set(LanePolyline({3}, {1.0}), GridShape(8, 8)), DegenerateLane);
    CHECK_THROWS_AS(build_level_set(LanePolyline({0, 1, 2}, {1.0, 2.0, 3.0}, {true, false, false}),
                                    GridShape(8, 8)),
                    DegenerateLane);
    CHECK_THROWS_AS(build_level_set(LanePolyline({0, 9}, {1.0, 2.0}), GridShape(8, 8)), InvalidArgument);
  }
}

TEST_CASE("smoothed Heaviside") {
  const double s = 4.0;
  CHECK(heaviside(-s, s) == 0.0);
  CHECK(heaviside(0.0, s) == 0.5);
  CHECK(heaviside(s, s) == 1.0);
  CHECK(heaviside(s / 2, s) == 0.75);
  CHECK(heaviside(-100.0, s) == 0.0);
  CHECK(heaviside_derivative(0.0, s) == 1.0 / 8.0);
  CHECK(heaviside_derivative(s, s) == 0.0);
  CHECK_THROWS_AS(HeavisideParams(0.0), InvalidArgument);
  CHECK(default_sigma_for_rows(36) == 3.0);
  CHECK(default_sigma_for_rows(18) == 5.0);

  double prev = -1.0;
  for (double phi = -6.0; phi <= 6.0; phi += 0.25) {
    CHECK(heaviside(phi, s) >= prev);
    prev = heaviside(phi, s);
  }
}

TEST_CASE("encode lane") {
  const GridShape shape(40, 16);
  std::vector<int> rows;
  std::vector<double> xs;
  for (int r = 4; r <= 12; ++r) {
    rows.push_back(r);
    xs.push_back(20.0);
  }
  const auto enc = encode_lane(LanePolyline(rows, xs), shape, HeavisideParams(3.0));
  for (int y = 0; y < 16; ++y) {
    CHECK(enc.range[y] == (y >= 4 && y <= 12));
    CHECK(enc.psi(20, y) == 0.0);
    CHECK(enc.psi(0, y) == -0.5);
    CHECK(enc.psi(39, y) == 0.5);
  }
  for (double v : enc.psi.values()) CHECK(std::abs(v) <= 0.5);
  CHECK(enc.steep_rows.empty());

  LanePolyline steep({0, 1, 2}, {5.0, 15.0, 16.0});
  const auto enc2 = encode_lane(steep, shape, HeavisideParams(3.0));
  REQUIRE(enc2.steep_rows.size() == 1);
  CHECK(enc2.steep_rows[0] == 0);
}

TEST_CASE("decode lane") {
  const GridShape shape(4, 4);
  SUBCASE("linear interpolation of the crossing") {
    Field2D psi(shape);
    const double row[4] = {-0.5, -0.2, 0.1, 0.4};
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) psi(x, y) = row[x];
    const auto lane = decode_lane(psi, RangeMask::full(4));
    REQUIRE(lane.valid_count() == 4);
    CHECK(lane.xs[0] == doctest::Approx(1.0 + 0.2 / 0.3).epsilon(1e-12));
  }
  SUBCASE("all positive row has no crossing") {
    Field2D psi(shape, 0.3);
    const auto lane = decode_lane(psi, RangeMask::full(4));
    CHECK(lane.valid_count() == 0);
  }
  SUBCASE("masked rows are skipped") {
    const auto enc = encode_lane(LanePolyline::vertical(1.5, 4), shape, HeavisideParams(3.0));
    const auto lane = decode_lane(enc.psi, RangeMask({true, false, true, false}));
    CHECK(lane.valid_count() == 2);
    CHECK(!lane.valid[1]);
  }
  SUBCASE("several crossings: nearest to the previously decoded row") {
    Field2D psi(GridShape(12, 4), -0.5);
    // Bottom row: one crossing near x = 2.5. Upper rows: two crossings.
    for (int x = 3; x < 12; ++x) psi(x, 3) = 0.5;
    for (int y = 0; y < 3; ++y) {
      for (int x = 2; x < 5; ++x) psi(x, y) = 0.5;
      for (int x = 8; x < 12; ++x) psi(x, y) = 0.5;
    }
    const auto lane = decode_lane(psi, RangeMask::full(4));
    REQUIRE(lane.valid_count() == 4);
    CHECK(lane.xs[3] == doctest::Approx(2.5));
    for (int y = 0; y < 3; ++y) CHECK(lane.xs[y] == doctest::Approx(1.5));
  }
}

TEST_CASE("encode/decode round trip on random smooth lanes") {
  std::mt19937_64 rng(7);
  const GridShape shape(100, 36);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto lane = testing::random_smooth_lane(rng, 100, 36);
    const auto enc = encode_lane(lane, shape, HeavisideParams(3.0));
    const auto dec = decode_lane(enc.psi, enc.range);
    REQUIRE(dec.valid_count() == 36);
    for (int r = 0; r < 36; ++r) worst = std::max(worst, std::abs(dec.xs[r] - lane.xs[r]));
  }
  CHECK(worst <= 0.5);
}

TEST_CASE("decode is translation equivariant for vertical lanes") {
  const GridShape shape(64, 16);
  const HeavisideParams hp(3.0);
  const auto base = decode_lane(encode_lane(LanePolyline::vertical(20.3, 16), shape, hp).psi,
                                RangeMask::full(16));
  for (int k = 1; k < 10; ++k) {
    const auto moved = decode_lane(encode_lane(LanePolyline::vertical(20.3 + k, 16), shape, hp).psi,
                                   RangeMask::full(16));
    for (int r = 0; r < 16; ++r) CHECK(moved.xs[r] - base.xs[r] == doctest::Approx(k).epsilon(1e-12));
  }
}

TEST_CASE("order and pad") {
  const GridShape shape(40, 8);
  const HeavisideParams hp(3.0);
  SUBCASE("sorted by bottom x, padded at the end") {
    const auto stack = order_and_pad({LanePolyline::vertical(30, 8), LanePolyline::vertical(10, 8)}, 4,
                                     shape, hp);
    CHECK(stack.count() == 2);
    CHECK(stack.exists == std::vector<bool>{true, true, false, false});
    CHECK(stack.source_index == std::vector<int>{1, 0, -1, -1});
    CHECK(decode_lane(stack.fields[0], stack.ranges[0]).xs[7] == doctest::Approx(10.0));
    CHECK(stack.fields[3].max_abs() == 0.0);
  }
  SUBCASE("ties broken by the top row, then input order") {
    LanePolyline a({0, 7}, {20.0, 12.0});
    LanePolyline b({0, 7}, {5.0, 12.0});
    const auto stack = order_and_pad({a, b, b}, 3, shape, hp);
    CHECK(stack.source_index == std::vector<int>{1, 2, 0});
  }
  SUBCASE("empty input") {
    const auto stack = order_and_pad({}, 4, shape, hp);
    CHECK(stack.count() == 0);
    CHECK(stack.exists == std::vector<bool>(4, false));
  }
  SUBCASE("capacity") {
    CHECK_THROWS_AS(order_and_pad({LanePolyline::vertical(5, 8), LanePolyline::vertical(9, 8)}, 1, shape, hp),
                    CapacityExceeded);
  }
}

TEST_CASE("departure point filter scans bottom-up") {
  // Listed bottom-up: row 2 = 100, row 1 = 104, row 0 = 170.
  const LanePolyline lane({0, 1, 2}, {170.0, 104.0, 100.0});
  const auto out = filter_departure_points(lane);
  CHECK(out.valid == std::vector<bool>{false, true, true});

  const LanePolyline smooth({0, 1, 2}, {120.0, 104.0, 100.0});
  CHECK(filter_departure_points(smooth).valid == std::vector<bool>{true, true, true});

  const auto strict = filter_departure_points(smooth, 0.0);
  CHECK(strict.valid == std::vector<bool>{false, false, true});
}

}  // TEST_SUITE
