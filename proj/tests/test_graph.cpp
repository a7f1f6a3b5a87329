#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "ddgf/error.hpp"
#include "ddgf/graph.hpp"
#include "test_util.hpp"

namespace ddgf {
namespace {

TripRecord between(const std::string& from, const std::string& to, double duration = 600.0) {
  TripRecord t;
  t.start_station = from;
  t.end_station = to;
  t.start_time = 0;
  t.end_time = static_cast<LocalSeconds>(duration);
  t.duration_s = duration;
  return t;
}

DemandMatrix two_stations() { return DemandMatrix({"i", "j"}, 0, 3, {1, 2, 3, 3, 1, 2}); }

void expect_adjacency_invariants(const AdjacencyMatrix& a) {
  for (std::size_t i = 0; i < a.n(); ++i) {
    EXPECT_EQ(a.values(i, i), 0.0);
    for (std::size_t j = 0; j < a.n(); ++j) {
      EXPECT_EQ(a.values(i, j), a.values(j, i));
      EXPECT_GE(a.values(i, j), 0.0);
    }
  }
}

TEST(Pearson, Cases) {
  const std::vector<double> x{1, 2, 3}, y{1, 2, 4}, neg{-1, -2, -3}, flat{5, 5, 5};
  EXPECT_DOUBLE_EQ(pearson(x, x), 1.0);
  EXPECT_DOUBLE_EQ(pearson(x, neg), -1.0);
  // 3 / sqrt(2 * 42/9)
  EXPECT_NEAR(pearson(x, y), 0.9819805060619657, 1e-15);
  EXPECT_EQ(pearson(x, flat), 0.0);
  EXPECT_THROW(pearson(x, std::vector<double>{1, 2}), ShapeError);
}

TEST(Haversine, HalfKilometreNorthward) {
  const double dlat = 0.5 / 6371.0 * 180.0 / std::numbers::pi;
  EXPECT_NEAR(haversine_km(40.0, -73.0, 40.0 + dlat, -73.0), 0.5, 1e-12);
}

TEST(BuildAdjacency, SparseDistanceInverseWithinThreshold) {
  const double dlat = 0.5 / 6371.0 * 180.0 / std::numbers::pi;
  TripRecord t = between("i", "j");
  t.start_lat = 40.0;
  t.start_lon = -73.0;
  t.end_lat = 40.0 + dlat;
  t.end_lon = -73.0;
  const auto a = build_adjacency(GraphKind::SparseDistance, {t}, two_stations(), {1.0});
  EXPECT_NEAR(a.values(0, 1), 2.0, 1e-9);
  expect_adjacency_invariants(a);
  const auto far = build_adjacency(GraphKind::SparseDistance, {t}, two_stations(), {0.4});
  EXPECT_EQ(far.values(0, 1), 0.0);
}

TEST(BuildAdjacency, SparseDistanceNeedsCoordinates) {
  try {
    build_adjacency(GraphKind::SparseDistance, {between("i", "j")}, two_stations());
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(" i"), std::string::npos);
  }
}

TEST(BuildAdjacency, DemandCountsBothDirections) {
  std::vector<TripRecord> trips;
  for (int k = 0; k < 3; ++k) trips.push_back(between("i", "j"));
  for (int k = 0; k < 2; ++k) trips.push_back(between("j", "i"));
  trips.push_back(between("i", "i"));
  const auto a = build_adjacency(GraphKind::Demand, trips, two_stations());
  EXPECT_EQ(a.values(0, 1), 5.0);
  expect_adjacency_invariants(a);
}

TEST(BuildAdjacency, AverageTripDuration) {
  const auto a = build_adjacency(GraphKind::AverageTripDuration,
                                 {between("i", "j", 300), between("j", "i", 900)}, two_stations());
  EXPECT_EQ(a.values(0, 1), 600.0);
  const DemandMatrix three({"i", "j", "k"}, 0, 2, {1, 2, 3, 4, 5, 6});
  const auto b = build_adjacency(GraphKind::AverageTripDuration, {between("i", "j", 300)}, three);
  EXPECT_EQ(b.values(0, 2), 0.0);
}

TEST(BuildAdjacency, DemandCorrelationClipsNegativeAndZeroesDiagonal) {
  const DemandMatrix d({"a", "b", "c"}, 0, 4, {1, 2, 3, 4, 2, 4, 6, 8, 4, 3, 2, 1});
  const auto a = build_adjacency(GraphKind::DemandCorrelation, {}, d);
  EXPECT_EQ(a.values(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(a.values(0, 1), 1.0);
  EXPECT_EQ(a.values(0, 2), 0.0);
  expect_adjacency_invariants(a);
}

TEST(BuildAdjacency, DemandConservationOnRandomTrips) {
  Rng rng(31);
  const DemandMatrix d({"0", "1", "2", "3", "4"}, 0, 2, std::vector<std::uint32_t>(10, 1));
  std::vector<TripRecord> trips;
  std::size_t inter = 0;
  for (int k = 0; k < 500; ++k) {
    const auto a = std::to_string(rng.below(6)), b = std::to_string(rng.below(6));  // "5" is unknown
    trips.push_back(between(a, b));
    if (a != b && a != "5" && b != "5") ++inter;
  }
  const auto adj = build_adjacency(GraphKind::Demand, trips, d);
  EXPECT_EQ(sum(adj.values), 2.0 * static_cast<double>(inter));
  expect_adjacency_invariants(adj);
}

TEST(NormalizeAdjacency, ZeroAdjacencyGivesIdentity) {
  AdjacencyMatrix a{GraphKind::Demand, Tensor(3, 3)};
  EXPECT_EQ(normalize_adjacency(a).values, Tensor::identity(3));
}

TEST(NormalizeAdjacency, TwoNodeHandExample) {
  AdjacencyMatrix a{GraphKind::Demand, Tensor::from_rows({{0, 1}, {1, 0}})};
  EXPECT_LE(max_abs_diff(normalize_adjacency(a).values, Tensor::from_rows({{0.5, 0.5}, {0.5, 0.5}})),
            1e-15);
}

TEST(NormalizeAdjacency, IdentityKindIsExactlyIdentity) {
  const auto a = build_adjacency(GraphKind::Identity, {}, two_stations());
  EXPECT_EQ(normalize_adjacency(a).values, Tensor::identity(2));
}

TEST(NormalizeAdjacency, RejectsAsymmetricInput) {
  AdjacencyMatrix a{GraphKind::Demand, Tensor::from_rows({{0, 1}, {2, 0}})};
  EXPECT_THROW(normalize_adjacency(a), ContractError);
}

TEST(NormalizeAdjacency, SymmetricWithSpectralRadiusAtMostOne) {
  Rng rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(8);
    AdjacencyMatrix a{GraphKind::Demand, Tensor(n, n)};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double w = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 50.0);
        a.values(i, j) = w;
        a.values(j, i) = w;
      }
    const Tensor f = normalize_adjacency(a).values;
    EXPECT_LE(max_abs_diff(f, transpose(f)), 1e-12);
    EXPECT_LE(test::spectral_radius(f), 1.0 + 1e-9);
  }
}

TEST(FilterContainer, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "ddgf_gfl_test";
  std::filesystem::create_directories(dir);
  AdjacencyMatrix a{GraphKind::Demand, Tensor::from_rows({{0, 3}, {3, 0}})};
  GraphFilter f = normalize_adjacency(a);
  f.stations = {"x", "y"};
  const std::string path = (dir / "f.gfl").string();
  save_filter(path, f);
  const GraphFilter g = load_filter(path);
  EXPECT_EQ(g.values, f.values);
  EXPECT_EQ(g.stations, f.stations);
  EXPECT_EQ(g.provenance.at("kind"), "DE");
}

}  // namespace
}  // namespace ddgf
