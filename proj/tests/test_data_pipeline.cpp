#include <gtest/gtest.h>

#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddgf/container.hpp"
#include "ddgf/demand.hpp"
#include "ddgf/error.hpp"
#include "ddgf/trips.hpp"
#include "ddgf/windows.hpp"
#include "test_util.hpp"

namespace ddgf {
namespace {

const std::string kFixtures = DDGF_FIXTURE_DIR;

ParseResult parse_string(const std::string& csv) {
  std::istringstream in(csv);
  return parse_trips(in);
}

constexpr const char* kHeader =
    "tripduration,starttime,stoptime,start station id,end station id\n";

TripRecord trip(const std::string& from, const std::string& start, const std::string& to = "Z") {
  TripRecord t;
  t.start_station = from;
  t.end_station = to;
  t.start_time = *parse_timestamp(start);
  t.end_time = t.start_time + 600;
  t.duration_s = 600;
  return t;
}

TEST(ParseTimestamp, SupportedLayouts) {
  EXPECT_EQ(*parse_timestamp("1970-01-01 01:00:00"), 3600);
  EXPECT_EQ(*parse_timestamp("2013-07-01 00:00:00"), *parse_timestamp("7/1/2013 0:00"));
  EXPECT_EQ(*parse_timestamp("2016-10-01 00:00:07.1230"), *parse_timestamp("10/1/2016 00:00:07"));
  EXPECT_EQ(format_timestamp(*parse_timestamp("2015-02-28 23:59:59")), "2015-02-28 23:59:59");
  EXPECT_FALSE(parse_timestamp("2015-02-29 00:00:00"));
  EXPECT_FALSE(parse_timestamp("yesterday"));
  EXPECT_FALSE(parse_timestamp("2015-01-01"));
}

TEST(ParseTrips, CleanInput) {
  const auto r = parse_string(std::string(kHeader) +
                              "60,2013-07-01 00:00:00,2013-07-01 00:01:00,1,2\n"
                              "60,2013-07-01 01:00:00,2013-07-01 01:01:00,2,1\n"
                              "60,2013-07-01 02:00:00,2013-07-01 02:01:00,1,1\n");
  EXPECT_EQ(r.trips.size(), 3u);
  EXPECT_TRUE(r.rejections.empty());
}

TEST(ParseTrips, NegativeDurationIsRejectedWithReason) {
  const auto r = parse_string(std::string(kHeader) + "60,2013-07-01 00:10:00,2013-07-01 00:01:00,1,2\n");
  ASSERT_EQ(r.rejections.size(), 1u);
  EXPECT_EQ(r.rejections[0].reason, "negative_duration");
  EXPECT_EQ(r.rejections[0].line, 2u);
  EXPECT_TRUE(r.trips.empty());
}

TEST(ParseTrips, EveryBadRowLoggedOnceWithReasonCode) {
  const auto r = parse_trips_file(kFixtures + "/trips_bad_rows.csv");
  EXPECT_EQ(r.trips.size(), 1u);
  ASSERT_EQ(r.rejections.size(), 4u);
  EXPECT_EQ(r.rejections[0].reason, "negative_duration");
  EXPECT_EQ(r.rejections[1].reason, "bad_timestamp");
  EXPECT_EQ(r.rejections[2].reason, "bad_coordinate");
  EXPECT_EQ(r.rejections[3].reason, "field_count");
  for (std::size_t k = 0; k < r.rejections.size(); ++k) EXPECT_EQ(r.rejections[k].line, k + 3);
}

TEST(ParseTrips, MissingColumnsListed) {
  try {
    parse_string("tripduration,starttime,bikeid\n1,2013-07-01 00:00:00,3\n");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    const std::string msg = e.what();
    for (const char* name : {"end_time", "start_station", "end_station"}) {
      EXPECT_NE(msg.find(name), std::string::npos) << name;
    }
    EXPECT_EQ(msg.find("start_time"), std::string::npos);
  }
}

TEST(ParseTrips, CitiBikeHeaderVariants) {
  const auto old_style = parse_trips_file(kFixtures + "/trips_4.csv");
  EXPECT_EQ(old_style.trips.size(), 4u);
  EXPECT_EQ(old_style.trips[0].user_type, UserType::Customer);
  EXPECT_DOUBLE_EQ(*old_style.trips[0].start_lat, 40.75);

  const auto new_style = parse_trips_file(kFixtures + "/trips_2016_header.csv");
  ASSERT_EQ(new_style.trips.size(), 2u);
  EXPECT_TRUE(new_style.rejections.empty());
  EXPECT_EQ(new_style.trips[0].start_station, "471");
  EXPECT_EQ(new_style.trips[1].duration_s, 1073.0);

  const auto slashes = parse_trips_file(kFixtures + "/trips_2015_slashes.csv");
  ASSERT_EQ(slashes.trips.size(), 2u);
  EXPECT_EQ(slashes.trips[0].start_time, *parse_timestamp("2015-01-01 00:01:00"));
}

TEST(ParseTrips, GzipInputMatchesPlainInput) {
  const auto dir = std::filesystem::temp_directory_path() / "ddgf_gzip_test";
  std::filesystem::create_directories(dir);
  const std::string gz_path = (dir / "trips.csv.gz").string();
  std::ifstream in(kFixtures + "/trips_4.csv", std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  gzFile gz = gzopen(gz_path.c_str(), "wb");
  ASSERT_NE(gz, nullptr);
  gzwrite(gz, text.data(), static_cast<unsigned>(text.size()));
  gzclose(gz);
  const auto a = parse_trips_file(gz_path);
  const auto b = parse_trips_file(kFixtures + "/trips_4.csv");
  ASSERT_EQ(a.trips.size(), b.trips.size());
  EXPECT_EQ(build_demand_matrix(a.trips), build_demand_matrix(b.trips));
}

TEST(DemandMatrix, FourTripFixtureHandCount) {
  const auto r = parse_trips_file(kFixtures + "/trips_4.csv");
  const DemandMatrix d = build_demand_matrix(r.trips);
  ASSERT_EQ(d.stations(), (std::vector<std::string>{"A", "B"}));
  ASSERT_EQ(d.hours(), 1u);
  EXPECT_EQ(d.at(0, 0), 3u);
  EXPECT_EQ(d.at(1, 0), 1u);
  EXPECT_EQ(d.total(), r.trips.size());
  EXPECT_EQ(d.hour_of_day(0), 8);
}

TEST(DemandMatrix, GapHoursAreExplicitZeros) {
  const DemandMatrix d = build_demand_matrix(
      {trip("A", "2013-07-01 08:10:00"), trip("B", "2013-07-01 10:59:00"), trip("A", "2013-07-01 10:00:00")});
  ASSERT_EQ(d.hours(), 3u);
  EXPECT_EQ(d.at(0, 1), 0u);
  EXPECT_EQ(d.at(1, 1), 0u);
  EXPECT_EQ(d.at(0, 2), 1u);
  EXPECT_EQ(d.at(1, 2), 1u);
}

TEST(DemandMatrix, StationFilter) {
  const DemandMatrix d = build_demand_matrix(
      {trip("A", "2013-07-01 08:10:00"), trip("B", "2013-07-01 08:20:00"), trip("A", "2013-07-01 09:00:00")},
      std::set<std::string>{"A"});
  ASSERT_EQ(d.stations_count(), 1u);
  EXPECT_EQ(d.at(0, 0), 1u);
  EXPECT_EQ(d.at(0, 1), 1u);
}

TEST(DemandMatrix, EmptyTripListIsAnError) { EXPECT_THROW(build_demand_matrix({}), DataError); }

TEST(DemandMatrix, ConservationAndDeterminismOnRandomTrips) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TripRecord> trips;
    const std::size_t count = 1 + rng.below(200);
    for (std::size_t k = 0; k < count; ++k) {
      TripRecord t;
      t.start_station = std::to_string(rng.below(7));
      t.end_station = std::to_string(rng.below(7));
      t.start_time = 1'400'000'000 + static_cast<LocalSeconds>(rng.below(72 * 3600));
      t.end_time = t.start_time + 60;
      trips.push_back(t);
    }
    const DemandMatrix d = build_demand_matrix(trips);
    EXPECT_EQ(d.total(), trips.size());
    EXPECT_EQ(build_demand_matrix(trips), d);
  }
}

TEST(DemandContainer, RoundTripsAndIsByteStable) {
  const auto dir = std::filesystem::temp_directory_path() / "ddgf_dmx_test";
  std::filesystem::create_directories(dir);
  const DemandMatrix d({"72", "79", "82"}, 380000, 2, {1, 2, 3, 4, 5, 4000000000u});
  const std::string a = (dir / "a.dmx").string(), b = (dir / "b.dmx").string();
  save_demand(a, d);
  save_demand(b, load_demand(a));
  EXPECT_EQ(load_demand(a), d);
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str().substr(0, 8), "DDGFCTR1");
  EXPECT_THROW(read_container(a, "gfl"), DataError);
}

}  // namespace
}  // namespace ddgf
