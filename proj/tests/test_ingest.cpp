#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tmine/errors.hpp"
#include "tmine/ingest.hpp"

using namespace tmine;

namespace {

const char* kBasic =
    "SITE,TRAVERSE,EAST,NORTH,MATERIAL,WEIGHT,Cu,Zn\n"
    "s1,t1,0,0,soil,1,10.5,20\n"
    "s1,t1,100,0,soil,1,<0.5,21\n"
    "s1,t2,200,0,soil,2,12,\n";

SampleTable resolved_basic() {
  return resolve_censoring(parse_samples_text(kBasic), CensoringPolicy{});
}

}  // namespace

TEST_CASE("parse: rows, element names, censored and missing cells") {
  const SampleTable t = parse_samples_text(kBasic);
  CHECK(t.rows.size() == 3);
  CHECK(t.element_names == std::vector<std::string>{"Cu", "Zn"});
  CHECK(t.material_names == std::vector<std::string>{"soil"});
  CHECK(t.rows[0].concentrations[0].is_value());
  CHECK(t.rows[0].concentrations[0].x == 10.5);
  CHECK(t.rows[1].concentrations[0].is_censored());
  CHECK(t.rows[1].concentrations[0].x == 0.5);
  CHECK(t.rows[2].concentrations[1].is_missing());
  CHECK(t.rows[2].weight == 2.0);
  CHECK(t.rows[0].weight == 1.0);
}

TEST_CASE("parse: semicolon delimiter is autodetected") {
  const SampleTable t = parse_samples_text(
      "SITE;TRAVERSE;EAST;NORTH;MATERIAL;Fe\n"
      "s1;t1;0;0;soil;1.5\n"
      "s1;t1;10;0;soil;2.5\n");
  CHECK(t.rows.size() == 2);
  CHECK(t.element_names == std::vector<std::string>{"Fe"});
  CHECK(t.rows[1].concentrations[0].x == 2.5);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_WITH_AS(parse_samples_text("SITE,TRAVERSE,EAST,NORTH,MATERIAL,Cu\n"),
                       doctest::Contains("no samples"), input_error);
  CHECK_THROWS_WITH_AS(
      parse_samples_text("SITE,TRAVERSE,EAST,NORTH,Cu\ns1,t,0,0,1\n"),
      doctest::Contains("MATERIAL"), input_error);
  CHECK_THROWS_WITH_AS(
      parse_samples_text("SITE,TRAVERSE,EAST,NORTH,MATERIAL\ns1,t,0,0,soil\n"),
      doctest::Contains("no element columns"), input_error);
  // Nonnumeric cell names the row and column.
  CHECK_THROWS_WITH_AS(
      parse_samples_text(
          "SITE,TRAVERSE,EAST,NORTH,MATERIAL,Cu\ns1,t,0,0,soil,oops\n"),
      doctest::Contains("column Cu"), input_error);
  CHECK_THROWS_AS(parse_samples_text(""), input_error);
  CHECK_THROWS_AS(parse_samples_text(
                      "SITE,TRAVERSE,EAST,NORTH,MATERIAL,Cu\ns1,t,0,0,soil\n"),
                  input_error);  // short row
  CHECK_THROWS_AS(parse_samples(std::string("/nonexistent/file.csv")), io_error);
}

TEST_CASE("censoring policies") {
  const SampleTable raw = parse_samples_text(kBasic);

  SUBCASE("half limit") {
    const SampleTable t = resolve_censoring(raw, CensoringPolicy{});
    CHECK(t.rows[1].concentrations[0].is_value());
    CHECK(t.rows[1].concentrations[0].x == 0.25);
  }
  SUBCASE("fixed fraction 1.0 keeps the limit") {
    CensoringPolicy policy;
    policy.kind = CensoringPolicy::Kind::FixedFraction;
    policy.fraction = 1.0;
    const SampleTable t = resolve_censoring(raw, policy);
    CHECK(t.rows[1].concentrations[0].x == 0.5);
  }
  SUBCASE("drop marks the cell missing") {
    CensoringPolicy policy;
    policy.kind = CensoringPolicy::Kind::Drop;
    const SampleTable t = resolve_censoring(raw, policy);
    CHECK(t.rows[1].concentrations[0].is_missing());
  }
  SUBCASE("bad fraction") {
    CensoringPolicy policy;
    policy.kind = CensoringPolicy::Kind::FixedFraction;
    policy.fraction = 0.0;
    CHECK_THROWS_AS(resolve_censoring(raw, policy), input_error);
  }
  SUBCASE("idempotence") {
    const SampleTable once = resolve_censoring(raw, CensoringPolicy{});
    const SampleTable twice = resolve_censoring(once, CensoringPolicy{});
    for (std::size_t r = 0; r < once.rows.size(); ++r)
      for (std::size_t e = 0; e < once.element_names.size(); ++e) {
        CHECK(once.rows[r].concentrations[e].state ==
              twice.rows[r].concentrations[e].state);
        CHECK(once.rows[r].concentrations[e].x ==
              twice.rows[r].concentrations[e].x);
      }
  }
  SUBCASE("nonpositive values are rejected") {
    const SampleTable bad = parse_samples_text(
        "SITE,TRAVERSE,EAST,NORTH,MATERIAL,Cu\n"
        "s1,t,0,0,soil,0\n"
        "s1,t,10,0,soil,1\n");
    CHECK_THROWS_AS(resolve_censoring(bad, CensoringPolicy{}), input_error);
  }
}

TEST_CASE("projection: collinear points keep their spacing") {
  const SampleTable t = resolved_basic();
  const Transect tr = project_to_transect(t, "s1", "soil");
  REQUIRE(tr.n() == 3);
  CHECK(tr.positions[0] == doctest::Approx(0.0));
  CHECK(tr.positions[1] == doctest::Approx(100.0));
  CHECK(tr.positions[2] == doctest::Approx(200.0));
  // Zn was missing in 1/3 rows (> 10%), so it is dropped.
  CHECK(tr.element_names == std::vector<std::string>{"Cu"});
  CHECK(tr.dropped_elements == std::vector<std::string>{"Zn"});
  CHECK((tr.Y.array() > 0.0).all());
}

TEST_CASE("projection is invariant under rigid motions (up to reflection)") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 12;
    std::string csv = "SITE,TRAVERSE,EAST,NORTH,MATERIAL,Cu\n";
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < n; ++i) {
      const double along = 1000.0 * unif(rng);
      const double perp = 50.0 * (unif(rng) - 0.5);
      pts.emplace_back(along, perp);
      csv += "s,t," + std::to_string(along) + "," + std::to_string(perp) +
             ",m," + std::to_string(1.0 + unif(rng)) + "\n";
    }
    const double angle = 2.0 * 3.14159265358979 * unif(rng);
    const double tx = 5000.0 * (unif(rng) - 0.5), ty = 5000.0 * (unif(rng) - 0.5);
    std::string csv_rot = "SITE,TRAVERSE,EAST,NORTH,MATERIAL,Cu\n";
    for (int i = 0; i < n; ++i) {
      const double e = std::cos(angle) * pts[std::size_t(i)].first -
                       std::sin(angle) * pts[std::size_t(i)].second + tx;
      const double nn = std::sin(angle) * pts[std::size_t(i)].first +
                        std::cos(angle) * pts[std::size_t(i)].second + ty;
      csv_rot += "s,t," + std::to_string(e) + "," + std::to_string(nn) + ",m,1\n";
    }
    const Transect a = project_to_transect(
        resolve_censoring(parse_samples_text(csv), CensoringPolicy{}), "s", "m");
    const Transect b = project_to_transect(
        resolve_censoring(parse_samples_text(csv_rot), CensoringPolicy{}), "s", "m");
    REQUIRE(a.n() == b.n());
    const double len = a.positions[a.n() - 1];
    // Same positions, or globally reflected.
    double direct = 0.0, reflected = 0.0;
    for (int i = 0; i < a.n(); ++i) {
      direct = std::max(direct, std::abs(a.positions[i] - b.positions[i]));
      reflected = std::max(
          reflected, std::abs(a.positions[i] - (len - b.positions[b.n() - 1 - i])));
    }
    CHECK(std::min(direct, reflected) < 1e-6 * std::max(len, 1.0));
  }
}

TEST_CASE("projection: three parallel traverses merge onto the center line") {
  // Pairs offset +-150 m perpendicular at along-line stations 0/500/1000;
  // leading eigenvector of the 2x2 covariance is the along-line axis.
  const char* csv =
      "SITE,TRAVERSE,EAST,NORTH,MATERIAL,Cu\n"
      "s,t1,0,150,m,1\n"
      "s,t2,0,-150,m,2\n"
      "s,t1,500,150,m,3\n"
      "s,t2,500,-150,m,4\n"
      "s,t1,1000,150,m,5\n"
      "s,t2,1000,-150,m,6\n";
  const Transect tr = project_to_transect(
      resolve_censoring(parse_samples_text(csv), CensoringPolicy{}), "s", "m");
  REQUIRE(tr.n() == 6);
  const double expected[] = {0.0, 0.0, 500.0, 500.0, 1000.0, 1000.0};
  for (int i = 0; i < 6; ++i)
    CHECK(tr.positions[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  // Ties keep input order: Cu values arrive station by station.
  CHECK(tr.Y(0, 0) == 1.0);
  CHECK(tr.Y(1, 0) == 2.0);
  CHECK(tr.Y(4, 0) == 5.0);
  CHECK(tr.Y(5, 0) == 6.0);
}

TEST_CASE("projection errors") {
  const SampleTable t = resolved_basic();
  CHECK_THROWS_WITH_AS(project_to_transect(t, "s1", "plant"),
                       doctest::Contains("insufficient"), input_error);
  const SampleTable identical = resolve_censoring(
      parse_samples_text("SITE,TRAVERSE,EAST,NORTH,MATERIAL,Cu\n"
                         "s,t,5,5,m,1\n"
                         "s,t,5,5,m,2\n"),
      CensoringPolicy{});
  CHECK_THROWS_WITH_AS(project_to_transect(identical, "s", "m"),
                       doctest::Contains("degenerate"), input_error);
  // Unresolved censored cells are refused.
  const SampleTable raw = parse_samples_text(kBasic);
  CHECK_THROWS_AS(project_to_transect(raw, "s1", "soil"), input_error);
}

TEST_CASE("imputation fills missing cells from the nearest neighbour") {
  const char* csv =
      "SITE,TRAVERSE,EAST,NORTH,MATERIAL,Cu,Pb\n"
      "s,t,0,0,m,1,9\n"
      "s,t,100,0,m,2,\n"
      "s,t,110,0,m,3,7\n"
      "s,t,200,0,m,4,6\n"
      "s,t,300,0,m,5,5\n"
      "s,t,400,0,m,6,4\n"
      "s,t,500,0,m,7,3\n"
      "s,t,600,0,m,8,2\n"
      "s,t,700,0,m,9,1\n"
      "s,t,800,0,m,10,0.5\n";
  TransectOptions options;
  options.max_missing_fraction = 0.2;
  const Transect tr = project_to_transect(
      resolve_censoring(parse_samples_text(csv), CensoringPolicy{}), "s", "m",
      options);
  // Pb missing at position 100; nearest neighbour along the transect is 110.
  CHECK(tr.element_names == std::vector<std::string>{"Cu", "Pb"});
  CHECK(tr.Y(1, 1) == 7.0);
}
