#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tmine/errors.hpp"
#include "tmine/ranking.hpp"

using namespace tmine;

namespace {

CurvatureProfile make_profile(const std::string& a, const std::string& b, double c) {
  CurvatureProfile p;
  p.element1 = a;
  p.element2 = b;
  p.c = c;
  return p;
}

}  // namespace

TEST_CASE("two-element matrix") {
  const std::vector<std::string> names{"a", "b"};
  const auto m = c_matrix({make_profile("a", "b", 0.4)}, names, "soil");
  CHECK(m.C(0, 1) == 0.4);
  CHECK(m.C(1, 0) == 0.4);
  CHECK(m.C(0, 0) == 0.0);
  CHECK(m.C(1, 1) == 0.0);

  const auto ranked = top_k(m, 1);
  REQUIRE(ranked.pairs.size() == 1);
  CHECK(ranked.pairs[0].element1 == "a");
  CHECK(ranked.pairs[0].element2 == "b");
  CHECK(ranked.pairs[0].c == 0.4);

  const auto scores = pathfinder_scores(m);
  CHECK(scores[0].row_mean == 0.4);
  CHECK(scores[1].row_mean == 0.4);
}

TEST_CASE("degenerate profiles give the zero matrix and zero scores") {
  const std::vector<std::string> names{"a", "b", "c"};
  const auto m = c_matrix({make_profile("a", "b", 0.0), make_profile("a", "c", 0.0),
                           make_profile("b", "c", 0.0)},
                          names, "soil");
  CHECK(m.C.cwiseAbs().maxCoeff() == 0.0);
  for (const auto& s : pathfinder_scores(m)) {
    CHECK(s.row_mean == 0.0);
    CHECK(s.row_max == 0.0);
  }
}

TEST_CASE("matrix requires full pair coverage") {
  const std::vector<std::string> names{"a", "b", "c"};
  CHECK_THROWS_WITH_AS(
      c_matrix({make_profile("a", "b", 0.1)}, names, "soil"),
      doctest::Contains("missing pair"), input_error);
  CHECK_THROWS_AS(c_matrix({make_profile("a", "b", 0.1),
                            make_profile("a", "b", 0.2),
                            make_profile("b", "c", 0.1),
                            make_profile("a", "c", 0.1)},
                           names, "soil"),
                  input_error);
}

TEST_CASE("matrix symmetry is exact and diagonal zero for random profiles") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int d = 7;
  std::vector<std::string> names;
  for (int i = 0; i < d; ++i) names.push_back("El" + std::to_string(i));
  std::vector<CurvatureProfile> profiles;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      profiles.push_back(make_profile(names[i], names[j], unif(rng)));
  const auto m = c_matrix(profiles, names, "x");
  CHECK(m.C == m.C.transpose());
  for (int i = 0; i < d; ++i) CHECK(m.C(i, i) == 0.0);
}

TEST_CASE("top_k clamps, sorts and breaks ties lexicographically") {
  const std::vector<std::string> names{"b", "a", "c"};
  // Pairs in element order: (b,a)=0.5, (b,c)=0.5, (a,c)=0.2
  const auto m = c_matrix({make_profile("b", "a", 0.5), make_profile("b", "c", 0.5),
                           make_profile("a", "c", 0.2)},
                          names, "soil");
  const auto all = top_k(m, 100);  // k beyond the pair count: full list
  REQUIRE(all.pairs.size() == 3);
  // Ties at 0.5: label "b/a" sorts before "b/c".
  CHECK(all.pairs[0].element1 == "b");
  CHECK(all.pairs[0].element2 == "a");
  CHECK(all.pairs[1].element1 == "b");
  CHECK(all.pairs[1].element2 == "c");
  CHECK(all.pairs[2].c == 0.2);
  CHECK_THROWS_AS(top_k(m, 0), input_error);
}

TEST_CASE("top_k values equal the k largest upper-triangle entries") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int d = 9;
  std::vector<std::string> names;
  for (int i = 0; i < d; ++i) names.push_back("E" + std::to_string(i));
  std::vector<CurvatureProfile> profiles;
  std::vector<double> upper;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double c = unif(rng);
      profiles.push_back(make_profile(names[i], names[j], c));
      upper.push_back(c);
    }
  const auto m = c_matrix(profiles, names, "x");
  std::sort(upper.rbegin(), upper.rend());
  for (int k : {1, 5, 20, 36}) {
    const auto ranked = top_k(m, k);
    REQUIRE(int(ranked.pairs.size()) == std::min<int>(k, int(upper.size())));
    for (std::size_t i = 0; i < ranked.pairs.size(); ++i)
      CHECK(ranked.pairs[i].c == upper[i]);
  }
}

TEST_CASE("planted element dominates row sums and pathfinder ranking") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(0.0, 0.2);
  const std::vector<std::string> names{"w", "x", "y", "z"};
  std::vector<CurvatureProfile> profiles;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      double c = unif(rng);
      if (names[i] == "y" || names[j] == "y") c += 1.0;  // the planted element
      profiles.push_back(make_profile(names[i], names[j], c));
    }
  const auto m = c_matrix(profiles, names, "soil");
  double best_sum = -1.0;
  int best_row = -1;
  for (int i = 0; i < 4; ++i) {
    const double s = m.C.row(i).sum();
    if (s > best_sum) {
      best_sum = s;
      best_row = i;
    }
  }
  CHECK(names[std::size_t(best_row)] == "y");
  CHECK(pathfinder_scores(m)[0].element == "y");
}

TEST_CASE("pathfinder ordering is invariant under positive scaling") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int d = 6;
  std::vector<std::string> names;
  for (int i = 0; i < d; ++i) names.push_back("M" + std::to_string(i));
  std::vector<CurvatureProfile> profiles;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      profiles.push_back(make_profile(names[i], names[j], unif(rng)));
  auto m = c_matrix(profiles, names, "x");
  const auto base_scores = pathfinder_scores(m);
  const auto base_top = top_k(m, 10);
  m.C *= 37.5;
  const auto scaled_scores = pathfinder_scores(m);
  const auto scaled_top = top_k(m, 10);
  for (std::size_t i = 0; i < base_scores.size(); ++i)
    CHECK(base_scores[i].element == scaled_scores[i].element);
  for (std::size_t i = 0; i < base_top.pairs.size(); ++i) {
    CHECK(base_top.pairs[i].element1 == scaled_top.pairs[i].element1);
    CHECK(base_top.pairs[i].element2 == scaled_top.pairs[i].element2);
  }
}

TEST_CASE("material comparison") {
  const std::vector<std::string> names{"a", "b", "c"};
  const auto mA = c_matrix({make_profile("a", "b", 0.9), make_profile("a", "c", 0.7),
                            make_profile("b", "c", 0.5)},
                           names, "A");
  const auto mB = c_matrix({make_profile("a", "b", 0.0), make_profile("a", "c", 0.0),
                            make_profile("b", "c", 0.0)},
                           names, "B");
  const auto rA = top_k(mA, 3);
  const auto rB = top_k(mB, 3);

  SUBCASE("single material: table equals its top-k list") {
    const auto cmp = material_comparison({rA}, 3);
    REQUIRE(cmp.materials.size() == 1);
    for (int r = 0; r < 3; ++r) CHECK(cmp.c(r, 0) == rA.pairs[std::size_t(r)].c);
  }

  SUBCASE("zero material is dominated at every rank") {
    const auto cmp = material_comparison({rA, rB}, 3);
    REQUIRE(cmp.materials.size() == 2);
    for (int r = 0; r < 3; ++r) CHECK(cmp.c(r, 0) > cmp.c(r, 1));
  }

  SUBCASE("materials without pairs are excluded with a note") {
    RankedPairs empty;
    empty.material = "empty";
    const auto cmp = material_comparison({rA, empty}, 3);
    CHECK(cmp.materials == std::vector<std::string>{"A"});
    CHECK(cmp.excluded == std::vector<std::string>{"empty"});
  }

  SUBCASE("NaN padding beyond the pair count") {
    const auto cmp = material_comparison({rA}, 5);
    CHECK(std::isnan(cmp.c(3, 0)));
    CHECK(std::isnan(cmp.c(4, 0)));
  }
}

TEST_CASE("pooled top_k ranks across materials") {
  const std::vector<std::string> names{"a", "b"};
  const auto mA = c_matrix({make_profile("a", "b", 0.3)}, names, "A");
  const auto mB = c_matrix({make_profile("a", "b", 0.8)}, names, "B");
  const auto pooled = top_k(std::vector<CValueMatrix>{mA, mB}, 2);
  REQUIRE(pooled.pairs.size() == 2);
  CHECK(pooled.pairs[0].material == "B");
  CHECK(pooled.pairs[0].c == 0.8);
  CHECK(pooled.pairs[1].material == "A");
}
