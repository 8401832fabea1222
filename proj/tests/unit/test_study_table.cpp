#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "dsgof/datasets.hpp"
#include "dsgof/error.hpp"
#include "dsgof/study_table.hpp"

using namespace dsgof;

TEST_CASE("parse binomial CSV with comments") {
  const std::string text = "# demo\ny,n\n1,10\n\n0,5\n3,7\n";
  const auto t = parse_csv(text, Family::BinomialBeta);
  REQUIRE(t.k() == 3);
  CHECK(t.rows[0].y == 1.0);
  CHECK(t.rows[0].size == 10.0);
  CHECK(t.rows[2].size == 7.0);
}

TEST_CASE("histogram counts expand") {
  const auto t = parse_csv("y,count\n0,3\n2,1\n", Family::PoissonGamma, {"y", "", "count"});
  REQUIRE(t.k() == 4);
  CHECK(t.rows[3].y == 2.0);
  CHECK(t.rows[3].size == 1.0);
  const auto u = unique_rows(t);
  REQUIRE(u.size() == 2);
  CHECK(u[0].count == 3.0);
}

TEST_CASE("custom column names") {
  const auto t = parse_csv("est,stderr,other\n1.5,0.2,x\n-0.3,0.4,y\n", Family::NormalNormal, {"est", "stderr", ""});
  REQUIRE(t.k() == 2);
  CHECK(t.rows[1].y == -0.3);
  CHECK(t.rows[1].size == 0.4);
}

TEST_CASE("invalid rows name their line") {
  try {
    parse_csv("y,n\n1,10\n11,10\n", Family::BinomialBeta);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_csv("y,n\nabc,10\n", Family::BinomialBeta), Error);
  CHECK_THROWS_AS(parse_csv("y\n1\n", Family::BinomialBeta), Error);
  CHECK_THROWS_AS(parse_csv("y,n\n", Family::BinomialBeta), Error);
  CHECK_THROWS_AS(parse_csv("y,se\n1,-2\n", Family::NormalNormal), Error);
  CHECK_THROWS_AS(ingest("/nonexistent/panel.csv", Family::BinomialBeta), Error);
}

TEST_CASE("emit and ingest round trip") {
  StudyTable t{Family::NormalNormal, {{0.1, 0.3}, {-2.75, 1e-3}, {1.0 / 3.0, 2.0}}, "x"};
  const auto again = parse_csv(emit_csv(t), Family::NormalNormal);
  REQUIRE(again.k() == t.k());
  for (std::size_t i = 0; i < t.k(); ++i) {
    CHECK(again.rows[i].y == t.rows[i].y);
    CHECK(again.rows[i].size == t.rows[i].size);
  }
  CHECK(table_digest(again) == table_digest(t));

  const std::string path = "dsgof_roundtrip_test.csv";
  {
    std::ofstream out(path);
    out << emit_csv(t);
  }
  const auto file = ingest(path, Family::NormalNormal);
  std::remove(path.c_str());
  CHECK(table_digest(file) == table_digest(t));

  StudyTable other = t;
  other.rows[0].y = 0.1000001;
  CHECK(table_digest(other) != table_digest(t));
}

TEST_CASE("bundled datasets load") {
  const auto ship = load_dataset("shipyard");
  CHECK(ship.family == Family::BinomialBeta);
  CHECK(ship.k() == 5);
  const auto rat = load_dataset("rat");
  CHECK(rat.k() == 70);
  const auto ins = load_dataset("insurance");
  CHECK(ins.family == Family::PoissonGamma);
  CHECK(ins.k() == 9461);
  const auto but = load_dataset("butterfly");
  CHECK(but.k() == 501);
  CHECK(find_dataset("butterfly")->zero_truncated);
  CHECK_FALSE(find_dataset("nope").has_value());
  CHECK_THROWS_AS(load_dataset("nope"), Error);
}
