#include <doctest.h>

#include <string>

#include "momlab/errors.hpp"
#include "momlab/reports.hpp"

using namespace momlab;

TEST_CASE("CSV tables have a header and one line per row") {
  CsvTable t({"a", "b", "c", "d"});
  t.add_row({1.5, 3LL, true, std::string("x")});
  CHECK(t.str() == "a,b,c,d\n1.5,3,true,x\n");
  CHECK_THROWS_AS(t.add_row({1.0}), InvariantError);
  t.add_column("tol", 1e-6);
  CHECK(t.str() == "a,b,c,d,tol\n1.5,3,true,x,1e-06\n");
}

TEST_CASE("deficit and variation tables name their columns") {
  DeficitReport d;
  d.deficit = 2.0;
  d.dirichlet_term = 4.0;
  d.variance_term = 2.0;
  const std::string s = deficit_table(d).str();
  CHECK(s.rfind("deficit,dirichlet_term,variance_term,clamp_warnings,tolerance\n", 0) == 0);
  CHECK(s.find("2,4,2,0,0") != std::string::npos);
  CHECK(variation_table(VariationReport{}).columns().size() == 6);
}

TEST_CASE("Caffarelli table rows") {
  const CsvTable t = caffarelli_table(caffarelli_exponents(3));
  CHECK(t.rows() == 3);
  CHECK(t.str().find("1,0.5,0.5,0,0.5") != std::string::npos);
}
