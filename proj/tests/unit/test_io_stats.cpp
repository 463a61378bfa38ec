#include <catch_amalgamated.hpp>

#include <atomic>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "deformest/io.hpp"
#include "deformest/parallel.hpp"
#include "deformest/stats.hpp"

using namespace deformest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("running statistics") {
  RunningStats s;
  for (double x : {1.0, 2.0, 3.0, 4.0}) s.add(x);
  CHECK(s.count() == 4);
  CHECK(s.mean() == 2.5);
  CHECK_THAT(s.variance(), WithinRel(5.0 / 3.0, 1e-15));
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(summarize(v).mean() == 2.5);
}

TEST_CASE("quantiles") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.25) == 2.0);
}

TEST_CASE("double formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 97.220457, -1e-300, 0.0}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("config hash depends on content only") {
  const nlohmann::json a{{"theta", 1.0}, {"family", "boxcox"}};
  const nlohmann::json b{{"family", "boxcox"}, {"theta", 1.0}};
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  CHECK(config_hash(a) != config_hash(nlohmann::json{{"theta", 2.0}, {"family", "boxcox"}}));
}

TEST_CASE("csv writer emits the config line then the header") {
  std::ostringstream out;
  CsvWriter w(out, nlohmann::json{{"k", 1}}, {"a", "b"});
  w.row(std::vector<double>{1.5, 2.0});
  w.row(std::vector<std::string>{"3", ""});
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# config_hash=", 0) == 0);
  std::getline(in, line);
  CHECK(line == "a,b");
  std::getline(in, line);
  CHECK(line == "1.5,2");
  std::getline(in, line);
  CHECK(line == "3,");
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}
