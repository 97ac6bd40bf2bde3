#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "stream_al/datagen.hpp"
#include "stream_al/design.hpp"
#include "stream_al/errors.hpp"
#include "stream_al/regression.hpp"

using namespace stream_al;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "stream_al_test_datagen";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

std::vector<StreamPoint> drain(StreamSource& s, std::size_t n) {
  std::vector<StreamPoint> out;
  while (out.size() < n) {
    auto pt = s.next();
    if (!pt) break;
    out.push_back(std::move(*pt));
  }
  return out;
}

}  // namespace

TEST_CASE("noiseless labels follow beta exactly") {
  SyntheticSpec spec;
  spec.p = 2;
  spec.noise_sigma = 0.0;
  spec.seed = 5;
  SyntheticGenerator gen(spec);
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto s = gen.sample(Segment::kStream, i);
    CHECK(s.y == doctest::Approx(dot(gen.beta(), s.x)).epsilon(1e-14));
  }
  // With beta = (1, -1) the point (2, 1) has response 1.
  const Vector beta{1.0, -1.0};
  CHECK(dot(beta, Vector{2.0, 1.0}) == 1.0);
  for (double b : gen.beta()) {
    CHECK(b >= spec.coef_low);
    CHECK(b < spec.coef_high);
  }
}

TEST_CASE("gen_synthetic stream and oracle agree") {
  SyntheticSpec spec;
  spec.p = 3;
  spec.seed = 11;
  spec.stream_length = 20;
  auto s = gen_synthetic(spec);
  SyntheticGenerator gen(spec);
  CHECK(s.beta == gen.beta());
  const auto pts = drain(*s.stream, 100);
  REQUIRE(pts.size() == 20);
  for (const auto& pt : pts) {
    CHECK(pt.x == gen.sample(Segment::kStream, pt.index).x);
    CHECK(s.oracle->label(pt.index) == gen.sample(Segment::kStream, pt.index).y);
    CHECK(s.oracle->label(pt.index) == s.oracle->label(pt.index));
  }
  CHECK_THROWS_AS(s.oracle->label(20), OracleError);
  CHECK_FALSE(s.stream->next().has_value());
}

TEST_CASE("same seed, same stream; different seed, different stream") {
  SyntheticSpec spec;
  spec.p = 4;
  spec.seed = 42;
  auto a = gen_synthetic(spec);
  auto b = gen_synthetic(spec);
  spec.seed = 43;
  auto c = gen_synthetic(spec);
  const auto pa = drain(*a.stream, 50);
  const auto pb = drain(*b.stream, 50);
  const auto pc = drain(*c.stream, 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(pa[i].x == pb[i].x);
    CHECK(a.oracle->label(i) == b.oracle->label(i));
  }
  CHECK(pa[0].x != pc[0].x);
}

TEST_CASE("zero outlier rate leaves the stream untouched") {
  SyntheticSpec spec;
  spec.p = 3;
  spec.seed = 7;
  SyntheticGenerator gen(spec);
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto s = gen.sample(Segment::kStream, i);
    const auto c = gen.clean_sample(Segment::kStream, i);
    CHECK_FALSE(s.outlier);
    CHECK(s.x == c.x);
    CHECK(s.y == c.y);
  }
}

TEST_CASE("contamination rate and mask independence") {
  SyntheticSpec spec;
  spec.p = 5;
  spec.seed = 13;
  spec.outlier_rate = 0.05;
  SyntheticGenerator gen(spec);
  SyntheticSpec clean_spec = spec;
  clean_spec.outlier_rate = 0.0;
  SyntheticGenerator clean(clean_spec);

  std::size_t hits = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto s = gen.sample(Segment::kStream, i);
    hits += s.outlier ? 1 : 0;
    // The clean part of each draw does not depend on the mask.
    const auto c = clean.sample(Segment::kStream, i);
    if (!s.outlier) {
      CHECK(s.x == c.x);
      CHECK(s.y == c.y);
    } else {
      Vector diff(spec.p);
      for (std::size_t j = 0; j < spec.p; ++j) diff[j] = s.x[j] - c.x[j];
      CHECK(norm2(diff) == doctest::Approx(spec.outlier_shift).epsilon(1e-12));
      // The response shift is independent of the input shift.
      CHECK(std::abs(s.y - c.y) == doctest::Approx(spec.outlier_response_sigmas * spec.noise_sigma).epsilon(1e-12));
    }
  }
  CAPTURE(hits);
  CHECK(hits >= 29);
  CHECK(hits <= 71);

  // Test segment and (by default) the design segment are never contaminated.
  for (std::uint64_t i = 0; i < 1000; ++i) {
    CHECK_FALSE(gen.is_outlier(Segment::kTest, i));
    CHECK_FALSE(gen.is_outlier(Segment::kDesign, i));
  }
  spec.contaminate_initial_design = true;
  SyntheticGenerator dirty(spec);
  std::size_t design_hits = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) design_hits += dirty.is_outlier(Segment::kDesign, i) ? 1 : 0;
  CHECK(design_hits > 0);
}

TEST_CASE("outlier modes") {
  SyntheticSpec spec;
  spec.p = 3;
  spec.seed = 17;
  spec.outlier_rate = 1.0;
  spec.outlier_mode = OutlierMode::kResponse;
  SyntheticGenerator resp(spec);
  spec.outlier_mode = OutlierMode::kInputs;
  SyntheticGenerator inputs(spec);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto c = resp.clean_sample(Segment::kStream, i);
    const auto r = resp.sample(Segment::kStream, i);
    CHECK(r.x == c.x);
    CHECK(std::abs(r.y - c.y) == doctest::Approx(10.0));
    const auto in = inputs.sample(Segment::kStream, i);
    CHECK(in.x != c.x);
    CHECK(in.y == c.y);
  }
  CHECK(parse_outlier_mode("x") == OutlierMode::kInputs);
  CHECK(parse_outlier_mode("y") == OutlierMode::kResponse);
  CHECK(parse_outlier_mode("both") == OutlierMode::kBoth);
  CHECK_THROWS_AS(parse_outlier_mode("neither"), ConfigError);
}

TEST_CASE("least squares recovers beta from noiseless samples") {
  for (std::size_t p : {2u, 5u, 10u}) {
    SyntheticSpec spec;
    spec.p = p;
    spec.noise_sigma = 0.0;
    spec.seed = 100 + p;
    SyntheticGenerator gen(spec);
    std::vector<Vector> xs;
    Vector ys;
    for (std::uint64_t i = 0; i < 5 * p; ++i) {
      auto s = gen.sample(Segment::kStream, i);
      xs.push_back(s.x);
      ys.push_back(s.y);
    }
    const auto m = fit(new_design(xs, ys), false);
    for (std::size_t j = 0; j < p; ++j) CHECK(std::abs(m.coefficients[j] - gen.beta()[j]) < 1e-8);
  }
}

TEST_CASE("correlated inputs follow the requested covariance") {
  SyntheticSpec spec;
  spec.p = 3;
  spec.seed = 19;
  spec.input_cov = Matrix{{1.0, 0.5, 0.25}, {0.5, 1.0, 0.5}, {0.25, 0.5, 1.0}};
  SyntheticGenerator gen(spec);
  std::vector<Vector> xs;
  for (std::uint64_t i = 0; i < 20000; ++i) xs.push_back(gen.sample(Segment::kStream, i).x);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) CHECK(std::abs(oracle::sample_cov_entry(xs, a, b) - (*spec.input_cov)(a, b)) < 0.05);

  spec.input_cov = Matrix{{1.0, 2.0, 0.0}, {2.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  CHECK_THROWS_AS(SyntheticGenerator{spec}, Error);
  spec.input_cov = Matrix::identity(2);
  CHECK_THROWS_AS(SyntheticGenerator{spec}, ConfigError);
}

TEST_CASE("invalid synthetic specs") {
  SyntheticSpec spec;
  spec.p = 0;
  CHECK_THROWS_AS(SyntheticGenerator{spec}, ConfigError);
  spec.p = 2;
  spec.noise_sigma = -1.0;
  CHECK_THROWS_AS(SyntheticGenerator{spec}, ConfigError);
  spec.noise_sigma = 1.0;
  spec.outlier_rate = 1.5;
  CHECK_THROWS_AS(SyntheticGenerator{spec}, ConfigError);
}

TEST_CASE("scenario instances are pure functions of the seed") {
  SyntheticSpec spec;
  spec.p = 4;
  SyntheticScenario sc(spec);
  auto a = sc.instantiate(9, 6, 10);
  auto b = sc.instantiate(9, 6, 10);
  CHECK(a.design_points == b.design_points);
  CHECK(a.design_labels == b.design_labels);
  CHECK(a.test.points == b.test.points);
  CHECK(a.test.labels == b.test.labels);
  CHECK(a.design_points.size() == 6);
  CHECK(a.test.points.size() == 10);
  CHECK(a.stream->next()->x == b.stream->next()->x);
  auto c = sc.instantiate(10, 6, 10);
  CHECK(a.design_points != c.design_points);
}

TEST_CASE("mix_seed spreads neighbouring seeds") {
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  CHECK(mix_seed(0, 0) != mix_seed(0, 1));
  CHECK(mix_seed(7, 7) == mix_seed(7, 7));
}

TEST_CASE("csv stream basics") {
  const auto p = write_temp("two.csv", "a,b,y\n1,2,3\n4,5,6\n");
  auto s = csv_stream({p, {"a", "b"}, "y", true});
  CHECK(s.dimension == 2);
  auto first = s.stream->next();
  REQUIRE(first);
  CHECK(first->index == 0);
  CHECK(first->x == Vector{1, 2});
  CHECK(s.oracle->label(0) == 3.0);
  auto second = s.stream->next();
  REQUIRE(second);
  CHECK(second->x == Vector{4, 5});
  CHECK(s.oracle->label(1) == 6.0);
  CHECK_FALSE(s.stream->next().has_value());
  CHECK_THROWS_AS(s.oracle->label(2), OracleError);
}

TEST_CASE("csv header only yields an empty stream") {
  const auto p = write_temp("header.csv", "a,b,y\n");
  auto s = csv_stream({p, {}, "y", true});
  CHECK(s.dimension == 2);
  CHECK_FALSE(s.stream->next().has_value());
}

TEST_CASE("csv with process-data style column names") {
  std::string body;
  std::vector<std::string> features;
  for (int i = 1; i <= 16; ++i) {
    features.push_back("XMEAS(" + std::to_string(i) + ")");
    body += "\"XMEAS(" + std::to_string(i) + ")\",";
  }
  body += "Stream 9A\r\n";
  for (int r = 0; r < 5; ++r) {
    for (int i = 1; i <= 16; ++i) body += std::to_string(r + 0.01 * i) + ",";
    body += std::to_string(10.0 * r) + "\r\n";
  }
  const auto p = write_temp("tep.csv", "\xEF\xBB\xBF" + body);
  const auto t = read_csv_table({p, features, "Stream 9A", true});
  CHECK(t.feature_names == features);
  REQUIRE(t.features.size() == 5);
  CHECK(t.features[2][15] == doctest::Approx(2.16));
  CHECK(t.responses[4] == 40.0);
}

TEST_CASE("csv errors") {
  const auto p = write_temp("bad.csv", "a,b,y\n1,2,3\n4,oops,6\n");
  CHECK_THROWS_AS(read_csv_table({write_temp("ok.csv", "a,y\n1,2\n"), {"missing"}, "y", true}), SchemaError);
  CHECK_THROWS_AS(read_csv_table({write_temp("ok2.csv", "a,y\n1,2\n"), {"a"}, "nope", true}), SchemaError);
  CHECK_THROWS_AS(read_csv_table({write_temp("ok3.csv", "a,y\n1,2\n"), {"a", "y"}, "y", true}), SchemaError);
  CHECK_THROWS_AS(read_csv_table({"/nonexistent/file.csv", {}, "y", true}), IoError);
  try {
    read_csv_table({p, {}, "y", true});
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 3);
    CHECK(e.col() == 2);
  }
  const auto nonfinite = write_temp("nan.csv", "a,y\n1,nan\n");
  CHECK_THROWS_AS(read_csv_table({nonfinite, {}, "y", true}), ParseError);
}

TEST_CASE("csv scenario splits design, stream and test") {
  std::string body = "a,b,y\n";
  for (int r = 0; r < 20; ++r) body += std::to_string(r) + "," + std::to_string(r * r) + "," + std::to_string(2 * r) + "\n";
  const auto p = write_temp("scenario_7.csv", body);
  CsvScenarioSpec spec;
  spec.data = {p.parent_path() / "scenario_{r}.csv", {}, "y", true};
  CsvScenario sc(spec, 7);
  CHECK(sc.dimension() == 2);
  auto inst = sc.instantiate(7, 4, 5);
  CHECK(inst.design_points.size() == 4);
  CHECK(inst.design_points[3] == Vector{3, 9});
  CHECK(inst.test.points.size() == 5);
  CHECK(inst.test.points[0] == Vector{15, 225});
  const auto first = inst.stream->next();
  REQUIRE(first);
  CHECK(first->x == Vector{4, 16});
  CHECK(inst.oracle->label(first->index) == 8.0);
  std::size_t n = 1;
  while (inst.stream->next()) ++n;
  CHECK(n == 11);
  CHECK_THROWS_AS(sc.instantiate(7, 10, 15), InsufficientStreamError);
  CHECK(resolve_replication_path("d/{r}/x_{r}.csv", 12) == fs::path("d/12/x_12.csv"));
}
