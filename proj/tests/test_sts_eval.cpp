#include "doctest.h"

#include <cmath>
#include <map>

#include "simgpt/encoder.hpp"
#include "simgpt/error.hpp"
#include "simgpt/rng.hpp"
#include "simgpt/sts_eval.hpp"
#include "test_util.hpp"

using namespace simgpt;
using testutil::TempDir;

namespace {

// Average ranks by counting, then Pearson with two-pass sums.
double oracle_spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<long double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::size_t less = 0, equal = 0;
      for (double w : v) {
        if (w < v[i]) ++less;
        if (w == v[i]) ++equal;
      }
      r[i] = static_cast<long double>(less) + (static_cast<long double>(equal) + 1.0L) / 2.0L;
    }
    return r;
  };
  const auto rx = ranks(xs), ry = ranks(ys);
  const long double n = static_cast<long double>(xs.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

std::vector<double> tied_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  const auto levels = 2 + rng.below(8);
  for (auto& x : v) x = static_cast<double>(rng.below(levels)) * 0.5;
  return v;
}

bool has_two_values(const std::vector<double>& v) {
  return std::any_of(v.begin(), v.end(), [&](double x) { return x != v[0]; });
}

// Text "<angle>" encodes to the unit vector at that angle; "zero" to 0.
class AngleEncoder final : public Encoder {
 public:
  Matrix encode(std::span<const std::string> texts) const override {
    Matrix m(static_cast<Eigen::Index>(texts.size()), 2);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      if (texts[i] == "zero") {
        m.row(r) << 0.0, 0.0;
      } else {
        const double a = std::stod(texts[i]);
        m.row(r) << std::cos(a), std::sin(a);
      }
    }
    return m;
  }
  std::size_t dimension() const override { return 2; }
  std::span<const double> parameters() const override { return {}; }
  void set_parameters(std::span<const double>) override {}
  std::vector<double> backward(std::span<const std::string>, const Matrix&) const override { return {}; }
  void apply_gradient(std::span<const double>, double) override {}
  std::string pooling() const override { return "angle"; }
};


}  // namespace

TEST_CASE("scale_score") {
  CHECK(scale_score(1.0) == 5.0);
  CHECK(scale_score(-1.0) == 0.0);
  CHECK(scale_score(0.2) == 3.0);
  CHECK_THROWS_AS(scale_score(1.5), Error);
  CHECK_THROWS_AS(scale_score(-1.01), Error);
}

TEST_CASE("spearman basic cases") {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  CHECK(spearman(xs, xs) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<double> rev{5, 4, 3, 2, 1};
  CHECK(spearman(xs, rev) == doctest::Approx(-1.0).epsilon(1e-15));
  const std::vector<double> ys{2, 1, 4, 3, 5};
  // d^2 = (1,1,1,1,0): 1 - 6*4/(5*24)
  const double hand = 1.0 - 6.0 * 4.0 / (5.0 * 24.0);
  CHECK(std::abs(spearman(xs, ys) - hand) < 1e-12);
  CHECK(std::abs(spearman(xs, ys) - oracle_spearman(xs, ys)) < 1e-12);
}

TEST_CASE("spearman errors") {
  const std::vector<double> flat{2, 2, 2};
  const std::vector<double> xs{1, 2, 3};
  try {
    spearman(flat, xs);
    FAIL("expected constant_input");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::constant_input);
  }
  CHECK_THROWS_AS(spearman(xs, std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{1}), Error);
  CHECK_THROWS_AS(spearman(xs, std::vector<double>{1, NAN, 3}), Error);
}

TEST_CASE("fractional ranks share ties") {
  const std::vector<double> v{10, 20, 20, 5};
  CHECK(fractional_ranks(v) == std::vector<double>{2, 3.5, 3.5, 1});
}

TEST_CASE("spearman matches the counting oracle on tied data") {
  Rng rng(12);
  int checked = 0;
  while (checked < 200) {
    const auto n = 2 + rng.below(49);
    const auto xs = tied_vector(rng, n), ys = tied_vector(rng, n);
    if (!has_two_values(xs) || !has_two_values(ys)) continue;
    ++checked;
    const double rho = spearman(xs, ys);
    CHECK(std::abs(rho - oracle_spearman(xs, ys)) < 1e-12);
    CHECK(rho == spearman(ys, xs));
    CHECK(rho >= -1.0);
    CHECK(rho <= 1.0);
  }
}

TEST_CASE("spearman is unchanged by strictly increasing transforms") {
  Rng rng(13);
  for (int t = 0; t < 50; ++t) {
    const auto n = 2 + rng.below(40);
    std::vector<double> cosines(n), gold(n);
    for (auto& c : cosines) c = std::round((rng.unit() * 2.0 - 1.0) * 1000.0) / 1000.0;
    for (auto& g : gold) g = std::round(rng.unit() * 50.0) / 10.0;
    if (!has_two_values(cosines) || !has_two_values(gold)) continue;
    const double base = spearman(cosines, gold);
    std::vector<double> scaled, affine, cubed;
    for (double c : cosines) {
      scaled.push_back(scale_score(c));
      affine.push_back(2.0 * c + 1.0);
      cubed.push_back(c * c * c);
    }
    CHECK(spearman(scaled, gold) == base);
    CHECK(spearman(affine, gold) == base);
    CHECK(spearman(cubed, gold) == base);
    std::vector<double> gold_cubed;
    for (double g : gold) gold_cubed.push_back(g * g * g);
    CHECK(spearman(cosines, gold_cubed) == base);
  }
}

TEST_CASE("evaluate_task: consistent cluster encoder gives rho 1") {
  // Ten pairs; similarity falls with the angle gap and gold falls with it.
  AngleEncoder enc;
  std::vector<STSPair> pairs;
  for (int i = 0; i < 10; ++i) pairs.push_back({"0", std::to_string(0.3 * i), 5.0 - 0.5 * i});
  const auto r = evaluate_task(enc, pairs);
  CHECK(r.rho == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.pair_count == 10);
}

TEST_CASE("evaluate_task: random encoder is uncorrelated with gold") {
  ReferenceEncoder enc({"w0", "w1", "w2", "w3", "w4", "w5", "w6", "w7", "w8", "w9"}, 16, 2024);
  Rng rng(31);
  std::vector<STSPair> pairs;
  auto sentence = [&] {
    std::string s;
    for (int k = 0; k < 3; ++k) s += "w" + std::to_string(rng.below(10)) + " ";
    return s;
  };
  for (int i = 0; i < 1000; ++i) pairs.push_back({sentence(), sentence(), rng.unit() * 5.0});
  CHECK(std::abs(evaluate_task(enc, pairs).rho) < 0.1);
}

TEST_CASE("evaluate_task: two pairs and pair order") {
  AngleEncoder enc;
  std::vector<STSPair> two{{"0", "0.1", 1.0}, {"0", "1.0", 4.0}};
  CHECK(std::abs(evaluate_task(enc, two).rho) == 1.0);
  Rng rng(3);
  std::vector<STSPair> pairs;
  for (int i = 0; i < 30; ++i) pairs.push_back({"0", std::to_string(rng.unit() * 3.0), rng.unit() * 5.0});
  const double rho = evaluate_task(enc, pairs).rho;
  CHECK(evaluate_task(enc, pairs).rho == rho);
  for (int t = 0; t < 10; ++t) {
    rng.shuffle(pairs);
    CHECK(evaluate_task(enc, pairs).rho == rho);
  }
}

TEST_CASE("evaluate_task: zero-norm embedding names the pair") {
  AngleEncoder enc;
  std::vector<STSPair> pairs{{"0", "0.5", 1.0}, {"0", "1.0", 2.0}, {"zero", "1.0", 3.0}};
  try {
    evaluate_task(enc, pairs);
    FAIL("expected zero_norm");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::zero_norm);
    CHECK(std::string(e.what()).find("pair 3") != std::string::npos);
  }
}

TEST_CASE("load_sts_task") {
  TempDir dir;
  testutil::write(dir / "t.tsv", "4.5\tA dog runs.\tA dog is running.\n0\tx\ty\n");
  const auto pairs = load_sts_task(dir / "t.tsv");
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0] == STSPair{"A dog runs.", "A dog is running.", 4.5});
  testutil::write(dir / "bad.tsv", "4.5\ta\tb\n7\ta\tb\n");
  try {
    load_sts_task(dir / "bad.tsv");
    FAIL("expected schema error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  testutil::write(dir / "cols.tsv", "1\tonly\n");
  CHECK_THROWS_AS(load_sts_task(dir / "cols.tsv"), Error);
  CHECK_THROWS_AS(load_sts_task(dir / "missing.tsv"), Error);
}

TEST_CASE("evaluate_suite averages and ordering") {
  TempDir dir;
  AngleEncoder enc;
  auto write_ranked = [&](const std::string& name, const std::vector<int>& pred_rank) {
    std::string content;
    for (std::size_t i = 0; i < pred_rank.size(); ++i) {
      content += std::to_string(i + 1) + "\t0\t" + std::to_string(3.0 - 0.5 * pred_rank[i]) + "\n";
    }
    testutil::write(dir / name, content);
    return dir / name;
  };
  // Rank patterns with hand-derivable rho: 1 - 6 * sum d^2 / (n (n^2 - 1)).
  const auto p08 = write_ranked("a.tsv", {2, 1, 4, 3, 5});  // sum d^2 = 4
  const auto p04 = write_ranked("b.tsv", {4, 1, 2, 3, 5});  // sum d^2 = 12

  std::vector<std::pair<std::string, std::filesystem::path>> one{{"STS12", p08}};
  const auto r1 = evaluate_suite(enc, one);
  REQUIRE(r1.average);
  CHECK(*r1.average == *r1.per_task[0].rho);

  std::vector<std::pair<std::string, std::filesystem::path>> two{{"STS13", p04}, {"STS12", p08}};
  const auto r2 = evaluate_suite(enc, two);
  CHECK(std::abs(*r2.per_task[0].rho - 0.8) < 1e-12);
  CHECK(std::abs(*r2.per_task[1].rho - 0.4) < 1e-12);
  CHECK(std::abs(*r2.average - 0.6) < 1e-12);
  CHECK(r2.per_task[0].task == "STS12");

  testutil::write(dir / "flat.tsv", "2\t0\t1\n2\t0\t2\n");
  std::vector<std::pair<std::string, std::filesystem::path>> failing{
      {"STS12", p08}, {"STS13", dir / "flat.tsv"}, {"STS14", dir / "none.tsv"}};
  const auto r3 = evaluate_suite(enc, failing);
  REQUIRE(r3.per_task.size() == 3);
  CHECK(r3.per_task[1].status.starts_with("failed"));
  CHECK_FALSE(r3.per_task[1].rho.has_value());
  CHECK(r3.per_task[2].status.starts_with("failed"));
  CHECK(r3.warnings.size() == 2);
  CHECK(*r3.average == *r3.per_task[0].rho);
}

TEST_CASE("seven-task report matches the golden rendering") {
  TempDir dir;
  AngleEncoder enc;
  const std::vector<std::vector<int>> patterns{{1, 2, 3, 4, 5}, {2, 1, 4, 3, 5}, {4, 1, 2, 3, 5},
                                               {5, 4, 3, 2, 1}, {1, 3, 2, 5, 4}, {2, 1, 3, 4, 5},
                                               {3, 1, 2, 5, 4}};
  const auto& order = benchmark_task_order();
  REQUIRE(order.size() == 7);
  std::vector<std::pair<std::string, std::filesystem::path>> tasks;
  for (std::size_t t = 0; t < 7; ++t) {
    std::string content;
    for (std::size_t i = 0; i < 5; ++i) {
      content += std::to_string(i + 1) + "\t0\t" + std::to_string(3.0 - 0.5 * patterns[t][i]) + "\n";
    }
    testutil::write(dir / (order[t] + ".tsv"), content);
    tasks.emplace_back(order[t], dir / (order[t] + ".tsv"));
  }
  std::reverse(tasks.begin(), tasks.end());
  const auto report = evaluate_suite(enc, tasks);
  if (std::getenv("SIMGPT_UPDATE_GOLDEN")) {
    testutil::write(testutil::fixture("seven_task_report.txt"), report.render_table());
    testutil::write(testutil::fixture("seven_task_report.jsonl"), report.render_records());
  }
  CHECK(report.render_table() == testutil::slurp(testutil::fixture("seven_task_report.txt")));
  CHECK(report.render_records() == testutil::slurp(testutil::fixture("seven_task_report.jsonl")));
}

TEST_CASE("evaluate_icl") {
  const std::vector<STSPair> gold{{"a", "b", 0.5}, {"c", "d", 1.5}, {"e", "f", 3.0}, {"g", "h", 4.0}, {"i", "j", 5.0}};
  std::vector<std::optional<double>> same, reversed;
  for (const auto& p : gold) {
    same.push_back(p.gold);
    reversed.push_back(5.0 - p.gold);
  }
  const auto a = evaluate_icl(same, gold);
  CHECK(a.rho == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a.unparsable_count == 0);
  CHECK(evaluate_icl(reversed, gold).rho == doctest::Approx(-1.0).epsilon(1e-15));

  auto one_missing = same;
  one_missing[4].reset();
  const auto b = evaluate_icl(one_missing, gold);
  CHECK(b.unparsable_count == 1);
  CHECK(b.pair_count == 5);
  const std::vector<double> golds{0.5, 1.5, 3.0, 4.0, 5.0};
  const std::vector<double> filled{0.5, 1.5, 3.0, 4.0, 2.5};
  CHECK(b.rho == spearman(filled, golds));
  CHECK_THROWS_AS(evaluate_icl(std::vector<std::optional<double>>(2), gold), Error);
}
