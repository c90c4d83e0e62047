#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "nearfield/bench.hpp"
#include "nearfield/error.hpp"

using namespace nf;
using namespace nf::bench;
using doctest::Approx;

TEST_CASE("collect sweep schedule") {
  const auto p = plan_collect_sweep();
  REQUIRE(p.n_values.size() == 25);
  CHECK(p.n_values.front() == 5000);
  CHECK(p.n_values[19] == 100000);
  CHECK(p.n_values[20] == 150000);
  CHECK(p.n_values.back() == 350000);
  CHECK(p.ct == 15);
  CHECK(p.l_start == 3);
  CHECK(p.repeats == 20);

  const auto small = plan_collect_sweep(0.1);
  REQUIRE(small.n_values.size() == 25);
  CHECK(small.n_values.front() == 500);
  CHECK(small.n_values.back() == 35000);
  CHECK(scale_n(5000, 0.01) == 100);
  CHECK(scale_n(5000, 0.001) == 100);
  CHECK(scale_n(12345, 0.1) == 1234);
}

TEST_CASE("kernel sweep schedule") {
  const auto p = plan_kernel_sweep();
  REQUIRE(p.n_values.size() == 100 + 18);
  CHECK(p.n_values.front() == 1000);
  CHECK(p.n_values[99] == 100000);
  CHECK(p.n_values[100] == 150000);
  CHECK(p.n_values.back() == 1000000);
  CHECK(p.ct == 15);
  CHECK(p.l_start == 3);
  CHECK(plan_kernel_sweep(0.1).n_values.front() == 100);
}

TEST_CASE("grid plan and budget") {
  const auto p = plan_grid();
  const auto all = expand(p, {std::size_t{1} << 40, 100});
  REQUIRE(all.size() == 56);
  for (const auto& c : all) {
    CHECK(c.n == std::size_t{1} << (2 * c.level));
    CHECK(!c.skip_reason);
  }
  const auto l6 = std::find_if(all.begin(), all.end(), [](const PlanCell& c) { return c.level == 6; });
  CHECK(l6->n == 4096);

  const auto cells = expand(p);
  REQUIRE(cells.size() == 56);
  for (const auto& c : cells) {
    const bool over = c.n > (std::size_t{1} << 20) || c.level + c.i > 12;
    CHECK(static_cast<bool>(c.skip_reason) == over);
    if (c.skip_reason) CHECK(!c.skip_reason->empty());
  }
  const auto corner = std::find_if(cells.begin(), cells.end(), [](const PlanCell& c) {
    return c.level == 4 && c.i == -3;
  });
  CHECK(!corner->skip_reason);
}

TEST_CASE("experiment protocol, tree reuse and bookkeeping") {
  ExperimentOptions o;
  o.repeats = 3;
  const auto out = run_experiment({3000, 0, 0, std::nullopt}, o);
  REQUIRE(!out.row.skipped);
  const std::vector<std::string> expect = {
      "warmup:indexing", "warmup:repetition",
      "base", "indexing", "base", "repetition",
      "base", "indexing", "base", "repetition",
      "base", "indexing", "base", "repetition"};
  CHECK(out.audit == expect);

  const auto& r = out.row;
  CHECK(r.t == out.tree.t);
  CHECK(r.l == out.tree.l);
  CHECK(r.d == out.tree.d);
  CHECK(r.ct == 15);
  CHECK(r.bytes_idx == 40 * 3000 + (std::uint64_t{1} << (2 * r.l)) * (2 + 10 * r.t));
  CHECK(r.bytes_rep == 8 * 3000 * (3 + 27 * 15));
  CHECK(r.x_collect == Approx((r.collect_idx_s / r.base1_s) * (r.base2_s / r.collect_rep_s)));
  CHECK(r.x_kernel == Approx((r.kernel_idx_s / r.base1_s) * (r.base2_s / r.kernel_rep_s)));
  CHECK(r.x_total == Approx(((r.collect_idx_s + r.kernel_idx_s) / r.base1_s) *
                            (r.base2_s / (r.collect_rep_s + r.kernel_rep_s))));
  CHECK(r.pred_x_total > 0);
  CHECK(r.miss_exact_rep < r.miss_exact_idx);
}

TEST_CASE("adjusted grid cells size records by the adjusted tree") {
  ExperimentOptions o;
  o.repeats = 1;
  const auto up = run_experiment({4096, 6, 1, std::nullopt}, o);
  REQUIRE(!up.row.skipped);
  CHECK(up.row.l == 7);
  CHECK(up.row.ct == static_cast<int>(up.row.t));
  CHECK(up.row.bytes_rep == 8 * 4096 * (3 + 27 * up.row.t));

  const auto down = run_experiment({4096, 6, -2, std::nullopt}, o);
  REQUIRE(!down.row.skipped);
  CHECK(down.row.l == 4);
  CHECK(down.row.ct == static_cast<int>(down.row.t));
  CHECK(down.row.t > 15);
}

TEST_CASE("skips carry a reason") {
  ExperimentOptions o;
  o.repeats = 1;
  const auto pre = run_experiment({16, 4, -4, std::string("L+i=0 is below 1")}, o);
  CHECK(pre.row.skipped);
  CHECK(pre.row.skip_reason == "L+i=0 is below 1");
  CHECK(pre.audit.empty());

  // A start level above the cap makes construction fail.
  o.l_start = geometry::kMaxLevel + 1;
  const auto fail = run_experiment({1000, 0, 0, std::nullopt}, o);
  CHECK(fail.row.skipped);
  CHECK(!fail.row.skip_reason.empty());

  std::ostringstream log;
  write_skip_log(log, {pre.row, fail.row});
  std::istringstream in(log.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 3);
}

TEST_CASE("CSV schema and round trip") {
  CHECK(kCsvColumns == 22);
  std::ostringstream empty;
  write_csv(empty, {});
  CHECK(empty.str() ==
        "n,ct,l,i,t,d,bytes_idx,bytes_rep,collect_idx_s,collect_rep_s,"
        "kernel_idx_s,kernel_rep_s,base1_s,base2_s,x_collect,x_kernel,x_total,"
        "pred_x_collect,pred_x_kernel,pred_x_total,miss_exact_idx,miss_exact_rep\n");

  BenchRow a;
  a.n = 5000;
  a.ct = 15;
  a.l = 6;
  a.i = 0;
  a.t = 13;
  a.d = 4.8828125;
  a.bytes_idx = 12345;
  a.bytes_rep = 67890;
  a.collect_idx_s = 1.234567891234e-3;
  a.collect_rep_s = 2.0 / 3.0;
  a.kernel_idx_s = 1e-7;
  a.kernel_rep_s = 3.14159265358979;
  a.base1_s = 0.1;
  a.base2_s = 0.2;
  a.x_collect = 0.5;
  a.x_kernel = 1.25;
  a.x_total = 0.75;
  a.pred_x_collect = 0.333333333333;
  a.pred_x_kernel = 7;
  a.pred_x_total = 2;
  a.miss_exact_idx = 1.5e-5;
  a.miss_exact_rep = 2.5e-9;
  BenchRow skipped;
  skipped.n = 1u << 22;
  skipped.ct = 15;
  skipped.l = 11;
  skipped.i = 3;
  skipped.skipped = true;
  skipped.skip_reason = "budget";

  std::stringstream buf;
  write_csv(buf, {a, skipped});
  const std::string text = buf.str();
  CHECK(text.find('\r') == std::string::npos);
  const auto back = parse_csv(buf);
  REQUIRE(back.size() == 2);
  const auto& b = back[0];
  CHECK(b.n == a.n);
  CHECK(b.t == a.t);
  CHECK(b.d == a.d);
  CHECK(b.collect_rep_s == Approx(a.collect_rep_s).epsilon(1e-9));
  CHECK(b.collect_idx_s == Approx(a.collect_idx_s).epsilon(1e-9));
  CHECK(b.miss_exact_rep == a.miss_exact_rep);
  CHECK(back[1].skipped);
  CHECK(back[1].n == skipped.n);

  // Writing what was read reproduces the bytes.
  std::stringstream again;
  write_csv(again, back);
  CHECK(again.str() == text);

  std::istringstream bad("n,ct\n1,2\n");
  CHECK_THROWS_AS(parse_csv(bad), Error);
  CHECK_THROWS_AS(write_csv_file("/nonexistent-dir/x.csv", {}), Error);
}

TEST_CASE("verify agrees on a small batch") {
  VerifyConfig cfg;
  cfg.instances = 6;
  const auto report = verify(cfg);
  CHECK(report.ok());
  CHECK(report.instances == 6);
  CHECK(report.lines.size() == 6);
  CHECK(close_enough(1.0, 1.0 + 1e-10, 1e-9, 1e-12));
  CHECK(!close_enough(1.0, 1.0 + 1e-8, 1e-9, 1e-12));
  CHECK(close_enough(0.0, 1e-13, 1e-9, 1e-12));
}
