#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cpd/errors.hpp"
#include "cpd/harness.hpp"

using namespace cpd;

namespace {

std::string to_csv(const std::vector<SweepResult>& rows, CsvOptions opts = {}) {
  std::ostringstream os;
  write_csv(os, rows, opts);
  return os.str();
}

SweepConfig small_sweep() {
  SweepConfig cfg;
  cfg.problem = "p2-q2";
  cfg.eps_list = {std::ldexp(1.0, -6), std::ldexp(1.0, -4)};
  cfg.h_list = {std::ldexp(1.0, -6), std::ldexp(1.0, -4), std::ldexp(1.0, -5)};
  return cfg;
}

}  // namespace

TEST_CASE("dyadic_range: inclusive in both directions") {
  CHECK(dyadic_range(4, 6) == std::vector<double>{0.0625, 0.03125, 0.015625});
  CHECK(dyadic_range(6, 4) == std::vector<double>{0.015625, 0.03125, 0.0625});
  CHECK(dyadic_range(3, 3) == std::vector<double>{0.125});
}

TEST_CASE("run_sweep: one cell gives one row") {
  SweepConfig cfg;
  cfg.problem = "p1-uniform";
  cfg.methods = {Method::s2vp};
  cfg.eps_list = {0.0625};
  cfg.h_list = {0.015625};
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 1);
  const auto& r = rows.front();
  CHECK(r.ok);
  CHECK(r.problem == "p1-uniform");
  CHECK(r.method == Method::s2vp);
  CHECK(r.eps == 0.0625);
  CHECK(r.h == 0.015625);
  CHECK(r.error == r.errx + r.errv_par);
  CHECK(r.error > 0.0);
  CHECK(r.error < 1e-2);
  CHECK(std::isfinite(r.e_H_final));
}

TEST_CASE("run_sweep: rows ordered by method, eps desc, h desc; duplicates dropped") {
  SweepConfig cfg = small_sweep();
  cfg.methods = {Method::s2vp, Method::s2new, Method::s2vp};
  cfg.h_list.push_back(std::ldexp(1.0, -5));
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 12);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].method == (i < 6 ? Method::s2new : Method::s2vp));
    CHECK(rows[i].eps == (i % 6 < 3 ? std::ldexp(1.0, -4) : std::ldexp(1.0, -6)));
    CHECK(rows[i].h == std::ldexp(1.0, -4 - static_cast<int>(i % 3)));
  }
}

TEST_CASE("run_sweep: thread count and reference caching do not change the output") {
  SweepConfig cfg = small_sweep();
  const std::string serial = to_csv(run_sweep(cfg));
  cfg.jobs = 4;
  CHECK(to_csv(run_sweep(cfg)) == serial);
  cfg.cache_references = false;
  CHECK(to_csv(run_sweep(cfg)) == serial);
  cfg.jobs = 1;
  CHECK(to_csv(run_sweep(cfg)) == serial);
}

TEST_CASE("run_sweep: invalid configurations") {
  SweepConfig cfg = small_sweep();
  cfg.problem = "nope";
  CHECK_THROWS_AS(run_sweep(cfg), ArgumentError);
  cfg = small_sweep();
  cfg.eps_list = {0.0};
  CHECK_THROWS_AS(run_sweep(cfg), ArgumentError);
  cfg = small_sweep();
  cfg.eps_list = {2.0};
  CHECK_THROWS_AS(run_sweep(cfg), ArgumentError);
  cfg = small_sweep();
  cfg.h_list = {};
  CHECK_THROWS_AS(run_sweep(cfg), ArgumentError);
  cfg = small_sweep();
  cfg.h_list = {-0.1};
  CHECK_THROWS_AS(run_sweep(cfg), ArgumentError);
  cfg = small_sweep();
  cfg.methods = {};
  CHECK_THROWS_AS(run_sweep(cfg), ArgumentError);
  cfg = small_sweep();
  cfg.t_end = 0.0;
  CHECK_THROWS_AS(run_sweep(cfg), ArgumentError);
}

TEST_CASE("run_sweep: a failing reference becomes error rows, not an exception") {
  SweepConfig cfg = small_sweep();
  cfg.ref_cfg.max_steps = 5;
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 12);
  for (const auto& r : rows) {
    CHECK_FALSE(r.ok);
    CHECK(r.reason.rfind("reference: ", 0) == 0);
    CHECK(std::isnan(r.error));
  }
  const std::string csv = to_csv(rows);
  CHECK(csv.find(",nan,nan,nan,nan,nan,,error,") != std::string::npos);
}

TEST_CASE("write_csv: header, CRLF, shortest round-trip numbers, quoting") {
  CHECK(to_csv({}) == std::string(kSweepCsvHeader) + "\r\n");

  SweepResult r;
  r.problem = "p1-uniform";
  r.method = Method::s2new;
  r.eps = 0.0625;
  r.h = 0.1;
  r.errx = 1e-7;
  r.errv_par = 2.5e-8;
  r.errv_perp = 3.0;
  r.error = 1.25e-7;
  r.e_H_final = 0.0;
  r.wall_time_ms = 12.5;
  CHECK(to_csv({r}) == std::string(kSweepCsvHeader) +
                           "\r\np1-uniform,s2new,0.0625,0.1,1e-07,2.5e-08,3,1.25e-07,0,,ok,\r\n");
  CHECK(to_csv({r}, {true}).find(",0,12.5,ok,") != std::string::npos);

  r.ok = false;
  r.reason = "bad, \"worse\"";
  CHECK(to_csv({r}).find(",error,\"bad, \"\"worse\"\"\"\r\n") != std::string::npos);

  CHECK(format_double(0.1 + 0.2) == "0.30000000000000004");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("write_csv: file output and unwritable paths") {
  const auto dir = std::filesystem::temp_directory_path() / "cpd_harness_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "rows.csv";
  write_csv({}, path);
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == std::string(kSweepCsvHeader) + "\r\n");
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(write_csv({}, dir / "missing" / "rows.csv"), Error);
}

TEST_CASE("studies: convergence and eps-scaling wrappers") {
  const auto conv = convergence_study("p1-uniform", Method::s2new, dyadic_range(4, 8),
                                      {std::ldexp(1.0, -6)});
  REQUIRE(conv.size() == 1);
  CHECK(conv[0].rows.size() == 5);
  CHECK(conv[0].fit.slope > 1.7);

  const auto scan =
      eps_scaling_study("p2-q2", Method::s2new, std::ldexp(1.0, -6), dyadic_range(4, 7));
  CHECK(scan.rows.size() == 4);
  CHECK(std::abs(scan.fit.slope) < 0.3);
}

TEST_CASE("energy_study and the energy / trajectory writers") {
  const EnergySeries es = energy_study("p1-uniform", Method::s2new, 0.0625, 0.015625, 1.0, 16);
  CHECK(es.times.size() == 5);
  CHECK(es.times.back() == 1.0);
  CHECK(es.e_H.front() == 0.0);

  std::ostringstream os;
  write_energy_csv(os, {Method::s2vp}, {es});
  CHECK(os.str().rfind("method,t,e_H\r\ns2vp,0,0\r\n", 0) == 0);
  CHECK_THROWS_AS(write_energy_csv(os, {}, {es}), ArgumentError);

  const auto& p = find_problem("p4-q1");
  const Trajectory traj = integrate(SchemeContext(p, 0.5, 0.1), Method::s2new, 2, 1);
  std::ostringstream ts;
  write_trajectory_csv(ts, p, traj);
  const std::string text = ts.str();
  CHECK(text.rfind("t,x1,x2,x3,v1,v2,v3,e_H\r\n0,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}
