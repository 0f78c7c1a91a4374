#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "umsa/config.hpp"
#include "umsa/elliptic.hpp"
#include "umsa/errors.hpp"
#include "umsa/io.hpp"
#include "umsa/sir.hpp"

using namespace umsa;
namespace fs = std::filesystem;

TEST_CASE("csv reader handles quotes") {
  std::istringstream in("a,\"b,c\",d\n1,\"x \"\"q\"\"\",3\r\n\n4,5,6\n");
  const CsvTable t = read_csv(in);
  CHECK(t.header == std::vector<std::string>{"a", "b,c", "d"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "x \"q\"");
  CHECK(t.column("d") == 2);
  CHECK_THROWS((void)t.column("zzz"));
}

TEST_CASE("data files round trip at full precision") {
  const fs::path dir = fs::temp_directory_path() / "umsa_io_test";
  fs::create_directories(dir);
  Rng rng{4};
  const auto data = generate_elliptic_data(100.0, 9, rng);
  {
    std::ofstream out(dir / "e.csv");
    write_elliptic_data_csv(out, elliptic_observation_times(50), data.y);
  }
  CHECK(read_elliptic_data_csv(dir / "e.csv") == data.y);
  std::ifstream check(dir / "e.csv");
  std::string header;
  std::getline(check, header);
  CHECK(header == "index,t,y");
  const Eigen::VectorXd y = (Eigen::VectorXd(3) << 1e-7 / 3.0, 2.5, 0.1).finished();
  {
    std::ofstream out(dir / "s.csv");
    write_sir_data_csv(out, 20, y);
  }
  CHECK(read_sir_data_csv(dir / "s.csv") == y);
  fs::remove_all(dir);
}

TEST_CASE("config parsing") {
  std::istringstream in("# comment\nmodel = elliptic\n\nl_min=3 # trailing\nM_grid = 4, 8,16\ntheta0 = 120\n");
  const Config c = Config::parse(in);
  CHECK(c.get("model", "") == "elliptic");
  CHECK(c.get_int("l_min", 0) == 3);
  CHECK(c.get_ints("M_grid") == std::vector<std::int64_t>{4, 8, 16});
  CHECK(c.get_double("theta0", 0.0) == 120.0);
  CHECK(c.get_double("phi0", 7.0) == 7.0);
  std::istringstream bad("just words\n");
  CHECK_THROWS_AS(Config::parse(bad), ConfigError);
  Config d;
  d.set("l_min", "two");
  CHECK_THROWS_AS((void)d.get_int("l_min", 0), ConfigError);
  d.set("reprojection", "maybe");
  CHECK_THROWS_AS((void)d.get_bool("reprojection", false), ConfigError);
}

TEST_CASE("experiment builder defaults and validation") {
  Config c;
  c.set("data_seed", "5");
  const Experiment e = build_experiment(c);
  CHECK(e.model_name == "elliptic");
  CHECK(e.umsa.level_law.l_min() == 2);
  CHECK(e.umsa.level_law.l_max() == 9);
  CHECK(e.umsa.p_law.p_max() == 12);
  CHECK(e.umsa.coupling == CouplingKind::synchronous);
  CHECK(e.umsa.pcn == PcnParams::isotropic(0.95, 4.0, 2));
  CHECK(e.data.size() == 50);
  CHECK(e.data_generated);

  Config s;
  s.set("model", "sir");
  s.set("l_max", "5");
  s.set("data_seed", "5");
  const Experiment es = build_experiment(s);
  CHECK(es.umsa.coupling == CouplingKind::reflection);
  CHECK(es.model->theta_dim() == 2);
  CHECK(es.data.size() == 40);

  Config unknown;
  unknown.set("lmin", "3");
  CHECK_THROWS_AS(build_experiment(unknown), ConfigError);
  Config wrong;
  wrong.set("model", "heat");
  CHECK_THROWS_AS(build_experiment(wrong), ConfigError);
  Config outside;
  outside.set("theta0", "0.5");
  CHECK_THROWS_AS(build_experiment(outside), ConfigError);
  Config dims;
  dims.set("model", "sir");
  dims.set("theta0", "1,2,3");
  CHECK_THROWS_AS(build_experiment(dims), ConfigError);
}
