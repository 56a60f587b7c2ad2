#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "mfi/errors.hpp"
#include "mfi/io.hpp"
#include "support.hpp"

using namespace mfi;
using namespace testsupport;

namespace {
const std::string kDataDir = MFI_SOURCE_DIR "/data";
}

TEST_CASE("chain files round trip") {
  const io::ChainFile chain = io::load_chain(kDataDir + "/example41.json");
  CHECK(chain.generator.size() == 3);
  REQUIRE(chain.measure.has_value());
  CHECK((*chain.measure)[0] == 0.5);

  const nlohmann::json j = io::chain_to_json(chain.generator, chain.measure);
  const io::ChainFile back = io::chain_from_json(j);
  CHECK(max_abs_diff(back.generator.rates(), chain.generator.rates()) == 0.0);
  CHECK(back.measure->weights() == chain.measure->weights());
}

TEST_CASE("17-digit doubles round trip through CSV formatting") {
  for (double v : {1.0 / 3.0, 0.1, 6.02e23, -7.25e-31, 0.0}) {
    const std::string s = io::format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("map files") {
  const io::ChainFile chain = io::load_chain(kDataDir + "/six_state_eps0.1.json");
  const CoarseGrainMap map =
      io::load_map(kDataDir + "/six_state_map_natural.json", chain.generator.space());
  CHECK(map.cluster_count() == 2);
  CHECK(map.level_set(0) == std::vector<std::size_t>{0, 1, 2});

  const nlohmann::json j = io::map_to_json(map);
  const CoarseGrainMap back = io::map_from_json(j, chain.generator.space());
  CHECK(back.assignment() == map.assignment());
}

TEST_CASE("multiscale file matches the built-in decomposition") {
  const MultiscaleChain ms = io::load_multiscale(kDataDir + "/six_state_ms.json");
  const MultiscaleChain reference = six_state_multiscale();
  CHECK(max_abs_diff(ms.fast(), reference.fast()) == 0.0);
  CHECK(max_abs_diff(ms.slow(), reference.slow()) == 0.0);
  const Generator assembled = ms.assemble(0.1);
  const io::ChainFile chain = io::load_chain(kDataDir + "/six_state_eps0.1.json");
  CHECK(max_abs_diff(assembled.rates(), chain.generator.rates()) < 1e-12);
}

TEST_CASE("measure files accept bare arrays and wrapped objects") {
  const StateSpace space = StateSpace::indexed(3);
  const std::string tmp = (std::filesystem::temp_directory_path() / "mfi_measure.json").string();
  io::write_file(tmp, "[0.5, 0.25, 0.25]");
  CHECK(io::load_measure(tmp, space)[0] == 0.5);
  io::write_file(tmp, "{\"measure\": [0.2, 0.3, 0.5]}");
  CHECK(io::load_measure(tmp, space)[2] == 0.5);
  io::write_file(tmp, "{\"weights\": [1, 2]}");
  CHECK_THROWS_AS((void)io::load_measure(tmp, space), Error);
  std::remove(tmp.c_str());
}

TEST_CASE("error paths") {
  CHECK_THROWS_AS((void)io::load_chain(kDataDir + "/does_not_exist.json"), Error);
  try {
    (void)io::load_chain(kDataDir + "/does_not_exist.json");
  } catch (const Error& e) {
    CHECK(exit_code_for(e.code()) == 3);
  }
  CHECK(exit_code_for(ErrorCode::OptimizerDidNotConverge) == 4);
  CHECK(exit_code_for(ErrorCode::ParseError) == 3);
  CHECK(exit_code_for(ErrorCode::NotIrreducible) == 2);

  const std::string tmp =
      (std::filesystem::temp_directory_path() / "mfi_bad_chain.json").string();
  io::write_file(tmp, "{\"states\": [\"a\", \"b\"], \"rates\": [[-1, 2], [1, -1]]}");
  try {
    (void)io::load_chain(tmp);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RowSumNonzero);
    CHECK(exit_code_for(e.code()) == 2);
  }
  std::remove(tmp.c_str());
}

TEST_CASE("csv writers") {
  const Generator two = birth_death_chain({1.0}, {1.0});
  const Trajectory traj = evolve(two, {1.0, 0.0}, {0.0, 0.5});
  const std::string csv = io::trajectory_csv(traj);
  CHECK(csv.rfind("time,0,1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  const std::vector<SweepRow> rows{{0.1, 1e-3, 2e-3, 3e-3}};
  const std::string sweep = io::sweep_csv(rows);
  CHECK(sweep.rfind("eps,sup_H,tv_error,gen_dist\n", 0) == 0);
}
