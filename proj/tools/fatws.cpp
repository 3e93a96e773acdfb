// fatws: FAT32 image inspection, copying and model property checks.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fatws/cosim.hpp"
#include "fatws/harness.hpp"

namespace {

int emit(const fatws::cosim::CmdResult& r) {
  std::cout << r.out;
  std::cerr << r.err;
  return r.exit_code;
}

int run_check(const std::string& level, const std::string& prop, std::size_t trials, std::uint64_t seed) {
  using namespace fatws::harness;
  auto target = parse_target(level);
  if (!target && prop != "space" && prop != "stack" && prop != "refine") {
    std::cerr << "fatws check: unknown level " << level << "\n";
    return 2;
  }
  Report r;
  if (prop == "row1") {
    r = check_row1(*target, trials, seed);
  } else if (prop == "row2") {
    r = check_row2(*target, trials, seed);
  } else if (prop == "compose") {
    r = check_compose(*target, trials, seed);
  } else if (prop == "commute") {
    auto pair = pair_for_upper(*target);
    if (!pair) {
      std::cerr << "fatws check: commute needs the upper level of a pair (L2..L6)\n";
      return 2;
    }
    r = check_commute(*pair, trials, seed);
  } else if (prop == "space") {
    r = check_space_iff(trials, seed);
  } else if (prop == "refine") {
    r = check_alloc_refinement(trials, seed);
  } else {
    r = check_concrete_stack(trials, seed);
  }
  std::cout << r.summary() << "\n";
  return r.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FAT32 image tool and model checker"};
  app.require_subcommand(1);
  bool strict = false;
  app.add_flag("--strict", strict, "Require the FAT32 minimum cluster count");

  auto* info = app.add_subcommand("info", "Summarize the boot sector fields of an image");
  bool verbose = false;
  std::string info_image;
  info->add_flag("-v,--verbose", verbose, "mkfs.fat -v style summary");
  info->add_option("IMG", info_image)->required();

  auto* cp = app.add_subcommand("cp", "Copy a file; image paths are written IMG:/inner/path");
  std::string src, dst;
  cp->add_option("SRC", src)->required();
  cp->add_option("DST", dst)->required();

  auto* mkimage = app.add_subcommand("mkimage", "Write an empty FAT32 image");
  std::uint32_t clusters = 0, cluster_size = 512;
  std::string mk_image;
  mkimage->add_option("-n", clusters, "Data cluster count")->required();
  mkimage->add_option("-s", cluster_size, "Cluster size in bytes")->capture_default_str();
  mkimage->add_option("IMG", mk_image)->required();

  auto* check = app.add_subcommand("check", "Run a randomized property check");
  std::string level = "L1", prop;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  check->add_option("--level", level)->capture_default_str();
  check->add_option("--prop", prop)
      ->required()
      ->check(CLI::IsMember({"row1", "row2", "compose", "commute", "space", "refine", "stack"}));
  check->add_option("--trials", trials)->capture_default_str();
  check->add_option("--seed", seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto mode = strict ? fatws::fat32::Compliance::strict : fatws::fat32::Compliance::relaxed;
  if (*info) return emit(fatws::cosim::cmd_info(info_image, verbose, mode));
  if (*cp) return emit(fatws::cosim::cmd_cp(src, dst));
  if (*mkimage) return emit(fatws::cosim::cmd_mkimage(mk_image, clusters, cluster_size));
  return run_check(level, prop, trials, seed);
}
