#include <gtest/gtest.h>

#include "fatws/harness.hpp"
#include "fatws/hifat.hpp"
#include "fatws/model/levels.hpp"

using namespace fatws;
using namespace fatws::harness;
using namespace fatws::model;

namespace {

template <class Fs>
std::size_t file_count(const Fs& fs) {
  std::size_t n = 0;
  for_each_file(fs.root, [&](const Path&, const auto&) { ++n; });
  return n;
}

template <class Fs>
void generator_contract() {
  for (std::size_t t = 0; t < 300; ++t) {
    const auto s = trial_seed(1, t);
    auto a = gen_fs<Fs>(s);
    ASSERT_EQ(a, gen_fs<Fs>(s));
    ASSERT_TRUE(well_formed(a));
    ASSERT_GE(file_count(a), 1u);
  }
}

}  // namespace

TEST(GenFs, DeterministicWellFormedWithAFile) {
  generator_contract<L1Fs>();
  generator_contract<L2Fs>();
  generator_contract<L3Fs>();
  generator_contract<L4Fs>();
  generator_contract<L5Fs>();
  generator_contract<L6Fs>();
}

TEST(GenFs, BoundedLevelsSatisfyStricterInvariant) {
  for (std::size_t t = 0; t < 500; ++t) {
    const auto s = trial_seed(2, t);
    auto l4 = gen_fs<L4Fs>(s);
    ASSERT_TRUE(l4_stricter_fs_p(l4));
    ASSERT_LE(l4.disk.size(), Budget{}.max_disk_blocks);
    ASSERT_TRUE(l4_stricter_fs_p(gen_fs<L5Fs>(s)));
    auto l6 = convert_down(gen_fs<L6Fs>(s));
    ASSERT_TRUE(l6);
    ASSERT_TRUE(l4_stricter_fs_p(*l6));
  }
}

TEST(GenFs, RespectsBudget) {
  Budget b;
  b.max_depth = 2;
  b.max_files = 3;
  b.max_text = 5;
  for (std::size_t t = 0; t < 300; ++t) {
    auto fs = gen_fs<L1Fs>(trial_seed(3, t), b);
    std::size_t files = 0;
    for_each_file(fs.root, [&](const Path& p, const L1File& f) {
      ++files;
      EXPECT_LE(p.depth(), 2u);
      EXPECT_LE(f.contents.size(), 5u);
    });
    ASSERT_LE(files, 3u);
  }
}

TEST(GenFs, HifatTreesAreValid) {
  for (std::size_t t = 0; t < 200; ++t) {
    auto fs = gen_fs<hifat::HiFatFs>(trial_seed(4, t));
    ASSERT_EQ(fs, gen_fs<hifat::HiFatFs>(trial_seed(4, t)));
    ASSERT_FALSE(fs.root.entries.empty());
  }
}

TEST(TrialSeed, SpreadsTrials) {
  EXPECT_NE(trial_seed(1, 0), trial_seed(1, 1));
  EXPECT_NE(trial_seed(1, 0), trial_seed(2, 0));
  EXPECT_EQ(trial_seed(5, 7), trial_seed(5, 7));
}

TEST(Properties, PassOnEveryLevel) {
  for (auto t : {Target::l1, Target::l2, Target::l3, Target::l4, Target::l5, Target::l6, Target::hifat,
                 Target::syscall}) {
    auto r1 = check_row1(t, 300, 42);
    EXPECT_TRUE(r1.passed()) << r1.summary();
    auto r2 = check_row2(t, 300, 42);
    EXPECT_TRUE(r2.passed()) << r2.summary();
    EXPECT_LT(r1.vacuous, r1.trials / 2) << r1.summary();
  }
  for (auto p : {Pair::l2_l1, Pair::l3_l2, Pair::l4_l3, Pair::l5_l4, Pair::l6_l4}) {
    auto r = check_commute(p, 300, 42);
    EXPECT_TRUE(r.passed()) << r.summary();
  }
}

TEST(FaultInjection, Row1CatchesADroppedCharacter) {
  WriteFn<L1Fs> lossy = [](const L1Fs& fs, const Path& p, std::size_t s, std::string_view t) {
    return wrchs(fs, p, s, t.empty() ? t : t.substr(0, t.size() - 1));
  };
  auto r = check_row1<L1Fs>(200, 7, lossy);
  EXPECT_FALSE(r.passed());
  ASSERT_TRUE(r.failing_seed);
  EXPECT_FALSE(r.counterexample.empty());
  bool from_a_trial = false;
  for (std::size_t t = 0; t < 200; ++t) from_a_trial |= trial_seed(7, t) == *r.failing_seed;
  EXPECT_TRUE(from_a_trial);
  EXPECT_NE(r.summary().find("FAIL"), std::string::npos);
}

TEST(FaultInjection, Row1CatchesABrokenL6Allocator) {
  // Writes succeed but leave the chain pointing at a free entry.
  WriteFn<L6Fs> leaky = [](const L6Fs& fs, const Path& p, std::size_t s, std::string_view t) {
    auto out = wrchs(fs, p, s, t);
    if (out) {
      const auto* f = lookup(out->root, p)->as_file();
      if (f->first) out->fat.entries[*f->first] = 0;
    }
    return out;
  };
  EXPECT_FALSE((check_row1<L6Fs>(200, 8, leaky).passed()));
}

TEST(FaultInjection, Row2CatchesCrossFileDamage) {
  WriteFn<L1Fs> clobber = [](const L1Fs& fs, const Path& p, std::size_t s, std::string_view t) {
    auto out = wrchs(fs, p, s, t);
    if (!out) return out;
    for_each_file(fs.root, [&](const Path& q, const L1File& f) {
      if (q != p && !f.contents.empty()) *out = *wrchs(*out, q, 0, "#");
    });
    return out;
  };
  EXPECT_FALSE((check_row2<L1Fs>(200, 9, clobber).passed()));
}

TEST(FaultInjection, Row2CatchesSharedBlocks) {
  // Allocation that ignores the alv and reuses block 0 for everything.
  WriteFn<L4Fs> greedy = [](const L4Fs& fs, const Path& p, std::size_t s, std::string_view t) {
    auto out = wrchs(fs, p, s, t);
    if (!out || out->disk.empty()) return out;
    auto* file = lookup(out->root, p)->as_file();
    if (!file->blocks.empty()) {
      out->disk[0] = out->disk[file->blocks.front()];
      file->blocks.front() = 0;
    }
    return out;
  };
  EXPECT_FALSE((check_row2<L4Fs>(300, 10, greedy).passed()));
}

TEST(FaultInjection, CommuteCatchesAFaultyConversion) {
  ConvertFn<L2Fs, L1Fs> flip = [](const L2Fs& fs) -> Expected<L1Fs, Error> {
    auto down = convert_down(fs);
    if (!down) return down;
    for_each_file(fs.root, [&](const Path& p, const L2File& f) {
      std::string rev(f.contents.rbegin(), f.contents.rend());
      lookup(down->root, p)->as_file()->contents = rev;
    });
    return down;
  };
  auto r = check_commute<L2Fs, L1Fs>(200, 11, flip);
  EXPECT_FALSE(r.passed());
  EXPECT_TRUE(r.failing_seed);

  ConvertFn<L6Fs, L4Fs> forget = [](const L6Fs& fs) -> Expected<L4Fs, Error> {
    auto down = convert_down(fs);
    if (down && !down->alv.empty()) down->alv.back() = !down->alv.back();
    return down;
  };
  EXPECT_FALSE((check_commute<L6Fs, L4Fs>(200, 12, forget).passed()));
}

TEST(SpaceIff, ExercisesBothBranchesOnFullDisks) {
  auto r = check_space_iff(1000, 1);
  EXPECT_TRUE(r.passed()) << r.summary();
  EXPECT_GT(r.coverage["success"], 0u);
  EXPECT_GT(r.coverage["no-space"], 0u);
  EXPECT_GT(r.coverage["full-disk-success"], 0u);
  EXPECT_GT(r.coverage["full-disk-no-space"], 0u);
}

TEST(AllocRefinement, Passes) {
  auto r = check_alloc_refinement(500, 1);
  EXPECT_TRUE(r.passed()) << r.summary();
}

TEST(ConcreteStack, TracesAgreeAndCoverEveryErrno) {
  auto r = check_concrete_stack(200, 1);
  EXPECT_TRUE(r.passed()) << r.summary();
  for (auto key : {"ok", "ENOENT", "EBADF", "EEXIST", "ENOTDIR", "EISDIR", "ENOSPC", "ENAMETOOLONG"})
    EXPECT_GT(r.coverage[key], 0u) << key;
}

TEST(ConcreteStack, EmptyScriptsAreTriviallyIdentical) {
  auto r = check_concrete_stack(20, 3, 0);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.coverage.size(), 0u);
}

TEST(Targets, Parse) {
  EXPECT_EQ(parse_target("L4"), Target::l4);
  EXPECT_EQ(parse_target("l6"), Target::l6);
  EXPECT_EQ(parse_target("hifat"), Target::hifat);
  EXPECT_EQ(parse_target("syscall"), Target::syscall);
  EXPECT_EQ(parse_target("L7"), std::nullopt);
  EXPECT_EQ(pair_for_upper(Target::l6), Pair::l6_l4);
  EXPECT_EQ(pair_for_upper(Target::l1), std::nullopt);
}
