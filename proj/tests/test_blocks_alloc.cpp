#include <gtest/gtest.h>

#include <random>

#include "fatws/model/alloc.hpp"
#include "fatws/model/blocks.hpp"

using namespace fatws;
using namespace fatws::model;

namespace {

constexpr bool U = true;
constexpr bool F = false;

std::string pad(std::string s, std::size_t n) {
  s.resize(n, kFill);
  return s;
}

}  // namespace

TEST(MakeBlocks, SplitsAndPads) {
  auto b = make_blocks("abcdefghij", 8);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0], "abcdefgh");
  EXPECT_EQ(b[1], pad("ij", 8));
}

TEST(MakeBlocks, EmptyTextHasNoBlocks) { EXPECT_TRUE(make_blocks("", 8).empty()); }

TEST(UnmakeBlocks, Examples) {
  std::vector<Block> one{"abcdefgh"};
  EXPECT_EQ(*unmake_blocks(one, 8), "abcdefgh");
  EXPECT_EQ(*unmake_blocks(std::vector<Block>{}, 0), "");
  std::vector<Block> two{"abcdefgh", pad("ij", 8)};
  EXPECT_EQ(*unmake_blocks(two, 10), "abcdefghij");
}

TEST(UnmakeBlocks, RejectsLengthsTheBlocksCannotHold) {
  std::vector<Block> two{"abcdefgh", pad("ij", 8)};
  EXPECT_EQ(unmake_blocks(two, 17).error(), Error::bad_length);
  EXPECT_EQ(unmake_blocks(two, 8).error(), Error::bad_length);  // second block unused
  EXPECT_EQ(unmake_blocks(std::vector<Block>{}, 1).error(), Error::bad_length);
}

TEST(Blocks, RoundTripProperty) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t bs = std::uniform_int_distribution<std::size_t>(1, 16)(rng);
    std::string t(std::uniform_int_distribution<std::size_t>(0, 80)(rng), 'x');
    for (auto& c : t) c = static_cast<char>(std::uniform_int_distribution<int>(0, 255)(rng));
    auto blocks = make_blocks(t, bs);
    ASSERT_EQ(blocks.size(), (t.size() + bs - 1) / bs);
    for (const auto& blk : blocks) ASSERT_EQ(blk.size(), bs);
    ASSERT_EQ(*unmake_blocks(blocks, t.size()), t);
  }
}

TEST(Splice, ReplacesInsideAndZeroFillsGaps) {
  EXPECT_EQ(splice("hello", 1, "xy"), "hxylo");
  EXPECT_EQ(splice("hello", 4, "xyz"), "hellxyz");
  EXPECT_EQ(splice("ab", 4, "z"), std::string("ab\0\0z", 5));
  EXPECT_EQ(splice("", 0, ""), "");
}

TEST(FindNFreeBlocks, LowestFirst) {
  AllocationVector alv{U, U, F, F, U};
  EXPECT_EQ(find_n_free_blocks(alv, 2), (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(find_n_free_blocks(alv, 0), std::vector<std::size_t>{});
  EXPECT_EQ(find_n_free_blocks(alv, 3), std::nullopt);
  EXPECT_EQ(alv, (AllocationVector{U, U, F, F, U}));
}

TEST(SetIndices, Examples) {
  std::vector<std::size_t> one{1};
  EXPECT_EQ(*set_indices({F, F}, one, true), (AllocationVector{F, U}));
  AllocationVector alv{U, F, U};
  EXPECT_EQ(*set_indices(alv, {}, true), alv);
  std::vector<std::size_t> ix{1};
  EXPECT_EQ(*set_indices(*set_indices(alv, ix, true), ix, false), alv);
  std::vector<std::size_t> bad{3};
  EXPECT_EQ(set_indices(alv, bad, true).error(), Error::index_out_of_range);
}

TEST(CountFreeBlocks, MatchesElementwiseCount) {
  EXPECT_EQ(count_free_blocks({U, U, F}), 1u);
  EXPECT_EQ(count_free_blocks({}), 0u);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    AllocationVector alv(std::uniform_int_distribution<std::size_t>(0, 100)(rng));
    std::size_t expect = 0;
    for (std::size_t i = 0; i < alv.size(); ++i) {
      alv[i] = rng() & 1;
      if (!alv[i]) ++expect;
    }
    ASSERT_EQ(count_free_blocks(alv), expect);
  }
}

namespace {

FaTable sample_table() {
  FaTable f;
  f.entries = {0x0FFFFFF8, 0x0FFFFFFF, kEocWrite, 4, kEocWrite, kEocWrite, kEocWrite, kEocWrite, kEocWrite, 0};
  return f;
}

}  // namespace

TEST(FaTableToAlv, SampleTableUsedUpToEightFreeAtNine) {
  auto alv = fa_table_to_alv(sample_table());
  ASSERT_EQ(alv.size(), 10u);
  for (std::size_t i = 0; i <= 8; ++i) EXPECT_TRUE(alv[i]) << i;
  EXPECT_FALSE(alv[9]);
}

TEST(FaTableToAlv, ReservedEntriesAlwaysUsed) {
  FaTable zeros;
  zeros.entries.assign(4, 0);
  EXPECT_EQ(fa_table_to_alv(zeros), (AllocationVector{U, U, F, F}));
}

TEST(L6FileIndexList, SampleChains) {
  auto f = sample_table();
  EXPECT_EQ(*l6_file_index_list(f, 3, 16, 8), (std::vector<std::size_t>{3, 4}));
  EXPECT_EQ(*l6_file_index_list(f, 5, 8, 8), (std::vector<std::size_t>{5}));
}

TEST(L6FileIndexList, BadChains) {
  FaTable cyc;
  cyc.entries = {0x0FFFFFF8, 0x0FFFFFFF, 3, 2};
  EXPECT_EQ(l6_file_index_list(cyc, 2, 8, 8).error(), Error::bad_chain);

  auto f = sample_table();
  EXPECT_EQ(l6_file_index_list(f, 9, 1, 8).error(), Error::bad_chain);   // free entry
  EXPECT_EQ(l6_file_index_list(f, 1, 1, 8).error(), Error::bad_chain);   // reserved
  EXPECT_EQ(l6_file_index_list(f, 10, 1, 8).error(), Error::bad_chain);  // out of range
  EXPECT_EQ(l6_file_index_list(f, 5, 9, 8).error(), Error::bad_chain);   // too short

  FaTable link_out;
  link_out.entries = {0x0FFFFFF8, 0x0FFFFFFF, 7};
  EXPECT_EQ(l6_file_index_list(link_out, 2, 1, 8).error(), Error::bad_chain);
}

TEST(L6FileIndexList, WholeEocRangeEndsChains) {
  for (std::uint32_t eoc = kEocFloor; eoc <= kEocWrite; ++eoc) {
    FaTable f;
    f.entries = {0x0FFFFFF8, 0x0FFFFFFF, 3, eoc};
    EXPECT_EQ(*l6_file_index_list(f, 2, 16, 8), (std::vector<std::size_t>{2, 3})) << eoc;
  }
}

// count_free_blocks(fa_table_to_alv(f)) against a brute-force scan of zero
// entries at indices >= 2.
TEST(AllocationRefinement, FreeCountsAgree) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    FaTable f;
    f.entries.resize(std::uniform_int_distribution<std::size_t>(0, 40)(rng));
    for (auto& e : f.entries) e = (rng() % 3 == 0) ? 0u : static_cast<std::uint32_t>(rng());
    std::size_t zeros = 0;
    for (std::size_t i = 2; i < f.entries.size(); ++i) zeros += f.entries[i] == 0;
    ASSERT_EQ(count_free_blocks(fa_table_to_alv(f)), zeros);
  }
}
