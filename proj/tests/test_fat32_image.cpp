#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fatws/fat32/format.hpp"
#include "fatws/fat32/image.hpp"
#include "support.hpp"

using namespace fatws;
using namespace fatws::fat32;
using fatws::test::load;
using fatws::test::parse_fixture;

namespace {

std::uint32_t le32(const Bytes& b, std::size_t off) {
  return std::uint32_t{b[off]} | std::uint32_t{b[off + 1]} << 8 | std::uint32_t{b[off + 2]} << 16 |
         std::uint32_t{b[off + 3]} << 24;
}

void put16(Bytes& b, std::size_t off, std::uint16_t v) {
  b[off] = static_cast<std::uint8_t>(v);
  b[off + 1] = static_cast<std::uint8_t>(v >> 8);
}

void put32(Bytes& b, std::size_t off, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) b[off + k] = static_cast<std::uint8_t>(v >> (8 * k));
}

bool fats_mirrored(const Fat32Image& img) {
  for (const auto& fat : img.fats)
    if (fat != img.fats.front()) return false;
  return true;
}

}  // namespace

TEST(ParseImage, SampleGeometry) {
  auto img = parse_fixture("sample.img");
  EXPECT_EQ(img.reserved.bytes_per_sector, 512);
  EXPECT_EQ(img.reserved.sectors_per_cluster, 1);
  EXPECT_EQ(img.reserved.reserved_sector_count, 32);
  EXPECT_EQ(img.reserved.num_fats, 2);
  EXPECT_EQ(img.reserved.fat_size_32, 1u);
  EXPECT_EQ(img.reserved.root_cluster, 2u);
  EXPECT_EQ(img.reserved.total_sectors_32, 42u);
  EXPECT_EQ(count_of_clusters(img), 8u);
  EXPECT_EQ(img.clusters.size(), 8u);
  EXPECT_EQ(img.fats.size(), 2u);
  EXPECT_TRUE(compliant_fat32_p(img, Compliance::relaxed));
  EXPECT_FALSE(compliant_fat32_p(img, Compliance::strict));
}

TEST(ParseImage, PassThroughFields) {
  auto img = parse_fixture("multi.img");
  EXPECT_EQ(img.reserved.media(), 0xF8);
  EXPECT_EQ(img.reserved.sectors_per_track(), 63);
  EXPECT_EQ(img.reserved.num_heads(), 255);
  EXPECT_EQ(img.reserved.hidden_sectors(), 0u);
  EXPECT_EQ(img.reserved.drive_number(), 0x80);
  EXPECT_EQ(img.reserved.volume_id(), 0xCAFE1234u);
  EXPECT_EQ(img.reserved.volume_label(), "FATWS TEST ");
  EXPECT_EQ(img.cluster_size(), 1024u);
  EXPECT_EQ(img.tail.size(), 512u);  // one sector past the last whole cluster
}

TEST(ParseImage, Errors) {
  EXPECT_EQ(parse_image(Bytes(100, 0)).error(), Error::truncated);

  auto bytes = load("sample.img");
  auto unsigned_ = bytes;
  unsigned_[510] = 0;
  EXPECT_EQ(parse_image(unsigned_, Compliance::relaxed).error(), Error::bad_signature);

  auto small_sectors = bytes;
  put16(small_sectors, bpb::kBytesPerSector, 256);
  EXPECT_EQ(parse_image(small_sectors, Compliance::relaxed).error(), Error::non_compliant);

  EXPECT_EQ(parse_image(bytes, Compliance::strict).error(), Error::non_compliant);

  auto short_ = bytes;
  short_.resize(bytes.size() - 1);
  EXPECT_EQ(parse_image(short_, Compliance::relaxed).error(), Error::truncated);
}

TEST(CompliantFat32P, PatchedFields) {
  auto img = parse_fixture("sample.img");
  EXPECT_TRUE(compliant_fat32_p(img, Compliance::relaxed));
  auto r = img.reserved;
  r.root_cluster = 1;
  EXPECT_FALSE(compliant_fat32_p(r, Compliance::relaxed));
  r = img.reserved;
  r.sectors_per_cluster = 0;
  EXPECT_FALSE(compliant_fat32_p(r, Compliance::relaxed));
  r = img.reserved;
  r.bytes_per_sector = 256;
  EXPECT_FALSE(compliant_fat32_p(r, Compliance::relaxed));
}

TEST(CompliantFat32P, StrictNeedsTheFat32ClusterCount) {
  ReservedArea r;
  r.bytes_per_sector = 512;
  r.sectors_per_cluster = 1;
  r.reserved_sector_count = 32;
  r.num_fats = 2;
  r.fat_size_32 = 512;
  r.total_sectors_32 = 32 + 2 * 512 + 65524;
  EXPECT_FALSE(compliant_fat32_p(r, Compliance::strict));
  r.total_sectors_32 += 1;
  EXPECT_TRUE(compliant_fat32_p(r, Compliance::strict));
}

TEST(CountOfClusters, Arithmetic) {
  ReservedArea r;
  r.total_sectors_32 = 100;
  r.reserved_sector_count = 32;
  r.num_fats = 2;
  r.fat_size_32 = 1;
  r.sectors_per_cluster = 1;
  EXPECT_EQ(count_of_clusters(r), 66u);
  r.total_sectors_32 = 101;
  r.sectors_per_cluster = 2;
  EXPECT_EQ(count_of_clusters(r), 33u);
  r.total_sectors_32 = 10;
  EXPECT_EQ(count_of_clusters(r), 0u);
  r.sectors_per_cluster = 0;
  EXPECT_EQ(count_of_clusters(r), 0u);
}

TEST(SerializeImage, FixturesAreLossless) {
  for (auto name : {"sample.img", "blank.img", "multi.img"}) {
    auto bytes = load(name);
    auto img = parse_image(bytes, Compliance::relaxed);
    ASSERT_TRUE(img) << name;
    EXPECT_EQ(serialize_image(*img), bytes) << name;
    EXPECT_EQ(*parse_image(serialize_image(*img), Compliance::relaxed), *img) << name;
  }
}

TEST(SerializeImage, TrailingBytesPastTheVolumeSurvive) {
  auto bytes = load("sample.img");
  bytes.insert(bytes.end(), {1, 2, 3, 4, 5});
  EXPECT_EQ(serialize_image(*parse_image(bytes, Compliance::relaxed)), bytes);
}

// Byte-diff oracle: one FAT write touches num_fats x 4 bytes, at the
// entry's offset in each copy.
TEST(SerializeImage, OneFatWriteDiffersInMirroredWords) {
  auto bytes = load("sample.img");
  auto img = parse_fixture("sample.img");
  ASSERT_TRUE(set_fat_entry(img, 9, 0x0ABCDEF1));
  auto out = serialize_image(img);
  ASSERT_EQ(out.size(), bytes.size());
  std::set<std::size_t> diff;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i] != bytes[i]) diff.insert(i);
  std::set<std::size_t> expect;
  for (std::size_t copy = 0; copy < 2; ++copy)
    for (std::size_t k = 0; k < 4; ++k) expect.insert(32 * 512 + copy * 512 + 9 * 4 + k);
  EXPECT_EQ(diff, expect);
}

TEST(FatEntry, MasksTopNibble) {
  auto img = parse_fixture("sample.img");
  img.fats[0][3] = 0xF0000004;
  EXPECT_EQ(*fat_entry(img, 3), 4u);
  EXPECT_EQ(*fat_entry(parse_fixture("sample.img"), 9), 0u);
  EXPECT_EQ(fat_entry(img, 10).error(), Error::index_out_of_range);
}

TEST(FatEntry, MatchesRawBytes) {
  auto bytes = load("multi.img");
  auto img = parse_fixture("multi.img");
  const std::size_t fat_off = 8 * 512;
  for (std::size_t i = 0; i < img.cluster_limit(); ++i)
    EXPECT_EQ(*fat_entry(img, i), le32(bytes, fat_off + 4 * i) & 0x0FFFFFFF) << i;
}

TEST(SetFatEntry, KeepsTopNibbleAndMirrors) {
  auto img = parse_fixture("sample.img");
  for (auto& fat : img.fats) fat[9] = 0xF0000000;
  ASSERT_TRUE(set_fat_entry(img, 9, 5));
  EXPECT_EQ(img.fats[0][9], 0xF0000005u);
  EXPECT_EQ(img.fats[1][9], 0xF0000005u);
  EXPECT_EQ(*fat_entry(img, 9), 5u);
}

TEST(SetFatEntry, Errors) {
  auto img = parse_fixture("sample.img");
  auto before = img;
  EXPECT_EQ(set_fat_entry(img, 1, 5).error(), Error::reserved_index);
  EXPECT_EQ(set_fat_entry(img, 0, 5).error(), Error::reserved_index);
  EXPECT_EQ(set_fat_entry(img, 10, 5).error(), Error::index_out_of_range);
  EXPECT_EQ(set_fat_entry(img, 9, 0x10000000).error(), Error::field_overflow);
  EXPECT_EQ(img, before);
}

TEST(SetFatEntry, ReadAfterWriteProperty) {
  auto img = parse_fixture("multi.img");
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto i = std::uniform_int_distribution<std::size_t>(2, img.cluster_limit() - 1)(rng);
    const auto v = static_cast<std::uint32_t>(rng() & 0x0FFFFFFF);
    const auto top = img.fats[0][i] & 0xF0000000;
    ASSERT_TRUE(set_fat_entry(img, i, v));
    ASSERT_EQ(*fat_entry(img, i), v);
    ASSERT_EQ(img.fats[0][i] & 0xF0000000, top);
  }
}

TEST(IsEoc, Range) {
  EXPECT_TRUE(is_eoc(0x0FFFFFFF));
  EXPECT_TRUE(is_eoc(0x0FFFFFF8));
  EXPECT_FALSE(is_eoc(0x0FFFFFF7));
  EXPECT_FALSE(is_eoc(4));
}

TEST(GetClusterchain, Sample) {
  auto img = parse_fixture("sample.img");
  EXPECT_EQ(*get_clusterchain(img, 3), (std::vector<std::uint32_t>{3, 4}));
  EXPECT_EQ(*get_clusterchain(img, 6), (std::vector<std::uint32_t>{6}));
  EXPECT_EQ(*get_clusterchain(img, 2), (std::vector<std::uint32_t>{2}));
}

TEST(GetClusterchain, ScatteredChainAndEocVariants) {
  auto img = parse_fixture("multi.img");
  EXPECT_EQ(*get_clusterchain(img, 4), (std::vector<std::uint32_t>{4, 7, 5, 12}));  // ends 0x0FFFFFF8
  EXPECT_EQ(*get_clusterchain(img, 3), (std::vector<std::uint32_t>{3, 6}));         // ends 0xFFFFFFFF
}

TEST(GetClusterchain, BadChains) {
  auto img = parse_fixture("sample.img");
  ASSERT_TRUE(set_fat_entry(img, 2, 3));
  ASSERT_TRUE(set_fat_entry(img, 3, 2));
  EXPECT_EQ(get_clusterchain(img, 2).error(), Error::bad_chain);  // cycle

  auto free_ = parse_fixture("sample.img");
  EXPECT_EQ(get_clusterchain(free_, 9).error(), Error::bad_chain);
  EXPECT_EQ(get_clusterchain(free_, 1).error(), Error::bad_chain);
  EXPECT_EQ(get_clusterchain(free_, 10).error(), Error::bad_chain);

  auto reserved_link = parse_fixture("sample.img");
  ASSERT_TRUE(set_fat_entry(reserved_link, 5, 1));
  EXPECT_EQ(get_clusterchain(reserved_link, 5).error(), Error::bad_chain);
}

// Chain soundness over random tables: distinct, in range, only the last
// entry is an EOC.
TEST(GetClusterchain, SoundnessProperty) {
  auto tmpl = parse_fixture("multi.img");
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    auto img = tmpl;
    for (std::size_t i = 2; i < img.cluster_limit(); ++i) {
      const auto roll = rng() % 4;
      const std::uint32_t v = roll == 0   ? 0
                              : roll == 1 ? 0x0FFFFFF8 + static_cast<std::uint32_t>(rng() % 8)
                                          : static_cast<std::uint32_t>(rng() % (img.cluster_limit() + 2));
      ASSERT_TRUE(set_fat_entry(img, i, v));
    }
    for (std::uint32_t first = 2; first < img.cluster_limit(); ++first) {
      auto chain = get_clusterchain(img, first);
      if (!chain) continue;
      std::set<std::uint32_t> seen(chain->begin(), chain->end());
      ASSERT_EQ(seen.size(), chain->size());
      for (std::size_t k = 0; k < chain->size(); ++k) {
        ASSERT_GE((*chain)[k], 2u);
        ASSERT_LT((*chain)[k], img.cluster_limit());
        ASSERT_EQ(is_eoc(*fat_entry(img, (*chain)[k])), k + 1 == chain->size());
      }
    }
  }
}

TEST(ReadFileContents, Truncation) {
  auto img = parse_fixture("sample.img");
  auto ten = read_file_contents(img, 7, 10);
  ASSERT_TRUE(ten);
  EXPECT_EQ(*ten, Bytes(img.cluster(7).begin(), img.cluster(7).begin() + 10));

  auto vmlinuz = read_file_contents(img, 3, 700);
  ASSERT_TRUE(vmlinuz);
  Bytes joined = img.cluster(3);
  joined.insert(joined.end(), img.cluster(4).begin(), img.cluster(4).end());
  joined.resize(700);
  EXPECT_EQ(*vmlinuz, joined);

  EXPECT_EQ(read_file_contents(img, 5, 513).error(), Error::size_mismatch);
  EXPECT_EQ(read_file_contents(img, 9, 1).error(), Error::bad_chain);
}

TEST(ReadDirectoryContents, WholeChain) {
  auto img = parse_fixture("multi.img");
  auto dir = read_directory_contents(img, 3);
  ASSERT_TRUE(dir);
  EXPECT_EQ(dir->size(), 2 * img.cluster_size());
}

TEST(CountFreeClusters, Examples) {
  auto sample = parse_fixture("sample.img");
  EXPECT_EQ(count_free_clusters(sample), 1u);
  auto blank = parse_fixture("blank.img");
  EXPECT_EQ(count_free_clusters(blank), count_of_clusters(blank) - 1);
  ASSERT_TRUE(allocate_clusters(blank, 1));
  EXPECT_EQ(count_free_clusters(blank), count_of_clusters(blank) - 2);
}

TEST(CountFreeClusters, MatchesRawScan) {
  for (auto name : {"sample.img", "blank.img", "multi.img"}) {
    auto bytes = load(name);
    auto img = parse_fixture(name);
    const std::size_t fat_off = std::size_t{img.reserved.reserved_sector_count} * img.reserved.bytes_per_sector;
    std::size_t zeros = 0;
    for (std::size_t i = 2; i < img.cluster_limit(); ++i) zeros += (le32(bytes, fat_off + 4 * i) & 0x0FFFFFFF) == 0;
    EXPECT_EQ(count_free_clusters(img), zeros) << name;
  }
}

TEST(AllocateClusters, SampleHasExactlyOneFreeEntry) {
  auto img = parse_fixture("sample.img");
  auto before = img;
  EXPECT_EQ(allocate_clusters(img, 2).error(), Error::no_space);
  EXPECT_EQ(img, before);
  auto got = allocate_clusters(img, 1);
  ASSERT_TRUE(got);
  EXPECT_EQ(*got, std::vector<std::uint32_t>{9});
  EXPECT_EQ(*fat_entry(img, 9), 0x0FFFFFFFu);
}

TEST(AllocateClusters, ConservationAndMirroring) {
  auto img = parse_fixture("multi.img");
  std::mt19937_64 rng(13);
  while (count_free_clusters(img) > 0) {
    const auto free_before = count_free_clusters(img);
    const auto n = std::uniform_int_distribution<std::size_t>(0, std::min<std::size_t>(free_before, 5))(rng);
    auto before = img;
    auto got = allocate_clusters(img, n);
    ASSERT_TRUE(got);
    ASSERT_EQ(count_free_clusters(img), free_before - n);
    ASSERT_TRUE(fats_mirrored(img));
    std::set<std::uint32_t> mine(got->begin(), got->end());
    for (std::size_t i = 0; i < img.cluster_limit(); ++i)
      if (!mine.contains(static_cast<std::uint32_t>(i))) {
        ASSERT_EQ(img.fats[0][i], before.fats[0][i]);
      }
    if (n > 0) {
      ASSERT_EQ(*get_clusterchain(img, got->front()), *got);
      ASSERT_TRUE(std::is_sorted(got->begin(), got->end()));
    }
  }
  EXPECT_EQ(allocate_clusters(img, 1).error(), Error::no_space);
}

TEST(AbstractFat, RefinesToSameFreeCount) {
  for (auto name : {"sample.img", "blank.img", "multi.img"}) {
    auto img = parse_fixture(name);
    EXPECT_EQ(model::count_free_blocks(model::fa_table_to_alv(abstract_fat(img))), count_free_clusters(img)) << name;
  }
}

TEST(FormatImage, GeometryAndLayout) {
  FormatOptions opts;
  opts.cluster_count = 8;
  auto bytes = format_image(opts);
  ASSERT_TRUE(bytes);
  auto img = parse_image(*bytes, Compliance::relaxed);
  ASSERT_TRUE(img);
  EXPECT_EQ(count_of_clusters(*img), 8u);
  EXPECT_EQ(img->reserved.root_cluster, 2u);
  EXPECT_EQ(count_free_clusters(*img), 7u);
  EXPECT_EQ(*fat_entry(*img, 2), 0x0FFFFFFFu);
  EXPECT_EQ(bytes->size(), (32 + 2 + 8) * 512u);
  EXPECT_EQ(le32(*bytes, 512), 0x41615252u);  // FSInfo lead signature
}

TEST(FormatImage, LargerClusters) {
  FormatOptions opts;
  opts.cluster_count = 300;
  opts.cluster_size = 4096;
  auto img = parse_image(*format_image(opts), Compliance::relaxed);
  ASSERT_TRUE(img);
  EXPECT_EQ(img->reserved.sectors_per_cluster, 8);
  EXPECT_EQ(count_of_clusters(*img), 300u);
  EXPECT_EQ(img->reserved.fat_size_32, 3u);  // 302 words
}

TEST(FormatImage, UnsatisfiableGeometry) {
  FormatOptions opts;
  opts.cluster_size = 768;  // 1.5 sectors
  EXPECT_EQ(format_image(opts).error(), Error::non_compliant);
  opts.cluster_size = 256;
  EXPECT_EQ(format_image(opts).error(), Error::non_compliant);
  opts.cluster_size = 512 * 256;
  EXPECT_EQ(format_image(opts).error(), Error::non_compliant);
  opts.cluster_size = 512;
  opts.cluster_count = 0;
  EXPECT_EQ(format_image(opts).error(), Error::non_compliant);
}

TEST(FormatImage, ParseSerializeIdentity) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    FormatOptions opts;
    opts.cluster_count = std::uniform_int_distribution<std::uint32_t>(1, 200)(rng);
    opts.cluster_size = 512u << std::uniform_int_distribution<int>(0, 3)(rng);
    opts.volume_id = static_cast<std::uint32_t>(rng());
    auto bytes = format_image(opts);
    ASSERT_TRUE(bytes);
    auto img = parse_image(*bytes, Compliance::relaxed);
    ASSERT_TRUE(img);
    ASSERT_EQ(serialize_image(*img), *bytes);
    ASSERT_EQ(img->reserved.volume_id(), opts.volume_id);
  }
}

TEST(ParseReserved, DecodesWithoutComplianceChecks) {
  auto r = parse_reserved(load("nonc.img"));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->bytes_per_sector, 256);
  EXPECT_FALSE(compliant_fat32_p(*r, Compliance::relaxed));
  Bytes tiny(512, 0);
  EXPECT_EQ(parse_reserved(tiny).error(), Error::bad_signature);
  put32(tiny, 0, 0);
  EXPECT_EQ(parse_reserved(Bytes(511, 0)).error(), Error::truncated);
}
