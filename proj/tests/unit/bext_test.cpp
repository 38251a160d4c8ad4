#include <gtest/gtest.h>

#include <algorithm>

#include "mga/container.hpp"
#include "mga/error.hpp"

namespace mga::container {
namespace {

ContainerFile blank_file() { return make_pcm(48000, 2, 16, Bytes(40, 0)); }

std::size_t count_chunks(const ContainerFile& f, FourCC id) {
  return static_cast<std::size_t>(
      std::count_if(f.chunks.begin(), f.chunks.end(), [&](const Chunk& c) { return c.id == id; }));
}

TEST(Bext, FixedRegionIs602Bytes) {
  // 256 + 32 + 32 + 10 + 8 + 8 + 2 + 64 + 10 + 180
  EXPECT_EQ(kBextFixedSize, 602u);
}

TEST(Bext, DescriptionIsReadUpToPadding) {
  Bytes payload(kBextFixedSize, 0);
  const std::string text = "News 2024-05-01";
  std::copy(text.begin(), text.end(), payload.begin());
  auto file = blank_file();
  file.chunks.insert(file.chunks.begin(), Chunk::make(kBext, payload));
  refresh(file);
  const auto info = read_bext(parse_container(write_container(file)));
  ASSERT_TRUE(info);
  EXPECT_EQ(info->description, text);
}

TEST(Bext, AbsentWithoutChunk) { EXPECT_FALSE(read_bext(blank_file())); }

TEST(Bext, ShortPayloadIsMalformed) {
  auto file = blank_file();
  file.chunks.push_back(Chunk::make(kBext, Bytes(100, 0)));
  refresh(file);
  try {
    read_bext(file);
    FAIL() << "expected MalformedChunk";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedChunk);
  }
}

TEST(Bext, DescriptionOf256BytesRoundTrips) {
  BextInfo info;
  info.description = std::string(256, 'D');
  info.originator = "mga";
  info.time_reference = 48000ull * 3600;
  const auto file = write_bext(blank_file(), info);
  const auto back = read_bext(parse_container(write_container(file)));
  ASSERT_TRUE(back);
  EXPECT_EQ(back->description, info.description);
  EXPECT_EQ(back->originator, "mga");
  EXPECT_EQ(back->time_reference, info.time_reference);
}

TEST(Bext, DescriptionOf257BytesIsRejected) {
  BextInfo info;
  info.description = std::string(257, 'D');
  try {
    write_bext(blank_file(), info);
    FAIL() << "expected DescriptionTooLong";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DescriptionTooLong);
  }
}

TEST(Bext, OtherOverlongFieldAndNonAscii) {
  BextInfo info;
  info.originator = std::string(33, 'o');
  try {
    write_bext(blank_file(), info);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FieldTooLong);
  }
  info = {};
  info.description = "Grüße";
  try {
    write_bext(blank_file(), info);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonAsciiText);
  }
}

TEST(Bext, WritingTwiceKeepsOneChunk) {
  BextInfo a, b;
  a.description = "first";
  b.description = "second";
  const auto file = write_bext(write_bext(blank_file(), a), b);
  EXPECT_EQ(count_chunks(file, kBext), 1u);
  EXPECT_EQ(read_bext(file)->description, "second");
}

TEST(Bext, OpaqueFieldsArePreserved) {
  BextInfo info;
  info.version = 2;
  for (std::size_t i = 0; i < info.umid.size(); ++i) info.umid[i] = static_cast<std::uint8_t>(i);
  for (std::size_t i = 0; i < info.loudness.size(); ++i)
    info.loudness[i] = static_cast<std::uint8_t>(0xF0 + i);
  info.reserved[0] = 0xAB;
  info.coding_history = "A=PCM,F=48000,W=16,M=stereo,T=test\r\n";
  const auto back = read_bext(parse_container(write_container(write_bext(blank_file(), info))));
  ASSERT_TRUE(back);
  EXPECT_EQ(back->umid, info.umid);
  EXPECT_EQ(back->loudness, info.loudness);
  EXPECT_EQ(back->reserved, info.reserved);
  EXPECT_EQ(back->version, 2);
  EXPECT_EQ(back->coding_history, info.coding_history);
}

TEST(Axml, RoundTripsSmallDocument) {
  const auto file = write_axml(blank_file(), "<mgaProject/>");
  EXPECT_EQ(read_axml(parse_container(write_container(file))), "<mgaProject/>");
}

TEST(Axml, AbsentWithoutChunk) { EXPECT_FALSE(read_axml(blank_file())); }

TEST(Axml, TenMebibytePayloadInBw64) {
  std::string xml = "<big>";
  xml.reserve(10u << 20);
  while (xml.size() < (10u << 20) - 6) xml += "abcdefghij";
  xml.resize((10u << 20) - 6);
  xml += "</big>";
  ASSERT_EQ(xml.size(), 10u << 20);
  const auto file = write_axml(upgrade_to_bw64(blank_file()), xml);
  const Bytes bytes = write_container(file);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "BW64");
  EXPECT_EQ(read_axml(parse_container(bytes)), xml);
}

TEST(Axml, InvalidUtf8IsReported) {
  auto file = blank_file();
  file.chunks.push_back(Chunk::make(kAxml, Bytes{'<', 0xC3, 0x28, '>'}));
  refresh(file);
  try {
    read_axml(file);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidUtf8);
  }
}

}  // namespace
}  // namespace mga::container
