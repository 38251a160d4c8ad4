#include <gtest/gtest.h>

#include <cmath>

#include "mga/error.hpp"
#include "mga/timecode.hpp"
#include "support.hpp"

namespace mga::timecode {
namespace {

using mga::testing::Rng;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no mga::Error thrown";
  return ErrorCode::InvalidArgument;
}

// Reference value computed independently with floating point rounding.
std::uint64_t oracle_ms(const Timecode& tc) {
  long double ms = ((tc.hours * 60.0L + tc.minutes) * 60.0L + tc.seconds) * 1000.0L;
  if (tc.frames) ms += std::floor(*tc.frames * 1000.0L / *tc.frame_rate + 0.5L);
  return static_cast<std::uint64_t>(ms);
}

// Adds a duration expressed as h/m/s/frames, carrying like a clock.
Timecode shifted(Timecode tc, unsigned h, unsigned m, unsigned s, unsigned f) {
  unsigned carry = 0;
  if (tc.frames) {
    const unsigned total = *tc.frames + f;
    tc.frames = total % *tc.frame_rate;
    carry = total / *tc.frame_rate;
  }
  unsigned secs = tc.seconds + s + carry;
  tc.seconds = secs % 60;
  unsigned mins = tc.minutes + m + secs / 60;
  tc.minutes = mins % 60;
  tc.hours += h + mins / 60;
  return tc;
}

TEST(ParseTimecode, FourSegmentsWithRate) {
  const auto tc = parse_timecode("10:17:04:00", 25);
  EXPECT_EQ(tc, (Timecode{10, 17, 4, 0u, 25u}));
}

TEST(ParseTimecode, ThreeSegments) {
  EXPECT_EQ(parse_timecode("00:17:04"), (Timecode{0, 17, 4, std::nullopt, std::nullopt}));
  EXPECT_EQ(parse_timecode(" 1:02:03 "), (Timecode{1, 2, 3, std::nullopt, std::nullopt}));
}

TEST(ParseTimecode, Rejections) {
  EXPECT_EQ(code_of([] { parse_timecode("10:70:00"); }), ErrorCode::MalformedTimecode);
  EXPECT_EQ(code_of([] { parse_timecode("10:00:60"); }), ErrorCode::MalformedTimecode);
  EXPECT_EQ(code_of([] { parse_timecode("10:0:00"); }), ErrorCode::MalformedTimecode);
  EXPECT_EQ(code_of([] { parse_timecode("ab:cd:ef"); }), ErrorCode::MalformedTimecode);
  EXPECT_EQ(code_of([] { parse_timecode("10:00"); }), ErrorCode::MalformedTimecode);
  EXPECT_EQ(code_of([] { parse_timecode(""); }), ErrorCode::MalformedTimecode);
  EXPECT_EQ(code_of([] { parse_timecode("10:00:00:25", 25); }), ErrorCode::MalformedTimecode);
  EXPECT_EQ(code_of([] { parse_timecode("10:17:04:00"); }), ErrorCode::MissingFrameRate);
}

TEST(Normalize, TwoNotationsAgree) {
  const auto a = normalize(parse_timecode("10:17:04:00", 25), parse_timecode("10:00:00:00", 25));
  const auto b = normalize(parse_timecode("00:17:04"), parse_timecode("00:00:00"));
  EXPECT_EQ(a, ContentTime{1'024'000});
  EXPECT_EQ(b, ContentTime{1'024'000});
  EXPECT_EQ(a, b);
}

TEST(Normalize, FramesBecomeMilliseconds) {
  EXPECT_EQ(normalize(parse_timecode("00:00:01:12", 25), parse_timecode("00:00:00")),
            ContentTime{1'480});
}

TEST(Normalize, Errors) {
  EXPECT_EQ(code_of([] {
              normalize(parse_timecode("00:00:01"), parse_timecode("00:00:02"));
            }),
            ErrorCode::NegativeResult);
  EXPECT_EQ(code_of([] {
              normalize(parse_timecode("00:00:01:00", 25), parse_timecode("00:00:00:00", 30));
            }),
            ErrorCode::FrameRateMismatch);
}

TEST(Format, RoundTripsThroughParse) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto tc = mga::testing::random_timecode(rng, i % 2 == 0);
    EXPECT_EQ(parse_timecode(format(tc), tc.frame_rate), tc);
  }
}

TEST(TimecodeProperties, AbsoluteMatchesOracle) {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const auto tc = mga::testing::random_timecode(rng, i % 2 == 0);
    ASSERT_EQ(absolute_ms(tc), oracle_ms(tc)) << format(tc);
  }
}

TEST(TimecodeProperties, ZeroCase) {
  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const auto tc = mga::testing::random_timecode(rng, i % 2 == 0);
    ASSERT_EQ(normalize(tc, tc), ContentTime{0}) << format(tc);
  }
}

TEST(TimecodeProperties, ReferenceInvarianceUnderWholeSecondShifts) {
  Rng rng(14);
  std::uniform_int_distribution<unsigned> hours(0, 20), minsec(0, 59);
  for (int i = 0; i < 1000; ++i) {
    auto a = mga::testing::random_timecode(rng, i % 2 == 0);
    auto b = mga::testing::random_timecode(rng, i % 2 == 0);
    if (b.frame_rate) b.frame_rate = a.frame_rate, b.frames = *b.frames % *a.frame_rate;
    if (absolute_ms(a) < absolute_ms(b)) std::swap(a, b);
    const unsigned h = hours(rng), m = minsec(rng), s = minsec(rng);
    ASSERT_EQ(normalize(shifted(a, h, m, s, 0), shifted(b, h, m, s, 0)), normalize(a, b))
        << format(a) << " vs " << format(b);
  }
}

TEST(TimecodeProperties, ReferenceInvarianceUnderFrameShifts) {
  // Frame shifts keep the offset exact only when a frame is a whole number
  // of milliseconds (25 and 50 fps).
  Rng rng(15);
  std::uniform_int_distribution<unsigned> frames(0, 200), pick(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const unsigned rate = pick(rng) ? 25 : 50;
    auto a = mga::testing::random_timecode(rng, false);
    auto b = mga::testing::random_timecode(rng, false);
    a.frame_rate = b.frame_rate = rate;
    a.frames = frames(rng) % rate;
    b.frames = frames(rng) % rate;
    if (absolute_ms(a) < absolute_ms(b)) std::swap(a, b);
    const unsigned f = frames(rng);
    ASSERT_EQ(normalize(shifted(a, 0, 0, 0, f), shifted(b, 0, 0, 0, f)), normalize(a, b));
  }
}

TEST(TimecodeProperties, MonotoneInPosition) {
  Rng rng(16);
  const Timecode zero{};
  for (int i = 0; i < 500; ++i) {
    const auto a = mga::testing::random_timecode(rng, false);
    const auto b = shifted(a, 0, 0, 1, 0);
    EXPECT_LT(normalize(a, zero), normalize(b, zero));
  }
}

}  // namespace
}  // namespace mga::timecode
