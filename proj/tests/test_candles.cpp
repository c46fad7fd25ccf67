#include "rulefx/candles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

using namespace rulefx;
namespace fs = std::filesystem;

namespace {

std::string write_file(const std::string& name, const std::string& content) {
    const fs::path path = fs::path(testing::TempDir()) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    return path.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

constexpr const char* kHeader = "timestamp,open,high,low,close\n";

}  // namespace

TEST(Candles, SynthRoundTripThroughCsv) {
    const CandleSeries s = synthesize(7, 64, Regime::RandomWalk);
    const std::string path = write_file("roundtrip.csv", "");
    write_csv(s, path);
    const CandleSeries r = load_csv(path, s.pair);

    ASSERT_EQ(r.size(), s.size());
    EXPECT_TRUE((r.timestamp == s.timestamp).all());
    EXPECT_EQ(r.bar_interval, s.bar_interval);
    // The file quantizes prices to 6 decimals.
    EXPECT_TRUE((r.open - s.open).abs().maxCoeff() < 5.1e-7);
    EXPECT_TRUE((r.high - s.high).abs().maxCoeff() < 5.1e-7);
    EXPECT_TRUE((r.low - s.low).abs().maxCoeff() < 5.1e-7);
    EXPECT_TRUE((r.close - s.close).abs().maxCoeff() < 5.1e-7);

    // Writing what was read back produces the identical file.
    const std::string again = write_file("roundtrip2.csv", "");
    write_csv(r, again);
    EXPECT_EQ(read_file(path), read_file(again));
}

TEST(Candles, LoadRejectsMissingAndEmptyAndBadHeader) {
    EXPECT_THROW(load_csv("/nonexistent/nope.csv", "X"), MissingFile);

    const std::string empty = write_file("empty.csv", "");
    EXPECT_THROW(load_csv(empty, "X"), MalformedRow);

    const std::string bad = write_file("badheader.csv", "time,open,high,low,close\n");
    try {
        load_csv(bad, "X");
        FAIL() << "expected MalformedRow";
    } catch (const MalformedRow& e) {
        EXPECT_EQ(e.line(), 1);
    }
}

TEST(Candles, LoadRejectsMalformedRowsWithLineNumbers) {
    const std::string four_fields =
        write_file("fourfields.csv", std::string(kHeader) + "100,1.0,1.1,0.9\n");
    try {
        load_csv(four_fields, "X");
        FAIL() << "expected MalformedRow";
    } catch (const MalformedRow& e) {
        EXPECT_EQ(e.line(), 2);
    }

    const std::string bad_number = write_file(
        "badnumber.csv", std::string(kHeader) + "100,1.0,1.1,0.9,1.0\n400,1.0,1.1,0.9,oops\n");
    try {
        load_csv(bad_number, "X");
        FAIL() << "expected MalformedRow";
    } catch (const MalformedRow& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_NE(std::string(e.what()).find("close"), std::string::npos);
    }
}

TEST(Candles, LoadRejectsCandleInvariantViolations) {
    // low above the body
    const std::string low_bad =
        write_file("lowbad.csv", std::string(kHeader) + "100,1.0,1.1,1.05,1.0\n");
    try {
        load_csv(low_bad, "X");
        FAIL() << "expected InvariantViolation";
    } catch (const InvariantViolation& e) {
        EXPECT_EQ(e.line(), 2);
    }

    // high below the body
    const std::string high_bad =
        write_file("highbad.csv", std::string(kHeader) + "100,1.0,0.99,0.9,1.0\n");
    EXPECT_THROW(load_csv(high_bad, "X"), InvariantViolation);

    // non-positive price
    const std::string nonpos =
        write_file("nonpos.csv", std::string(kHeader) + "100,1.0,1.1,-0.9,1.0\n");
    EXPECT_THROW(load_csv(nonpos, "X"), InvariantViolation);
}

TEST(Candles, LoadRejectsNonIncreasingTimestamps) {
    const std::string dup = write_file(
        "dup.csv",
        std::string(kHeader) + "100,1.0,1.1,0.9,1.0\n100,1.0,1.1,0.9,1.0\n");
    try {
        load_csv(dup, "X");
        FAIL() << "expected NonMonotonicTimestamp";
    } catch (const NonMonotonicTimestamp& e) {
        EXPECT_EQ(e.line(), 3);
    }

    const std::string back = write_file(
        "back.csv", std::string(kHeader) + "400,1.0,1.1,0.9,1.0\n100,1.0,1.1,0.9,1.0\n");
    EXPECT_THROW(load_csv(back, "X"), NonMonotonicTimestamp);
}

TEST(Candles, LoadToleratesSessionGapsButNotIrregularSpacing) {
    // 300s bars with a two-day weekend hole: fine.
    const std::string gapped = write_file("gap.csv", std::string(kHeader) +
                                                         "300,1.0,1.1,0.9,1.0\n"
                                                         "600,1.0,1.1,0.9,1.0\n"
                                                         "900,1.0,1.1,0.9,1.0\n"
                                                         "173700,1.0,1.1,0.9,1.0\n"
                                                         "174000,1.0,1.1,0.9,1.0\n");
    const CandleSeries s = load_csv(gapped, "X");
    EXPECT_EQ(s.size(), 5);
    EXPECT_EQ(s.bar_interval, 300);

    // A 450s step is neither the interval nor a tolerable gap.
    const std::string skew = write_file("skew.csv", std::string(kHeader) +
                                                        "300,1.0,1.1,0.9,1.0\n"
                                                        "600,1.0,1.1,0.9,1.0\n"
                                                        "1050,1.0,1.1,0.9,1.0\n");
    try {
        load_csv(skew, "X");
        FAIL() << "expected InvariantViolation";
    } catch (const InvariantViolation& e) {
        EXPECT_EQ(e.line(), 4);
        EXPECT_NE(std::string(e.what()).find("spacing"), std::string::npos);
    }
}

TEST(Candles, LoadHonorsExplicitBarInterval) {
    // Spaced 600s: self-consistent when inferred, but a violation against a
    // declared 300s interval (600 is within the 2x gap threshold).
    const std::string path = write_file("explicit.csv", std::string(kHeader) +
                                                            "600,1.0,1.1,0.9,1.0\n"
                                                            "1200,1.0,1.1,0.9,1.0\n"
                                                            "1800,1.0,1.1,0.9,1.0\n");
    EXPECT_EQ(load_csv(path, "X").bar_interval, 600);
    EXPECT_THROW(load_csv(path, "X", 300), InvariantViolation);
}

TEST(Candles, ScanCountsProblemsInsteadOfThrowing) {
    const std::string messy = write_file("messy.csv", std::string(kHeader) +
                                                          "300,1.0,1.1,0.9,1.0\n"
                                                          "600,1.0,1.1,0.9,1.0\n"
                                                          "900,1.0,1.1,0.9\n"          // malformed
                                                          "900,1.0,1.1,1.05,1.0\n"     // invariant
                                                          "900,1.0,1.1,0.9,1.0\n"
                                                          "600,1.0,1.1,0.9,1.0\n"      // backwards
                                                          "1350,1.0,1.1,0.9,1.0\n"     // 450s step
                                                          "87000,1.0,1.1,0.9,1.0\n");  // session gap
    const ScanReport rep = scan_csv(messy);
    EXPECT_EQ(rep.rows, 8);
    EXPECT_EQ(rep.bars, 5);
    EXPECT_EQ(rep.malformed, 1);
    EXPECT_EQ(rep.invariant_violations, 1);
    EXPECT_EQ(rep.non_monotonic, 1);
    EXPECT_EQ(rep.inferred_interval, 300);
    EXPECT_EQ(rep.spacing_violations, 1);
    EXPECT_EQ(rep.session_gaps, 1);
    EXPECT_FALSE(rep.clean());
    EXPECT_FALSE(rep.issues.empty());
    EXPECT_LE(rep.issues.size(), 10u);
}

TEST(Candles, ScanAcceptsCleanFile) {
    const CandleSeries s = synthesize(11, 200, Regime::RandomWalk);
    const std::string path = write_file("clean.csv", "");
    write_csv(s, path);
    const ScanReport rep = scan_csv(path);
    EXPECT_TRUE(rep.clean());
    EXPECT_EQ(rep.rows, 200);
    EXPECT_EQ(rep.bars, 200);
    EXPECT_EQ(rep.inferred_interval, 300);
    EXPECT_EQ(rep.session_gaps, 0);
    EXPECT_TRUE(rep.issues.empty());
}

TEST(Candles, SplitIsChronologicalWithFloorSizing) {
    const CandleSeries s = synthesize(3, 10, Regime::RandomWalk);

    const auto [train5, test5] = split(s, SplitSpec{0.5});
    EXPECT_EQ(train5.size(), 5);
    EXPECT_EQ(test5.size(), 5);
    EXPECT_TRUE((train5.close == s.close.segment(0, 5)).all());
    EXPECT_TRUE((test5.close == s.close.segment(5, 5)).all());
    EXPECT_LT(train5.timestamp[4], test5.timestamp[0]);
    EXPECT_EQ(train5.pair, s.pair);
    EXPECT_EQ(test5.bar_interval, s.bar_interval);

    const CandleSeries s11 = synthesize(3, 11, Regime::RandomWalk);
    const auto [train, test] = split(s11, SplitSpec{0.5});
    EXPECT_EQ(train.size(), 5);  // floor(0.5 * 11)
    EXPECT_EQ(test.size(), 6);

    const auto [train9, test1] = split(s, SplitSpec{0.9});
    EXPECT_EQ(train9.size(), 9);
    EXPECT_EQ(test1.size(), 1);

    CandleSeries one = synthesize(3, 1, Regime::RandomWalk);
    EXPECT_THROW(split(one, SplitSpec{0.5}), SeriesTooShort);
}

TEST(Candles, SynthesizeIsSeedDeterministic) {
    const CandleSeries a = synthesize(42, 500, Regime::TrendUp);
    const CandleSeries b = synthesize(42, 500, Regime::TrendUp);
    EXPECT_TRUE((a.close == b.close).all());
    EXPECT_TRUE((a.high == b.high).all());
    EXPECT_TRUE((a.low == b.low).all());

    const CandleSeries c = synthesize(43, 500, Regime::TrendUp);
    EXPECT_FALSE((a.close == c.close).all());
}

TEST(Candles, SynthesizeBarsAreWellFormed) {
    const CandleSeries s = synthesize(9, 2000, Regime::RandomWalk);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        ASSERT_TRUE(s.bar(i).valid()) << "bar " << i;
        if (i > 0) {
            ASSERT_EQ(s.timestamp[i] - s.timestamp[i - 1], s.bar_interval);
            ASSERT_EQ(s.open[i], s.close[i - 1]);
        }
    }
}

TEST(Candles, SynthesizeRegimesPointTheRightWay) {
    const Eigen::Index n = 10000;
    const CandleSeries up = synthesize(5, n, Regime::TrendUp);
    const CandleSeries down = synthesize(5, n, Regime::TrendDown);
    const double up_total = std::log(up.close[n - 1] / up.close[0]);
    const double down_total = std::log(down.close[n - 1] / down.close[0]);
    // drift 4e-4 over 1e4 bars dwarfs the noise (sd ~ 0.12 vs mean 4).
    EXPECT_GT(up_total, 1.0);
    EXPECT_LT(down_total, -1.0);

    const CandleSeries rev = synthesize(5, n, Regime::MeanRevert);
    const double anchor = std::log(1.2);
    EXPECT_LT((rev.close.log() - anchor).abs().maxCoeff(), 0.2);

    EXPECT_THROW(synthesize(5, 0, Regime::TrendUp), SeriesTooShort);
}
