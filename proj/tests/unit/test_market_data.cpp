#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "otdro/error.hpp"
#include "otdro/market_data.hpp"
#include "otdro/synthetic.hpp"

using namespace otdro;
using otdro::testing::hour;

namespace {

std::string market_csv(const std::string& rows) { return std::string(kMarketHeader) + "\n" + rows; }

std::string error_of(const std::string& text) {
    std::istringstream in(text);
    try {
        read_market_csv(in, "m.csv");
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(MarketCsv, ThreeRowsSortedByTime) {
    std::istringstream in(market_csv("2017-01-01T02:00:00Z,3,30,20,50\n"
                                     "2017-01-01T00:00:00Z,1,30,20,50\n"
                                     "2017-01-01T01:00:00Z,2,30,20,50\n"));
    const auto out = read_market_csv(in);
    ASSERT_EQ(out.rows.size(), 3u);
    EXPECT_EQ(out.rows[0].g, 1.0);
    EXPECT_EQ(out.rows[1].g, 2.0);
    EXPECT_EQ(out.rows[2].g, 3.0);
    EXPECT_EQ(out.rows[2].time, hour("2017-01-01T02:00:00Z"));
}

TEST(MarketCsv, DuplicateHourNamesTimestamp) {
    const auto msg = error_of(market_csv("2017-01-01T00:00:00Z,1,30,20,50\n2017-01-01T00:00:00Z,1,30,20,50\n"));
    EXPECT_NE(msg.find("duplicate timestamp 2017-01-01T00:00:00Z"), std::string::npos) << msg;
}

TEST(MarketCsv, DstDoubleHourIsDistinctAfterUtcNormalization) {
    std::istringstream in(market_csv("2017-10-29T03:00:00+03:00,1,30,20,50\n2017-10-29T03:00:00+02:00,2,30,20,50\n"));
    const auto out = read_market_csv(in);
    ASSERT_EQ(out.rows.size(), 2u);
    EXPECT_EQ(out.rows[1].time - out.rows[0].time, kHour);
}

TEST(MarketCsv, NanSpotNamesLineAndColumn) {
    const auto msg = error_of(market_csv("2017-01-01T00:00:00Z,1,30,20,50\n2017-01-01T01:00:00Z,1,NaN,20,50\n"));
    EXPECT_NE(msg.find("m.csv:3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("spot_eur_mwh"), std::string::npos) << msg;
}

TEST(MarketCsv, RejectsBadInput) {
    EXPECT_NE(error_of("time,g,s\n"), "");
    EXPECT_NE(error_of(market_csv("2017-01-01T00:00:00Z,1,30,20\n")).find("expected 5 columns"), std::string::npos);
    EXPECT_NE(error_of(market_csv("2017-01-01T00:00:00Z,-1,30,20,50\n")).find("negative generation"), std::string::npos);
    EXPECT_NE(error_of(market_csv("2017-01-01T00:00:00Z,1,30,20,50\n2017-01-01T02:00:00Z,1,30,20,50\n"))
                  .find("missing hours"),
              std::string::npos);
    EXPECT_NE(error_of(market_csv("2017-01-01T00:30:00Z,1,30,20,50\n")).find("whole hour"), std::string::npos);
    EXPECT_NE(error_of(""), "");
}

TEST(MarketCsv, ToleratesCrlfAndBom) {
    std::istringstream in("\xEF\xBB\xBF" + std::string(kMarketHeader) + "\r\n2017-01-01T00:00:00Z,1,30,20,50\r\n");
    EXPECT_EQ(read_market_csv(in).rows.size(), 1u);
}

TEST(ForecastCsv, MeanOfEnsemble) {
    std::istringstream in(forecast_header(3) + "\n2017-01-01T00:00:00Z,8,10,12\n");
    const auto out = read_forecast_csv(in, 3);
    ASSERT_EQ(out.rows.size(), 1u);
    EXPECT_EQ(out.rows[0].f_mean, 10.0);
    EXPECT_EQ(forecast_header(3), "time,ens_001,ens_002,ens_003");
}

TEST(ForecastCsv, WrongColumnCount) {
    std::string row = "2017-01-01T00:00:00Z";
    for (int k = 0; k < 51; ++k) row += ",1";
    std::istringstream in(forecast_header(51) + "\n" + row + "\n");
    EXPECT_THROW(read_forecast_csv(in, 52), DataError);
    std::istringstream in2(forecast_header(52) + "\n" + row + "\n");
    EXPECT_THROW(read_forecast_csv(in2, 52), DataError);
}

TEST(ForecastCsv, NegativeForecastRejected) {
    std::istringstream in(forecast_header(2) + "\n2017-01-01T00:00:00Z,1,-0.5\n");
    EXPECT_THROW(read_forecast_csv(in, 2), DataError);
}

TEST(ForecastCsv, EmptyFileWarns) {
    std::istringstream in("");
    const auto out = read_forecast_csv(in, 52);
    EXPECT_TRUE(out.rows.empty());
    EXPECT_FALSE(out.warnings.empty());
}

TEST(Validate, Examples) {
    const auto t = hour("2017-01-01T00:00:00Z");
    std::vector<MarketRecord> ok{{t, 5, 30, 20, 50}};
    EXPECT_EQ(validate(ok).ordering_violations, 0u);
    std::vector<MarketRecord> bad{{t, 5, 30, 20, 25}};
    EXPECT_EQ(validate(bad).ordering_violations, 1u);

    std::vector<MarketRecord> spikes{{t, 1, 30, 20, 100}, {t + kHour, 1, 30, 20, 250}, {t + 2 * kHour, 1, 30, 20, 600}};
    const auto rep = validate(spikes);
    EXPECT_EQ(rep.up_reg_above, (std::vector<std::size_t>{2, 1, 0, 0}));
    EXPECT_EQ(validate(spikes), rep);  // idempotent

    std::vector<MarketRecord> neg{{t, 1, 30, -5, 50}};
    EXPECT_EQ(validate(neg).negative_down_reg, 1u);
    EXPECT_NE(to_json(rep).find("\"ordering_violations\""), std::string::npos);
}

TEST(RoundTrip, SyntheticDatasetIsBitExact) {
    SyntheticConfig cfg;
    cfg.hours = 500;
    cfg.ensemble_size = 5;
    const Dataset ds = generate_synthetic(cfg, 7);
    std::ostringstream m, f;
    write_market_csv(m, ds.records);
    write_forecast_csv(f, ds.forecasts);
    std::istringstream mi(m.str()), fi(f.str());
    const Dataset back = align(read_market_csv(mi).rows, read_forecast_csv(fi, 5).rows);
    EXPECT_EQ(back, ds);
}

TEST(Align, InnerJoinMustBeContiguous) {
    const auto t = hour("2017-01-01T00:00:00Z");
    std::vector<MarketRecord> rec{{t, 1, 30, 20, 50}, {t + kHour, 1, 30, 20, 50}, {t + 2 * kHour, 1, 30, 20, 50}};
    std::vector<ForecastRecord> fc{{t + kHour, {1.0}, 1.0}, {t + 2 * kHour, {2.0}, 2.0}, {t + 3 * kHour, {3.0}, 3.0}};
    const Dataset ds = align(rec, fc);
    ASSERT_EQ(ds.size(), 2u);
    EXPECT_EQ(ds.records[0].time, t + kHour);
    EXPECT_EQ(ds.forecasts[1].f_mean, 2.0);

    std::vector<ForecastRecord> holes{{t, {1.0}, 1.0}, {t + 2 * kHour, {1.0}, 1.0}};
    EXPECT_THROW(align(rec, holes), DataError);
}
