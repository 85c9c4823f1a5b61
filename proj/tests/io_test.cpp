#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ellvolterra/io.hpp"
#include "test_support.hpp"

using namespace ellvolterra;
using io::json;

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(io::format_double(0.5), "0.5");
    EXPECT_EQ(io::format_double(1.0), "1");
    EXPECT_EQ(io::format_double(0.1), "0.1");
    EXPECT_EQ(io::format_double(1.0 / 3.0), "0.3333333333333333");
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const double x = u(rng);
        EXPECT_EQ(std::stod(io::format_double(x)), x);
    }
}

TEST(OperatorJson, RoundTripIsExact) {
    std::mt19937_64 rng(73);
    for (int t = 0; t < 50; ++t) {
        const std::size_t m = 2 + t % 5;
        const CubicMatrix v = testgen::random_operator(m, static_cast<std::size_t>(t) % (m + 1), rng);
        const std::string text = io::dump(io::operator_to_json(v));
        EXPECT_EQ(io::operator_from_json(io::parse_json_text(text, "test")), v);
    }
}

TEST(OperatorJson, AcceptsWrappedOperator) {
    const CubicMatrix v = m3_operator({0.5, 0.5, 0.75});
    const json wrapped{{"report", 1}, {"operator", io::operator_to_json(v)}};
    EXPECT_EQ(io::operator_from_json(wrapped), v);
}

TEST(OperatorJson, FormatErrors) {
    EXPECT_THROW(io::parse_json_text("{", "x"), io::FormatError);
    EXPECT_THROW(io::operator_array_from_json(json{{"m", 2}}), io::FormatError);
    EXPECT_THROW(io::operator_array_from_json(json{{"m", 2}, {"P", json::array()}}), io::FormatError);
    EXPECT_THROW(io::operator_array_from_json(json{{"m", 1.5}, {"P", json::array()}}), io::FormatError);
    json bad = io::operator_to_json(identity_operator(2));
    bad["P"][0][0][0] = "one";
    EXPECT_THROW(io::operator_array_from_json(bad), io::FormatError);
    json sum = io::operator_to_json(identity_operator(2));
    sum["P"][0][1][0] = 0.6;
    sum["P"][1][0][0] = 0.6;
    EXPECT_THROW(io::operator_from_json(sum), ValidationError);
}

TEST(OrbitCsv, HeaderAndRows) {
    const Orbit o = orbit(identity_operator(3), SimplexPoint{0.25, 0.25, 0.5}, 2);
    std::ostringstream os;
    io::write_orbit_csv(os, o);
    EXPECT_EQ(os.str(), "step,x1,x2,x3\n0,0.25,0.25,0.5\n1,0.25,0.25,0.5\n2,0.25,0.25,0.5\n");
}

TEST(ParsePoint, Basics) {
    EXPECT_EQ(io::parse_point("0.1,0.3,0.6").dim(), 3u);
    EXPECT_EQ(io::parse_point("0.5, 0.5"), (SimplexPoint{0.5, 0.5}));
    EXPECT_THROW(io::parse_point("0.5,x"), io::FormatError);
    EXPECT_THROW(io::parse_point(""), io::FormatError);
    EXPECT_THROW(io::parse_point("0.5,0.6"), SimplexError);
}

TEST(Reports, ClassificationUsesOneBasedIndices) {
    const json j = io::to_json(detect_ell(m3_operator({0.5, 0.5, 0.75})));
    EXPECT_EQ(j.at("ell"), 2);
    EXPECT_EQ(j.at("schema"), io::kSchemaVersion);
    EXPECT_EQ(j.at("volterra_coords"), json::array({1, 2}));
}

TEST(Reports, M3ReportIsDeterministic) {
    const auto a = io::dump(io::to_json(m3_analyze({0.6, 0.3, 0.75})));
    const auto b = io::dump(io::to_json(m3_analyze({0.6, 0.3, 0.75})));
    EXPECT_EQ(a, b);
    const json j = json::parse(a);
    EXPECT_EQ(j.at("schema"), 1);
    EXPECT_TRUE(j.contains("fixed_line"));
}
