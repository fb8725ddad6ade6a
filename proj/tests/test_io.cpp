#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"

#include "fluxq/flux_map.hpp"

using namespace fluxq;

namespace {

FluxMap random_map(std::mt19937& gen) {
    std::uniform_int_distribution<int> count(2, 9);
    std::uniform_real_distribution<double> val(-10.0, 10.0);
    FluxMap m;
    m.x = {"phi_t", val(gen), val(gen), count(gen)};
    m.y = {"phi_b", val(gen), val(gen), count(gen)};
    m.values.resize(std::size_t(m.x.count) * m.y.count);
    for (auto& v : m.values)
        v = (gen() % 7 == 0) ? std::numeric_limits<double>::quiet_NaN() : val(gen);
    m.metadata["quantity"] = "test";
    m.metadata["seed"] = "1";
    return m;
}

bool same(const FluxMap& a, const FluxMap& b) {
    if (a.x.count != b.x.count || a.y.count != b.y.count) return false;
    if (a.x.start != b.x.start || a.y.stop != b.y.stop) return false;
    if (a.metadata != b.metadata) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (std::isnan(a.values[i]) != std::isnan(b.values[i])) return false;
        if (!std::isnan(a.values[i]) && a.values[i] != b.values[i]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("axis parsing") {
    const auto ax = Axis::parse("phi_t", "-0.5:0.5:101");
    CHECK(ax.start == -0.5);
    CHECK(ax.stop == 0.5);
    CHECK(ax.count == 101);
    CHECK(ax.at(0) == -0.5);
    CHECK(ax.at(100) == 0.5);
    CHECK(ax.at(50) == doctest::Approx(0.0));
    CHECK_THROWS_AS(Axis::parse("a", "1:2"), std::invalid_argument);
    CHECK_THROWS_AS(Axis::parse("a", "1;2;3"), std::invalid_argument);
    CHECK_THROWS_AS(Axis::parse("a", "0:1:1"), std::invalid_argument);  // count < 2
}

TEST_CASE("CSV and JSON round trips preserve values bit-exactly") {
    std::mt19937 gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_map(gen);
        CHECK(same(m, FluxMap::from_csv(m.to_csv())));
        CHECK(same(m, FluxMap::from_json(m.to_json())));
    }
}

TEST_CASE("CSV layout: header plus one row per cell, row-major") {
    FluxMap m;
    m.x = {"a", 0.0, 1.0, 2};
    m.y = {"b", 0.0, 1.0, 3};
    m.values = {1, 2, 3, 4, 5, 6};
    const auto csv = m.to_csv();
    CHECK(csv.find("# axis_x,a,0,1,2") == 0);
    CHECK(csv.find("a,b,value") != std::string::npos);
    // first data row is (x0, y0, v0)
    CHECK(csv.find("\n0,0,1\n") != std::string::npos);
    CHECK(csv.find("\n1,1,6\n") != std::string::npos);
}

TEST_CASE("corrupt inputs are rejected") {
    CHECK_THROWS(FluxMap::from_csv("x,y,value\n1,2,3\n"));  // no axis headers
    FluxMap m;
    m.x = {"a", 0.0, 1.0, 2};
    m.y = {"b", 0.0, 1.0, 2};
    m.values = {1, 2, 3, 4};
    auto truncated = m.to_json();
    truncated.replace(truncated.find("\"count\": 2"), 10, "\"count\": 3");
    CHECK_THROWS(FluxMap::from_json(truncated));
}

TEST_CASE("SVG heatmap contains one rect per cell") {
    FluxMap m;
    m.x = {"a", 0.0, 1.0, 3};
    m.y = {"b", 0.0, 1.0, 4};
    m.values.assign(12, 0.5);
    m.values[5] = std::numeric_limits<double>::quiet_NaN();
    const auto svg = m.to_svg(true, true);
    std::size_t rects = 0, pos = 0;
    while ((pos = svg.find("<rect", pos)) != std::string::npos) { ++rects; ++pos; }
    CHECK(rects == 12);
    CHECK(svg.find("rgb(255,0,255)") != std::string::npos);  // sentinel color
}
