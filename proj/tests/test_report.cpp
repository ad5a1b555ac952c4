#include <doctest.h>

#include <cmath>
#include <limits>

#include "perihyp/identities.hpp"
#include "perihyp/report_io.hpp"

using namespace perihyp;

TEST_CASE("JSON numbers carry 17 significant digits and non-finite values become null") {
    Json j;
    j["third"] = 1.0 / 3.0;
    j["inf"] = std::numeric_limits<double>::infinity();
    j["n"] = 3;
    j["list"] = std::vector<double>{0.1, 2.5};
    j["empty"] = Json::array();
    const auto text = dump_json(j);
    CHECK(text.find("\"third\": 0.33333333333333331") != std::string::npos);
    CHECK(text.find("\"inf\": null") != std::string::npos);
    CHECK(text.find("\"n\": 3") != std::string::npos);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    CHECK(text.find("\"empty\": []") != std::string::npos);
    // Keys stay in insertion order and the text parses back.
    CHECK(text.find("third") < text.find("inf"));
    const auto back = Json::parse(text);
    CHECK(back["third"].get<double>() == 1.0 / 3.0);
    CHECK(dump_json(j) == text);
}

TEST_CASE("problem round trip through JSON") {
    const Problem p = FirstOrderProblem::from_strings("1 + x", "-1", "u1*u2", "sin(x)", 0.25, -0.5);
    const auto j = to_json(p);
    const auto q = parse_problem_json(dump_json(j));
    CHECK(to_json(q) == j);
    const Problem s = SecondOrderProblem::from_strings("2", "-ut");
    CHECK(to_json(parse_problem_json(dump_json(to_json(s)))) == to_json(s));
}

TEST_CASE("identity battery on coarse grids") {
    const auto p = identity_battery_problem();
    const auto a = worst_identity_defects(p, TimeGrid(16), SpaceGrid(25), 0, 2);
    const auto b = worst_identity_defects(p, TimeGrid(32), SpaceGrid(50), 0, 2);
    const auto va = a.values(), vb = b.values();
    for (std::size_t n = 0; n + 1 < va.size(); ++n) CHECK(va[n] / vb[n] >= 8.0);
    CHECK(a.factorization < 1e-10);
    CHECK(IdentityDefects::names().size() == va.size());
}
