#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <racecurve/csv.hpp>
#include <racecurve/dataset_io.hpp>
#include <racecurve/errors.hpp>
#include <racecurve/normal.hpp>
#include <racecurve/types.hpp>

using namespace racecurve;

TEST_CASE("normal quantile")
{
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    CHECK(normal_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-14));
    CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-12));
    CHECK(two_sided_z(0.95) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    for (int i = 1; i < 1000; ++i) {
        const double p = i / 1000.0;
        CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) < 1e-9);
        CHECK(normal_quantile(1.0 - p) == doctest::Approx(-normal_quantile(p)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(two_sided_z(1.0), DomainError);
}

TEST_CASE("csv helpers")
{
    CHECK(csv::split(" a, b ,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(csv::split("a,,") == std::vector<std::string>{"a", "", ""});
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(gen) / (1 + i);
        CHECK(csv::parse_double(csv::format_double(x), "t", 1) == x);
    }
    CHECK_THROWS_AS(csv::parse_double("1.5x", "t", 4), ParseError);
    CHECK_THROWS_AS(csv::parse_double("nan", "t", 4), ParseError);
    CHECK(csv::parse_uint("18446744073709551615", "t", 1) == std::numeric_limits<std::uint64_t>::max());
    CHECK_THROWS_AS(csv::parse_uint("-1", "t", 1), ParseError);

    std::istringstream in("# comment\n\nfirst\r\n  \nsecond\n");
    std::string line;
    std::size_t n = 0;
    REQUIRE(csv::next_record(in, line, n));
    CHECK(line == "first");
    CHECK(n == 3);
    REQUIRE(csv::next_record(in, line, n));
    CHECK(line == "second");
    CHECK(n == 5);
    CHECK_FALSE(csv::next_record(in, line, n));
}

TEST_CASE("dataset files")
{
    std::istringstream in("xi,y\n0.1,1\n0.5,0\n# note\n0.1,0\n");
    const auto d = read_dataset(in);
    CHECK(d.size() == 3);
    CHECK_FALSE(d.has_blocks());
    const auto t = d.levels();
    REQUIRE(t.size() == 2);
    CHECK(t[0].xi == 0.1);
    CHECK(t[0].n == 2);
    CHECK(t[0].responses == 1);

    std::istringstream blocked("xi,y,block\n0.2,1,black\n0.8,0,white\n0.5,1,black\n");
    const auto b = read_dataset(blocked);
    CHECK(b.has_blocks());
    CHECK(b.block_subset("black").size() == 2);
    CHECK(b.block_subset("white").size() == 1);

    std::stringstream round;
    write_dataset(round, b);
    const auto again = read_dataset(round);
    REQUIRE(again.size() == b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        CHECK(again.observations()[i].xi.value() == b.observations()[i].xi.value());
        CHECK(again.observations()[i].y == b.observations()[i].y);
        CHECK(again.blocks()[i] == b.blocks()[i]);
    }

    const auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream s(text);
        try {
            read_dataset(s, "d.csv");
        } catch (const ParseError& e) {
            return e.line;
        }
        return 0;
    };
    CHECK(line_of("xi,y\n0.1,1\n0.2,2\n") == 3);
    CHECK(line_of("xi,y\n0.1,1\n1.0,1\n") == 3);
    CHECK(line_of("xi,y\n0.1,1\n\nabc,1\n") == 4);
    CHECK(line_of("x,y\n0.1,1\n") == 1);
    CHECK(line_of("xi,y\n0.1\n") == 2);
}

TEST_CASE("domain types")
{
    CHECK_THROWS_AS(CurveParams({0.0, 0.5, 1.0}).validate(), DomainError);
    CHECK_THROWS_AS(CurveParams({0.5, 1.0, 1.0}).validate(), DomainError);
    CHECK_THROWS_AS(CurveParams({0.5, 0.4, 0.0}).validate(), DomainError);
    CHECK(CurveParams({0.2, 0.4, 1.0}).direction() == Direction::Increasing);
    CHECK(parse_direction("decreasing") == Direction::Decreasing);
    CHECK(to_string(Direction::Flat) == "flat");
    CHECK_THROWS(parse_direction("up"));
    WorkingParams w{0.5, 1.0, 1.0, Direction::Increasing, 0.5};
    CHECK_THROWS_AS(w.validate(), DomainError);
    Dataset d;
    CHECK_THROWS_AS(d.add(0.5, 2), DomainError);
    CHECK_THROWS_AS(d.add(0.0, 1), DomainError);
}
