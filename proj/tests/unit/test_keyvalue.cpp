#include <doctest.h>

#include <cmath>
#include <random>

#include "ofdmsync/keyvalue.hpp"

using namespace ofdmsync;

TEST_CASE("key-value parsing") {
    const auto kv = KeyValueMap::parse("# comment\n a = 1 \n\nb=2.5 # trailing\nlist = 1, 2 ,3\nflag = yes\n");
    CHECK(kv.get_int("a") == 1);
    CHECK(kv.get_double("b") == 2.5);
    CHECK(*kv.get_int_list("list") == std::vector<long long>{1, 2, 3});
    CHECK(kv.get_bool("flag") == true);
    CHECK_FALSE(kv.get("missing").has_value());
    CHECK(std::isinf(*KeyValueMap::parse("x = inf").get_double("x")));
}

TEST_CASE("malformed entries name the offending key") {
    try {
        KeyValueMap::parse("good = 1\nbad_value = abc\n").get_int("bad_value");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "bad_value");
    }
    try {
        KeyValueMap::parse("no_equals_here\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "no_equals_here");
    }
    try {
        KeyValueMap::parse("typo_key = 1\n").require_known({"known"});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "typo_key");
        CHECK(std::string(e.what()).find("typo_key") != std::string::npos);
    }
}

TEST_CASE("format_double round-trips arbitrary doubles") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
    CHECK(format_double(0.25) == "0.25");
}
