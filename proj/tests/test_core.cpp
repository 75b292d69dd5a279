#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "hn/csv.hpp"
#include "hn/text.hpp"
#include "support.hpp"

using namespace hn;
using namespace hn::test;

TEST_CASE("coerce_number") {
    CHECK(std::get<double>(coerce_number(Value())) == 0);
    CHECK(std::get<double>(coerce_number(Value(true))) == 1);
    CHECK(std::get<double>(coerce_number(Value(false))) == 0);
    CHECK(std::get<double>(coerce_number(Value("3.5"))) == 3.5);
    CHECK(std::get<double>(coerce_number(Value(" 1e3 "))) == 1000);
    CHECK(std::get<double>(coerce_number(Value("50%"))) == 0.5);
    CHECK(std::get<ErrorKind>(coerce_number(Value("abc"))) == ErrorKind::Value);
    CHECK(std::get<ErrorKind>(coerce_number(Value(""))) == ErrorKind::Value);
    CHECK(std::get<ErrorKind>(coerce_number(Value(ErrorKind::NA))) == ErrorKind::NA);
}

TEST_CASE("coerce_boolean") {
    CHECK_FALSE(std::get<bool>(coerce_boolean(Value(0.0))));
    CHECK(std::get<bool>(coerce_boolean(Value(-2.5))));
    CHECK(std::get<bool>(coerce_boolean(Value("TRUE"))));
    CHECK_FALSE(std::get<bool>(coerce_boolean(Value("false"))));
    CHECK_FALSE(std::get<bool>(coerce_boolean(Value())));
    CHECK(std::get<ErrorKind>(coerce_boolean(Value("yes"))) == ErrorKind::Value);
    CHECK(std::get<ErrorKind>(coerce_boolean(Value(ErrorKind::NA))) == ErrorKind::NA);
}

TEST_CASE("errors pass through every coercion") {
    for (auto k : {ErrorKind::Div0, ErrorKind::Value, ErrorKind::Ref, ErrorKind::Name, ErrorKind::Num, ErrorKind::NA,
                   ErrorKind::Circ}) {
        CHECK(std::get<ErrorKind>(coerce_number(Value(k))) == k);
        CHECK(std::get<ErrorKind>(coerce_boolean(Value(k))) == k);
        CHECK(std::get<ErrorKind>(coerce_text(Value(k))) == k);
        CHECK(parse_error_kind(to_string(k)) == k);
    }
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3) == "0.3333333333333333");
    CHECK(format_number(100) == "100");
    CHECK(format_number(-2.5) == "-2.5");
    CHECK(number_to_text(1.0 / 3) == "0.333333333333333");
    CHECK(number_to_text(1e20) == "1E+20");
    CHECK(number_to_text(0.1 + 0.2) == "0.3");
    CHECK(checked_number(std::nan("")).error() == ErrorKind::Num);
    CHECK(checked_number(1.0 / 0.0).error() == ErrorKind::Num);

    Gen g(7);
    for (int i = 0; i < 2000; ++i) {
        double d = g.real(-1e6, 1e6) * std::pow(10.0, g.range(-20, 20));
        CHECK(std::strtod(format_number(d).c_str(), nullptr) == d);
    }
}

TEST_CASE("identical distinguishes signed zero") {
    CHECK(identical(Value(1.0), Value(1.0)));
    CHECK_FALSE(identical(Value(0.0), Value(-0.0)));
    CHECK_FALSE(identical(Value("1"), Value(1.0)));
}

TEST_CASE("canonicalize_path examples") {
    CHECK(canonicalize_path("/Accounts/2011/Invoices/", P("/x/")).str() == "/accounts/2011/invoices/");
    CHECK(canonicalize_path("../a4-page/", P("/some/page/")).str() == "/some/a4-page/");
    CHECK(canonicalize_path("./x/", Path()).str() == "/x/");
    CHECK(canonicalize_path("/", P("/a/")).str() == "/");
    CHECK_THROWS_AS(canonicalize_path("../", Path()), PathError);
    CHECK_THROWS_AS(canonicalize_path("/a b/", Path()), PathError);
    CHECK_THROWS_AS(canonicalize_path("/a.b/", Path()), PathError);
    CHECK_THROWS_AS(canonicalize_path("/a//b/", Path()), PathError);
}

TEST_CASE("canonicalization is idempotent and round-trips") {
    Gen g(11);
    for (int i = 0; i < 1000; ++i) {
        std::string raw = "/";
        int n = g.range(0, 6);
        for (int k = 0; k < n; ++k) {
            std::string s = g.segment();
            if (g.coin(0.3)) s[0] = static_cast<char>(std::toupper(s[0]));
            raw += s + "/";
        }
        if (g.coin(0.3)) raw.pop_back();
        if (raw.empty()) raw = "/";
        Path once = canonicalize_path(raw, Path());
        Path twice = canonicalize_path(once.str(), P("/elsewhere/"));
        CHECK(once == twice);
        CHECK(Path::parse(once.str()) == once);
        CHECK(once.str() == to_lower(once.str()));
    }
}

TEST_CASE("path structure") {
    Path p = P("/a/b/c/");
    CHECK(p.depth() == 3);
    CHECK(p.parent().str() == "/a/b/");
    CHECK(p.prefix(1).str() == "/a/");
    CHECK(p.starts_with(P("/a/")));
    CHECK_FALSE(P("/ab/").starts_with(P("/a/")));
    CHECK(Path().child("x").str() == "/x/");
    CHECK_THROWS_AS(Path().parent(), PathError);
}

TEST_CASE("a1 references") {
    CHECK(to_a1({1, 1}) == "a1");
    CHECK(to_a1({27, 10}) == "aa10");
    CHECK(column_name(16384) == "xfd");
    CHECK(parse_a1("B7") == CellAddr{2, 7});
    CHECK_FALSE(parse_a1("7B"));
    CHECK_FALSE(parse_a1("a0"));
    Gen g(3);
    for (int i = 0; i < 2000; ++i) {
        CellAddr a{g.range(1, kMaxCol), g.range(1, kMaxRow)};
        CHECK(parse_a1(to_a1(a)) == a);
        CHECK(column_index(column_name(a.col)) == a.col);
    }
}

TEST_CASE("text helpers") {
    CHECK(iequals("AbC", "aBc"));
    CHECK(icompare("apple", "Banana") < 0);
    CHECK(wildcard_match("a*c", "abbbc"));
    CHECK(wildcard_match("a?c", "abc"));
    CHECK_FALSE(wildcard_match("a?c", "abbc"));
    CHECK(wildcard_match("a~*", "a*"));
    CHECK(valid_utf8("h\xc3\xa9llo"));
    CHECK_FALSE(valid_utf8("\xff"));
    CHECK(utf8_encode(utf8_decode("\xe2\x82\xac")) == "\xe2\x82\xac");
}

TEST_CASE("csv round trip") {
    CsvRows rows = {{"1", "a,b"}, {"say \"hi\"", ""}, {"line\nbreak", "x"}};
    std::string text = write_csv(rows);
    CHECK(text == "1,\"a,b\"\r\n\"say \"\"hi\"\"\",\r\n\"line\nbreak\",x\r\n");
    CHECK(parse_csv(text) == rows);
    CHECK(parse_csv("a,b\nc,d\n") == CsvRows{{"a", "b"}, {"c", "d"}});
    CHECK(parse_csv("a,b") == CsvRows{{"a", "b"}});
    CHECK_THROWS_AS(parse_csv("\"open"), ValidationError);

    Gen g(5);
    const std::vector<std::string> atoms = {"a", ",", "\"", "\r\n", "x y", "7", "\xc3\xa9"};
    for (int i = 0; i < 300; ++i) {
        CsvRows r(static_cast<std::size_t>(g.range(1, 4)));
        std::size_t width = static_cast<std::size_t>(g.range(1, 4));
        for (auto& row : r) {
            row.resize(width);
            for (auto& f : row) {
                int n = g.range(0, 3);
                for (int k = 0; k < n; ++k) f += g.pick(atoms);
            }
        }
        if (width == 1 && r.back()[0].empty()) r.back()[0] = "z";
        CHECK(parse_csv(write_csv(r)) == r);
    }
}
