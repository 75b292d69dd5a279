#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "hn/persist.hpp"
#include "sessions.hpp"

using namespace hn;
using namespace hn::test;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cell input parsing") {
    CHECK(parse_input("=1+1").formula);
    CHECK(*parse_input("12").literal == Value(12.0));
    CHECK(*parse_input("TRUE").literal == Value(true));
    CHECK(*parse_input("'=x").literal == Value("=x"));
    CHECK(*parse_input("abc").literal == Value("abc"));
    CHECK_FALSE(parse_input("").literal);
    CHECK_THROWS_AS(parse_input("=1+"), ParseError);
    for (const Value& v : {Value(1.5), Value("12"), Value("TRUE"), Value("'q"), Value(false), Value("=a1"), Value("x")})
        CHECK(*parse_input(literal_source(v)).literal == v);
}

TEST_CASE("cells on pages") {
    Workbook wb = make_workbook();
    wb.create_page("system", P("/p/"));
    CHECK_THROWS_AS(wb.set_cells("system", P("/nope/"), {CellWrite{A("a1"), "1", std::nullopt, std::nullopt}}),
                    NotFound);
    CHECK(val(wb, "/p/", "a1").is_blank());
    put(wb, "/p/", "a1", "= 1 + 1");
    CHECK(wb.site().cell(P("/p/"), A("a1"))->source() == "=1+1");
    CHECK(val(wb, "/p/", "a1").number() == 2);
    put(wb, "/p/", "a1", "");
    CHECK(wb.site().cell(P("/p/"), A("a1")) == nullptr);
    CHECK(wb.site().page(P("/p/"))->cells.empty());
}

TEST_CASE("page creation and templates") {
    Workbook wb = make_workbook();
    CHECK(wb.create_page("system", P("/a/")));
    CHECK_FALSE(wb.create_page("system", P("/a/")));
    CHECK_THROWS_AS(wb.create_page("system", P("/b/"), std::string("nosuch")), NotFound);

    put(wb, "/a/", "a1", "5");
    put(wb, "/a/", "a2", "=a1*2");
    CellAttrs attrs;
    attrs.wiki_input = ControlKind::Select;
    attrs.options = {"x", "y"};
    wb.set_cells("system", P("/a/"), {CellWrite{A("b1"), "x", attrs, std::string("0.00")}});
    wb.user_admin("system", {{"op", "groupadd"}, {"group", "clerks"}});
    wb.grant("system", P("/a/"), ViewKind::Wikipage, "clerks");
    wb.save_template("system", P("/a/"), "invoice");
    CHECK_THROWS_AS(wb.save_template("system", P("/none/"), "x"), NotFound);

    wb.create_page("system", P("/accounts/2011/invoices/inv00000001/"), std::string("invoice"));
    const Page* made = wb.site().page(P("/accounts/2011/invoices/inv00000001/"));
    const Page* orig = wb.site().page(P("/a/"));
    REQUIRE(made);
    CHECK(made->template_origin == "invoice");
    CHECK(made->cells.size() == orig->cells.size());
    for (const auto& [addr, cell] : orig->cells) {
        const Cell* c = made->find(addr);
        REQUIRE(c);
        CHECK(c->source() == cell.source());
        CHECK(c->attrs == cell.attrs);
        CHECK(c->format == cell.format);
        CHECK(identical(c->cached, cell.cached));
    }
    CHECK(wb.site().grants.at(P("/accounts/2011/invoices/inv00000001/")).at(ViewKind::Wikipage).contains("clerks"));
    CHECK_THROWS_AS(wb.create_page("system", P("/accounts/2011/invoices/inv00000001/"), std::string("invoice")),
                    AlreadyExists);

    // Instantiate then save gives an equal template.
    Template before = wb.site().templates.at("invoice");
    wb.save_template("system", P("/accounts/2011/invoices/inv00000001/"), "copy");
    const Template& after = wb.site().templates.at("copy");
    CHECK(after.cells.size() == before.cells.size());
    for (const auto& [addr, cell] : before.cells) CHECK(after.cells.at(addr).source() == cell.source());
    CHECK(after.perms == before.perms);
    CHECK(wb.site().templates.at("invoice").cells.size() == before.cells.size());
}

TEST_CASE("path spec expansion") {
    Workbook wb = make_workbook();
    wb.create_page("system", P("/t/"));
    wb.save_template("system", P("/t/"), "day_sheet");
    wb.save_template("system", P("/t/"), "invoice");
    PathSpec spec = parse_path_spec("/some/page/[blank, date, yyyy]/[blank, date, mm]/[day_sheet, date, dddd]/");
    Expansion e = expand_path_spec(spec, Path(), wb.site(), kApril21);
    std::vector<std::pair<Path, std::string>> expect = {
        {P("/some/page/2011/"), "blank"}, {P("/some/page/2011/apr/"), "blank"}, {P("/some/page/2011/apr/21/"), "day_sheet"}};
    CHECK(e.to_create == expect);
    CHECK(e.redirect.str() == "/some/page/2011/apr/21/");

    wb.create_page("system", P("/some/page/2011/"));
    Expansion skip = expand_path_spec(spec, Path(), wb.site(), kApril21);
    CHECK(skip.to_create.size() == 2);

    Expansion lit = expand_path_spec(parse_path_spec("/just/here/"), Path(), wb.site(), kApril21);
    CHECK(lit.to_create.empty());
    CHECK(lit.redirect.str() == "/just/here/");

    Expansion inc =
        expand_path_spec(parse_path_spec("./[invoice, incr, inv]/"), P("/accounts/2011/invoices/"), wb.site(), kApril21);
    REQUIRE(inc.to_create.size() == 1);
    CHECK(inc.to_create[0].first.str() == "/accounts/2011/invoices/inv00000001/");
    CHECK(inc.to_create[0].second == "invoice");

    CHECK_THROWS_AS(parse_path_spec("/a/[blank, date, yy]/"), SpecError);
    CHECK_THROWS_AS(parse_path_spec("/a/[blank, when, yyyy]/"), SpecError);
    CHECK_THROWS_AS(parse_path_spec("/a/[blank, date"), SpecError);
    CHECK_THROWS_AS(parse_path_spec(""), SpecError);
}

TEST_CASE("incr counters are scoped to the parent and persist") {
    Workbook wb = make_workbook();
    wb.create_page("system", P("/inv/"));
    Event a = wb.create_pages("system", P("/inv/"), "./[blank, incr, n]/");
    Event b = wb.create_pages("system", P("/inv/"), "./[blank, incr, n]/");
    CHECK(a.payload["redirect"] == "/inv/n00000001/");
    CHECK(b.payload["redirect"] == "/inv/n00000002/");
    wb.create_page("system", P("/inv/n00000003/"));
    Event c = wb.create_pages("system", P("/inv/"), "./[blank, incr, n]/");
    CHECK(c.payload["redirect"] == "/inv/n00000004/");
    Event d = wb.create_pages("system", P("/"), "/other/[blank, incr, n]/");
    CHECK(d.payload["redirect"] == "/other/n00000001/");
}

TEST_CASE("event encoding round trip") {
    Gen g(3);
    SessionGen s{g};
    Workbook wb = make_workbook();
    std::vector<Event> events;
    wb.set_sink([&](const Event& e) { events.push_back(e); });
    for (int i = 0; i < 300; ++i) s.step(wb);
    REQUIRE(!events.empty());
    for (std::size_t i = 0; i < events.size(); ++i) {
        CHECK(events[i].seq == static_cast<std::int64_t>(i + 1));
        std::string line = encode_event(events[i]);
        CHECK(line.find('\n') == std::string::npos);
        CHECK(line.rfind("{\"seq\":", 0) == 0);
        Event back = decode_event(line, events[i].seq);
        CHECK(encode_event(back) == line);
        CHECK(back.changes == events[i].changes);
    }
    CHECK_THROWS_AS(decode_event(encode_event(events[0]), 2), JournalError);
    CHECK_THROWS_AS(decode_event("{\"seq\":1", 1), JournalError);
}

TEST_CASE("journal key order") {
    Workbook wb = make_workbook();
    std::vector<Event> events;
    wb.set_sink([&](const Event& e) { events.push_back(e); });
    put(wb, "/a/", "a1", "1");
    std::string line = encode_event(events.back());
    auto pos = [&](const char* k) { return line.find(std::string("\"") + k + "\":"); };
    CHECK(pos("seq") < pos("ts"));
    CHECK(pos("ts") < pos("user"));
    CHECK(pos("user") < pos("action"));
    CHECK(pos("action") < pos("path"));
    CHECK(pos("path") < pos("payload"));
    CHECK(line.find("\"action\":\"SetCells\"") != std::string::npos);
    CHECK(line.find("\"ts\":\"2011-04-21T09:30:0") != std::string::npos);
}

TEST_CASE("timestamps") {
    CHECK(format_timestamp(kApril21) == "2011-04-21T09:30:00.000Z");
    CHECK(parse_timestamp(format_timestamp(kApril21 + 123)) == kApril21 + 123);
    CHECK(serial_from_ms(kApril21) == doctest::Approx(40654.395833333336));
    CHECK_THROWS_AS(parse_timestamp("yesterday"), Error);
}

TEST_CASE("snapshot round trip is byte-identical") {
    Gen g(9);
    for (int round = 0; round < 10; ++round) {
        SessionGen s{g};
        Workbook wb = make_workbook();
        for (int i = 0; i < 80; ++i) s.step(wb);
        std::string text = snapshot_text(wb.site());
        Site back = site_from_json(json::parse(text));
        CHECK(snapshot_text(back) == text);
        Workbook restored(std::move(back));
        CHECK(same_values(restored.formula_values(), wb.formula_values()));
        CHECK(restored.graph_consistent());
    }
    std::string empty = snapshot_text(Site());
    CHECK(empty.rfind("{\"version\":1,\"seq\":0,", 0) == 0);
    json j = json::parse(empty);
    CHECK(j["pages"].is_array());
}

TEST_CASE("data dir journal, snapshot and suffix replay") {
    TempDir tmp;
    Gen g(12);
    SessionGen s{g};
    std::string full;
    {
        DataDir dir(tmp.path);
        dir.lock();
        Workbook wb = make_workbook();
        wb.set_sink([&](const Event& e) { dir.append(e); });
        for (int i = 0; i < 60; ++i) s.step(wb);
        dir.write_snapshot(wb.site());
        for (int i = 0; i < 60; ++i) s.step(wb);
        full = snapshot_text(wb.site());
    }
    DataDir dir(tmp.path);
    LoadedSite loaded = load_site(dir);
    CHECK(loaded.snapshot_seq > 0);
    CHECK(snapshot_text(loaded.workbook.site()) == full);
    CHECK(loaded.audit.size() == static_cast<std::size_t>(loaded.workbook.site().seq));
    VerifyReport r = verify_data(dir);
    CHECK_MESSAGE(r.ok, r.message);
    CHECK(r.events == loaded.workbook.site().seq);

    // The header line marks the format.
    std::string journal = slurp(dir.journal_file());
    CHECK(journal.rfind("{\"format\":\"hn-journal\",\"version\":1}\n", 0) == 0);
}

TEST_CASE("a second process cannot take the lock") {
    TempDir tmp;
    DataDir a(tmp.path);
    a.lock();
    DataDir b(tmp.path);
    CHECK_THROWS_AS(b.lock(), Error);
}

TEST_CASE("corrupt journals report the failing position") {
    TempDir tmp;
    {
        DataDir dir(tmp.path);
        Workbook wb = make_workbook();
        wb.set_sink([&](const Event& e) { dir.append(e); });
        for (int i = 1; i <= 5; ++i) put(wb, "/a/", "a" + std::to_string(i), std::to_string(i));
    }
    DataDir dir(tmp.path);
    std::string text = slurp(dir.journal_file());
    auto events = read_journal(dir.journal_file());
    CHECK(events.size() == 6);

    // Truncate in the middle of the last line.
    std::string cut = text.substr(0, text.size() - 10);
    std::ofstream(dir.journal_file(), std::ios::binary | std::ios::trunc) << cut;
    try {
        read_journal(dir.journal_file());
        FAIL("expected JournalError");
    } catch (const JournalError& e) {
        CHECK(e.seq() == 6);
    }
    CHECK_FALSE(verify_data(dir).ok);
    CHECK(verify_data(dir).failed_seq == 6);

    // Tampered recorded values fail verification on that event.
    std::string tampered = text;
    auto at = tampered.find("\"val\":3");
    REQUIRE(at != std::string::npos);
    tampered.replace(at, 7, "\"val\":4");
    std::ofstream(dir.journal_file(), std::ios::binary | std::ios::trunc) << tampered;
    VerifyReport r = verify_data(dir);
    CHECK_FALSE(r.ok);
    CHECK(r.failed_seq > 0);
}
