#include "hn/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hn/error.hpp"
#include "hn/text.hpp"

namespace hn {

// ---------------------------------------------------------------------------
// Cells

std::string Cell::source() const {
    if (formula) return *formula;
    if (literal) return literal_source(*literal);
    return {};
}

CellInput parse_input(std::string_view source) {
    CellInput in;
    if (source.empty()) return in;
    if (source.front() == '=') {
        in.formula = parse(source);
        return in;
    }
    if (source.front() == '\'') {
        in.literal = Value(std::string(source.substr(1)));
        return in;
    }
    if (auto n = parse_number(source)) {
        in.literal = Value(*n);
        return in;
    }
    if (iequals(source, "TRUE")) in.literal = Value(true);
    else if (iequals(source, "FALSE")) in.literal = Value(false);
    else in.literal = Value(std::string(source));
    return in;
}

std::string literal_source(const Value& v) {
    if (v.is_number()) return format_number(v.number());
    if (v.is_bool()) return v.boolean() ? "TRUE" : "FALSE";
    if (v.is_text()) {
        const std::string& t = v.text();
        bool ambiguous = t.empty() || t.front() == '=' || t.front() == '\'' || parse_number(t) ||
                         iequals(t, "TRUE") || iequals(t, "FALSE");
        return ambiguous ? "'" + t : t;
    }
    if (v.is_error()) return std::string(to_string(v.error()));
    return {};
}

std::string_view to_string(ViewKind v) {
    switch (v) {
        case ViewKind::Spreadsheet: return "spreadsheet";
        case ViewKind::Table: return "table";
        case ViewKind::Wikipage: return "wikipage";
        case ViewKind::Webpage: return "webpage";
        case ViewKind::Log: return "log";
    }
    return "spreadsheet";
}

std::optional<ViewKind> parse_view_kind(std::string_view s) {
    for (auto v : {ViewKind::Spreadsheet, ViewKind::Table, ViewKind::Wikipage, ViewKind::Webpage, ViewKind::Log}) {
        if (to_string(v) == s) return v;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Site

Site::Site() { groups.emplace(kAdminGroup, Group{std::string(kAdminGroup), {}}); }

const Page* Site::page(const Path& p) const {
    auto it = pages_.find(p);
    return it == pages_.end() ? nullptr : it->second.get();
}

Page& Site::mutable_page(const Path& p) {
    auto it = pages_.find(p);
    if (it == pages_.end()) throw NotFound("page not found: " + p.str());
    if (it->second.use_count() > 1) it->second = std::make_shared<Page>(*it->second);
    return *it->second;
}

Page& Site::add_page(const Path& p) {
    if (pages_.contains(p)) throw AlreadyExists("page already exists: " + p.str());
    auto page = std::make_shared<Page>();
    page->path = p;
    return *pages_.emplace(p, std::move(page)).first->second;
}

void Site::remove_page(const Path& p) {
    if (pages_.erase(p) == 0) throw NotFound("page not found: " + p.str());
}

Value Site::value(const Path& p, CellAddr a) const {
    const Page* pg = page(p);
    if (!pg) return ErrorKind::Ref;
    const Cell* c = pg->find(a);
    return c ? c->cached : Value();
}

const Cell* Site::cell(const Path& p, CellAddr a) const {
    const Page* pg = page(p);
    return pg ? pg->find(a) : nullptr;
}

// ---------------------------------------------------------------------------
// Path specs

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return std::string(s);
}

bool valid_prefix(std::string_view s) { return s.empty() || valid_segment(s); }

constexpr std::array<std::string_view, 12> kMonths = {"jan", "feb", "mar", "apr", "may", "jun",
                                                      "jul", "aug", "sep", "oct", "nov", "dec"};

using namespace std::chrono;

year_month_day date_of(std::int64_t ms) { return year_month_day{floor<days>(sys_time<milliseconds>{milliseconds{ms}})}; }

std::string render_date(std::string_view token, std::int64_t now_ms) {
    auto ymd = date_of(now_ms);
    if (token == "yyyy") return std::to_string(static_cast<int>(ymd.year()));
    if (token == "mm") return std::string(kMonths[static_cast<unsigned>(ymd.month()) - 1]);
    if (token == "dddd") return std::to_string(static_cast<unsigned>(ymd.day()));
    throw SpecError("unknown date token: " + std::string(token));
}

std::string counter_name(const std::string& prefix, std::int64_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%08lld", static_cast<long long>(n));
    return prefix + buf;
}

}  // namespace

PathSpec parse_path_spec(std::string_view text) {
    PathSpec spec;
    std::string_view rest = text;
    if (rest.starts_with("/")) {
        rest.remove_prefix(1);
    } else if (rest.starts_with("./")) {
        spec.anchor = RefFlavor::BaseRelative;
        rest.remove_prefix(2);
    } else if (rest.starts_with("../")) {
        spec.anchor = RefFlavor::BaseRelative;
        while (rest.starts_with("../")) {
            ++spec.up;
            rest.remove_prefix(3);
        }
    } else {
        throw SpecError("path spec must start with '/', './' or '../'");
    }
    while (!rest.empty()) {
        std::size_t end;
        if (rest.front() == '[') {
            std::size_t close = rest.find(']');
            if (close == std::string_view::npos) throw SpecError("unterminated '[' in path spec");
            std::string_view body = rest.substr(1, close - 1);
            std::vector<std::string> parts;
            std::size_t start = 0;
            while (true) {
                std::size_t comma = body.find(',', start);
                parts.push_back(trim(body.substr(start, comma == std::string_view::npos ? body.size() - start
                                                                                       : comma - start)));
                if (comma == std::string_view::npos) break;
                start = comma + 1;
            }
            if (parts.size() != 3) throw SpecError("templated segment needs [template, source, format]");
            TemplatedSeg seg;
            seg.template_name = to_lower(parts[0]);
            if (!valid_segment(seg.template_name)) throw SpecError("bad template name: " + parts[0]);
            std::string source = to_lower(parts[1]);
            seg.fmt = to_lower(parts[2]);
            if (source == "date") {
                seg.source = SegSource::Date;
                if (seg.fmt != "yyyy" && seg.fmt != "mm" && seg.fmt != "dddd")
                    throw SpecError("unknown date token: " + parts[2]);
            } else if (source == "incr") {
                seg.source = SegSource::Incr;
                if (!valid_prefix(seg.fmt)) throw SpecError("bad incr prefix: " + parts[2]);
            } else {
                throw SpecError("unknown segment source: " + parts[1]);
            }
            spec.segments.emplace_back(std::move(seg));
            end = close + 1;
        } else {
            end = rest.find('/');
            if (end == std::string_view::npos) end = rest.size();
            std::string name = to_lower(rest.substr(0, end));
            if (!valid_segment(name)) throw SpecError("bad path segment: " + std::string(rest.substr(0, end)));
            spec.segments.emplace_back(LiteralSeg{std::move(name)});
        }
        rest.remove_prefix(end);
        if (rest.empty()) break;
        if (rest.front() != '/') throw SpecError("expected '/' in path spec");
        rest.remove_prefix(1);
    }
    if (spec.segments.empty()) throw SpecError("path spec has no segments");
    return spec;
}

Expansion expand_path_spec(const PathSpec& spec, const Path& base, const Site& site, std::int64_t now_ms) {
    Path cur;
    if (spec.anchor == RefFlavor::BaseRelative) {
        cur = base;
        for (int i = 0; i < spec.up; ++i) {
            if (cur.is_root()) throw SpecError("path spec climbs above the root");
            cur = cur.parent();
        }
    }
    Expansion out;
    for (const auto& seg : spec.segments) {
        if (const auto* lit = std::get_if<LiteralSeg>(&seg)) {
            cur = cur.child(lit->text);
            continue;
        }
        const auto& t = std::get<TemplatedSeg>(seg);
        if (t.template_name != kBlankTemplate && !site.templates.contains(t.template_name))
            throw NotFound("template not found: " + t.template_name);
        Path next;
        if (t.source == SegSource::Date) {
            next = cur.child(render_date(t.fmt, now_ms));
        } else {
            std::string key = cur.str() + "|" + t.fmt;
            std::int64_t n = 0;
            if (auto it = out.counters.find(key); it != out.counters.end()) n = it->second;
            else if (auto jt = site.counters.find(key); jt != site.counters.end()) n = jt->second;
            do {
                ++n;
                next = cur.child(counter_name(t.fmt, n));
            } while (site.has_page(next));
            out.counters[key] = n;
        }
        bool queued = std::any_of(out.to_create.begin(), out.to_create.end(),
                                  [&](const auto& e) { return e.first == next; });
        if (!site.has_page(next) && !queued) out.to_create.emplace_back(next, t.template_name);
        cur = next;
    }
    out.redirect = cur;
    return out;
}

// ---------------------------------------------------------------------------
// Journal

namespace {

constexpr std::array<std::string_view, 9> kActionNames = {"SetCells", "CreatePage",     "DeletePage",
                                                          "SaveTemplate", "WikiSubmit", "StructuralEdit",
                                                          "Grant",    "Revoke",         "UserAdmin"};

}  // namespace

std::string_view to_string(Action a) { return kActionNames[static_cast<std::size_t>(a)]; }

std::optional<Action> parse_action(std::string_view s) {
    for (std::size_t i = 0; i < kActionNames.size(); ++i)
        if (kActionNames[i] == s) return static_cast<Action>(i);
    return std::nullopt;
}

std::string format_timestamp(std::int64_t ms) {
    sys_time<milliseconds> t{milliseconds{ms}};
    auto day = floor<days>(t);
    year_month_day ymd{day};
    hh_mm_ss<milliseconds> hms{t - day};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()), static_cast<int>(hms.subseconds().count()));
    return buf;
}

std::int64_t parse_timestamp(std::string_view iso) {
    // YYYY-MM-DDTHH:MM:SS[.mmm]Z
    auto field = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        if (pos + len > iso.size()) throw Error("bad timestamp: " + std::string(iso));
        auto [p, ec] = std::from_chars(iso.data() + pos, iso.data() + pos + len, v);
        if (ec != std::errc{} || p != iso.data() + pos + len) throw Error("bad timestamp: " + std::string(iso));
        return v;
    };
    auto expect = [&](std::size_t pos, char c) {
        if (pos >= iso.size() || iso[pos] != c) throw Error("bad timestamp: " + std::string(iso));
    };
    int y = field(0, 4);
    expect(4, '-');
    int mo = field(5, 2);
    expect(7, '-');
    int d = field(8, 2);
    expect(10, 'T');
    int h = field(11, 2);
    expect(13, ':');
    int mi = field(14, 2);
    expect(16, ':');
    int s = field(17, 2);
    int ms = 0;
    std::size_t pos = 19;
    if (pos < iso.size() && iso[pos] == '.') {
        ms = field(20, 3);
        pos = 23;
    }
    expect(pos, 'Z');
    if (pos + 1 != iso.size()) throw Error("bad timestamp: " + std::string(iso));
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59) throw Error("bad timestamp: " + std::string(iso));
    auto t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
    return t.time_since_epoch().count();
}

double serial_from_ms(std::int64_t ms) { return static_cast<double>(ms) / 86400000.0 + 25569.0; }

// ---------------------------------------------------------------------------
// JSON encoding

json attrs_to_json(const CellAttrs& a) {
    json j = json::object();
    if (a.wiki_input) j["wiki_input"] = to_string(*a.wiki_input);
    if (!a.options.empty()) j["options"] = a.options;
    if (!a.options_ref.empty()) j["options_ref"] = a.options_ref;
    if (a.transaction) j["transaction"] = *a.transaction;
    return j;
}

CellAttrs attrs_from_json(const json& j) {
    CellAttrs a;
    if (j.contains("wiki_input")) {
        auto k = parse_control_kind(j["wiki_input"].get<std::string>());
        if (!k) throw ValidationError("bad wiki_input kind");
        a.wiki_input = *k;
    }
    if (j.contains("options")) a.options = j["options"].get<std::vector<std::string>>();
    if (j.contains("options_ref")) a.options_ref = j["options_ref"].get<std::string>();
    if (j.contains("transaction")) a.transaction = j["transaction"].get<std::string>();
    return a;
}


namespace {

json render_to_json(const RenderDirective& r) {
    struct Visitor {
        json operator()(const BoxDirective& b) const {
            return {{"kind", "box"},        {"width", b.width}, {"height", b.height},
                    {"title", b.title},     {"body", b.body},   {"footer", b.footer}};
        }
        json operator()(const MenuDirective& m) const {
            json entries = json::array();
            for (const auto& e : m.entries) entries.push_back({{"label", e.label}, {"children", e.children}});
            return {{"kind", "menu"}, {"entries", entries}};
        }
        json operator()(const FormControlDirective& f) const {
            return {{"kind", "form"},
                    {"control", to_string(f.control)},
                    {"options", f.options},
                    {"transaction", f.transaction}};
        }
        json operator()(const CreateButtonDirective& c) const {
            return {{"kind", "button"}, {"label", c.label}, {"path_spec", c.path_spec}};
        }
    };
    return std::visit(Visitor{}, r);
}

RenderDirective render_from_json(const json& j) {
    std::string kind = j.at("kind");
    if (kind == "box") {
        return BoxDirective{j.at("width"), j.at("height"), j.at("title"), j.at("body"), j.at("footer")};
    }
    if (kind == "menu") {
        MenuDirective m;
        for (const auto& e : j.at("entries")) m.entries.push_back({e.at("label"), e.at("children")});
        return m;
    }
    if (kind == "form") {
        auto control = parse_control_kind(j.at("control").get<std::string>());
        if (!control) throw Error("bad form control");
        return FormControlDirective{*control, j.at("options"), j.at("transaction")};
    }
    if (kind == "button") return CreateButtonDirective{j.at("label"), j.at("path_spec")};
    throw Error("bad render kind: " + kind);
}

json state_to_json(const CellState& s) { return {{"src", s.source}, {"val", value_to_json(s.value)}}; }

CellState state_from_json(const json& j) { return {j.at("src").get<std::string>(), value_from_json(j.at("val"))}; }

json cells_to_json(const std::map<CellAddr, Cell>& cells, bool with_values) {
    json arr = json::array();
    for (const auto& [addr, cell] : cells) {
        json c = {{"ref", to_a1(addr)}, {"src", cell.source()}};
        if (with_values) c["val"] = value_to_json(cell.cached);
        if (!cell.attrs.empty()) c["attrs"] = attrs_to_json(cell.attrs);
        if (cell.format) c["format"] = *cell.format;
        arr.push_back(std::move(c));
    }
    return arr;
}

std::map<CellAddr, Cell> cells_from_json(const json& arr) {
    std::map<CellAddr, Cell> out;
    for (const auto& c : arr) {
        auto addr = parse_a1(c.at("ref").get<std::string>());
        if (!addr) throw Error("bad cell ref in snapshot");
        Cell cell;
        CellInput in = parse_input(c.at("src").get<std::string>());
        if (in.formula) {
            cell.ast = *in.formula;
            cell.formula = print(cell.ast);
        } else if (in.literal) {
            cell.literal = *in.literal;
            cell.cached = *in.literal;
        }
        if (c.contains("val")) cell.cached = value_from_json(c["val"]);
        if (c.contains("attrs")) cell.attrs = attrs_from_json(c["attrs"]);
        if (c.contains("format")) cell.format = c["format"].get<std::string>();
        out.emplace(*addr, std::move(cell));
    }
    return out;
}

json grants_to_json(const Grants& g) {
    json j = json::object();
    for (const auto& [view, groups] : g) j[std::string(to_string(view))] = groups;
    return j;
}

Grants grants_from_json(const json& j) {
    Grants g;
    for (const auto& [k, v] : j.items()) {
        auto view = parse_view_kind(k);
        if (!view) throw Error("bad view kind: " + k);
        g[*view] = v.get<std::set<std::string>>();
    }
    return g;
}

}  // namespace

json value_to_json(const Value& v) {
    struct Visitor {
        json operator()(Blank) const { return nullptr; }
        json operator()(double d) const { return d; }
        json operator()(const std::string& s) const { return s; }
        json operator()(bool b) const { return b; }
        json operator()(ErrorKind e) const { return {{"error", to_string(e)}}; }
        json operator()(const RenderDirective& r) const { return {{"render", render_to_json(r)}}; }
    };
    return std::visit(Visitor{}, v.storage());
}

Value value_from_json(const json& j) {
    if (j.is_null()) return Value();
    if (j.is_number()) return Value(j.get<double>());
    if (j.is_string()) return Value(j.get<std::string>());
    if (j.is_boolean()) return Value(j.get<bool>());
    if (j.is_object() && j.contains("error")) {
        auto e = parse_error_kind(j["error"].get<std::string>());
        if (!e) throw Error("bad error value");
        return Value(*e);
    }
    if (j.is_object() && j.contains("render")) return Value(render_from_json(j["render"]));
    throw Error("bad value encoding");
}

std::string encode_event(const Event& e) {
    json payload = e.payload;
    json changes = json::array();
    for (const auto& c : e.changes) {
        changes.push_back({{"path", c.path.str()},
                           {"ref", to_a1(c.addr)},
                           {"before", state_to_json(c.before)},
                           {"after", state_to_json(c.after)}});
    }
    payload["changes"] = std::move(changes);
    auto dump = [](const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); };
    std::string out = "{\"seq\":" + std::to_string(e.seq);
    out += ",\"ts\":" + dump(e.ts);
    out += ",\"user\":" + dump(e.user);
    out += ",\"action\":" + dump(to_string(e.action));
    out += ",\"path\":" + dump(e.path.str());
    out += ",\"payload\":" + dump(payload) + "}";
    return out;
}

Event decode_event(std::string_view line, std::int64_t expected_seq) {
    try {
        json j = json::parse(line);
        Event e;
        e.seq = j.at("seq").get<std::int64_t>();
        if (e.seq != expected_seq)
            throw JournalError(expected_seq, "expected seq " + std::to_string(expected_seq) + ", found " +
                                                 std::to_string(e.seq));
        e.ts = j.at("ts").get<std::string>();
        parse_timestamp(e.ts);
        e.user = j.at("user").get<std::string>();
        auto action = parse_action(j.at("action").get<std::string>());
        if (!action) throw Error("unknown action");
        e.action = *action;
        e.path = Path::parse(j.at("path").get<std::string>());
        e.payload = j.at("payload");
        if (!e.payload.is_object()) throw Error("payload is not an object");
        if (e.payload.contains("changes")) {
            for (const auto& c : e.payload["changes"]) {
                auto addr = parse_a1(c.at("ref").get<std::string>());
                if (!addr) throw Error("bad cell ref");
                e.changes.push_back({Path::parse(c.at("path").get<std::string>()), *addr,
                                     state_from_json(c.at("before")), state_from_json(c.at("after"))});
            }
            e.payload.erase("changes");
        }
        return e;
    } catch (const JournalError&) {
        throw;
    } catch (const std::exception& ex) {
        throw JournalError(expected_seq, ex.what());
    }
}

json site_to_json(const Site& site) {
    json pages = json::array();
    for (const auto& [path, page] : site.pages()) {
        json p = {{"path", path.str()}, {"cells", cells_to_json(page->cells, true)}, {"views", page->views}};
        if (page->template_origin) p["template"] = *page->template_origin;
        pages.push_back(std::move(p));
    }
    json templates = json::array();
    for (const auto& [name, t] : site.templates) {
        templates.push_back({{"name", name},
                             {"cells", cells_to_json(t.cells, false)},
                             {"views", t.views},
                             {"perms", grants_to_json(t.perms)}});
    }
    json groups = json::array();
    for (const auto& [name, g] : site.groups) groups.push_back({{"name", name}, {"members", g.members}});
    json users = json::array();
    for (const auto& [id, u] : site.users) users.push_back({{"id", id}, {"salt", u.salt}, {"hash", u.hash}});
    json grants = json::array();
    for (const auto& [path, g] : site.grants) grants.push_back({{"path", path.str()}, {"perms", grants_to_json(g)}});
    return {{"version", 1},         {"seq", site.seq},       {"ts", site.ts},       {"pages", pages},
            {"templates", templates}, {"groups", groups},   {"counters", site.counters},
            {"users", users},       {"grants", grants}};
}

Site site_from_json(const json& j) {
    try {
        if (j.at("version").get<int>() != 1) throw Error("unsupported snapshot version");
        Site site;
        site.seq = j.at("seq").get<std::int64_t>();
        if (j.contains("ts")) site.ts = j["ts"].get<std::string>();
        for (const auto& p : j.at("pages")) {
            Page& page = site.add_page(Path::parse(p.at("path").get<std::string>()));
            page.cells = cells_from_json(p.at("cells"));
            page.views = p.at("views").get<std::map<std::string, std::string>>();
            if (p.contains("template")) page.template_origin = p["template"].get<std::string>();
        }
        for (const auto& t : j.at("templates")) {
            Template tpl;
            tpl.name = t.at("name").get<std::string>();
            tpl.cells = cells_from_json(t.at("cells"));
            for (auto& [_, cell] : tpl.cells) {
                if (cell.formula) cell.cached = Value();
            }
            tpl.views = t.at("views").get<std::map<std::string, std::string>>();
            tpl.perms = grants_from_json(t.at("perms"));
            site.templates.emplace(tpl.name, std::move(tpl));
        }
        for (const auto& g : j.at("groups"))
            site.groups[g.at("name")] = Group{g.at("name"), g.at("members").get<std::set<std::string>>()};
        site.counters = j.at("counters").get<std::map<std::string, std::int64_t>>();
        if (j.contains("users")) {
            for (const auto& u : j["users"]) site.users[u.at("id")] = User{u.at("id"), u.at("salt"), u.at("hash")};
        }
        if (j.contains("grants")) {
            for (const auto& g : j["grants"])
                site.grants[Path::parse(g.at("path").get<std::string>())] = grants_from_json(g.at("perms"));
        }
        return site;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& ex) {
        throw Error(std::string("bad snapshot: ") + ex.what());
    }
}

std::string snapshot_text(const Site& site) {
    json j = site_to_json(site);
    std::string out = "{";
    bool first = true;
    for (const char* key : {"version", "seq", "ts", "pages", "templates", "groups", "counters", "users", "grants"}) {
        if (!first) out += ",";
        first = false;
        out += json(key).dump() + ":" + j[key].dump(-1, ' ', false, json::error_handler_t::replace);
    }
    return out + "}";
}

namespace {

constexpr std::string_view kJournalHeader = R"({"format":"hn-journal","version":1})";

}  // namespace

std::vector<Event> read_journal(const std::filesystem::path& file) {
    std::vector<Event> out;
    std::ifstream in(file);
    if (!in) return out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            first = false;
            if (line.find("\"format\"") != std::string::npos) {
                json h = json::parse(line, nullptr, false);
                if (h.is_discarded() || h.value("version", 0) != 1)
                    throw JournalError(0, "unsupported journal header");
                continue;
            }
        }
        if (line.empty()) continue;
        out.push_back(decode_event(line, static_cast<std::int64_t>(out.size()) + 1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Data directory

DataDir::DataDir(std::filesystem::path root) : root_(std::move(root)) { std::filesystem::create_directories(root_); }

DataDir::~DataDir() {
    if (lock_fd_ >= 0) ::close(lock_fd_);
}

std::filesystem::path DataDir::from_env() {
    if (const char* d = std::getenv("HN_DATA_DIR"); d && *d) return d;
    return "hn-data";
}

void DataDir::lock() {
    if (lock_fd_ >= 0) return;
    auto file = root_ / "lock";
    int fd = ::open(file.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd < 0) throw Error("cannot open lock file " + file.string());
    if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd);
        throw Error("data directory " + root_.string() + " is in use by another process");
    }
    lock_fd_ = fd;
}

void DataDir::append(const Event& e) {
    auto file = journal_file();
    bool fresh = !std::filesystem::exists(file) || std::filesystem::file_size(file) == 0;
    std::string text;
    if (fresh) text.append(kJournalHeader).push_back('\n');
    text += encode_event(e);
    text.push_back('\n');
    int fd = ::open(file.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw Error("cannot open journal " + file.string());
    const char* p = text.data();
    std::size_t left = text.size();
    while (left > 0) {
        ssize_t n = ::write(fd, p, left);
        if (n < 0) {
            ::close(fd);
            throw Error("journal write failed");
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
    ::fdatasync(fd);
    ::close(fd);
}

void DataDir::write_snapshot(const Site& site) {
    auto tmp = root_ / "snapshot.json.tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << snapshot_text(site) << '\n';
        if (!out) throw Error("snapshot write failed");
    }
    std::filesystem::rename(tmp, snapshot_file());
}

std::optional<json> DataDir::read_snapshot() const {
    std::ifstream in(snapshot_file());
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const std::exception& ex) {
        throw Error(std::string("bad snapshot: ") + ex.what());
    }
}

}  // namespace hn
