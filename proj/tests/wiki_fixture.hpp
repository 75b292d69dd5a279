#pragma once

// A page with wiki inputs in two transactions, formulas next to them, and
// users at three access levels. Shared by the wiki fuzz tests.

#include <string>
#include <vector>

#include "hn/access.hpp"
#include "support.hpp"

namespace hn::test {

inline CellAttrs input(ControlKind k, const char* tx, std::vector<std::string> options = {},
                       std::string options_ref = {}) {
    CellAttrs a;
    a.wiki_input = k;
    a.transaction = std::string(tx);
    a.options = std::move(options);
    a.options_ref = std::move(options_ref);
    return a;
}

inline void add_user(Workbook& wb, const std::string& user, const std::string& group = {}) {
    wb.user_admin("system", {{"op", "useradd"}, {"user", user}, {"salt", "00"}, {"hash", ""}});
    if (group.empty()) return;
    if (!wb.site().groups.contains(group)) wb.user_admin("system", {{"op", "groupadd"}, {"group", group}});
    wb.user_admin("system", {{"op", "member_add"}, {"group", group}, {"user", user}});
}

/// /w/: b1 text, b2 select, b3 radio over d1:d3 (transaction "order"), b4
/// text ("other"), b6 a formula carrying input attrs, c1:c3 formulas.
/// clerk has wikipage, viewer webpage, maker spreadsheet.
inline Workbook wiki_workbook() {
    Workbook wb = make_workbook();
    wb.create_page("system", P("/w/"));
    auto w = [&](const char* ref, const char* src, std::optional<CellAttrs> attrs = std::nullopt) {
        wb.set_cells("system", P("/w/"), {CellWrite{A(ref), std::string(src), attrs, std::nullopt}});
    };
    w("a1", "Name");
    w("b1", "", input(ControlKind::Text, "order"));
    w("b2", "red", input(ControlKind::Select, "order", {"red", "green"}));
    w("b3", "", input(ControlKind::Radio, "order", {}, "=d1:d3"));
    w("b4", "", input(ControlKind::Text, "other"));
    w("b6", "=1+1", input(ControlKind::Text, "order"));
    w("c1", "=b1&\"!\"");
    w("c2", "=if(b2=\"red\",1,2)");
    w("c3", "=sum(/w/[a1=\"Name\"]/d4)");
    w("d1", "s");
    w("d2", "m");
    w("d3", "l");
    w("d4", "7");
    add_user(wb, "clerk", "clerks");
    add_user(wb, "viewer", "viewers");
    add_user(wb, "maker", "makers");
    wb.grant("system", P("/w/"), ViewKind::Wikipage, "clerks");
    wb.grant("system", P("/w/"), ViewKind::Webpage, "viewers");
    wb.grant("system", P("/w/"), ViewKind::Spreadsheet, "makers");
    return wb;
}

/// Everything a wiki submission must never touch: page set, formulas,
/// attributes, formats, grants, templates and non-input literals.
inline std::string structure_of(const Site& site) {
    json j = json::array();
    for (const auto& [path, page] : site.pages()) {
        json cells = json::array();
        for (const auto& [addr, cell] : page->cells) {
            json c = {{"ref", to_a1(addr)}, {"attrs", attrs_to_json(cell.attrs)}, {"format", cell.format.value_or("")}};
            if (cell.is_formula() || !cell.attrs.wiki_input) c["src"] = cell.source();
            cells.push_back(c);
        }
        j.push_back({{"path", path.str()}, {"cells", cells}});
    }
    json full = site_to_json(site);
    return j.dump() + full["templates"].dump() + full["grants"].dump() + full["groups"].dump();
}

struct WikiFuzzResult {
    int accepted = 0;
    int rejected = 0;
    int violations = 0;
    std::string first_violation;
};

/// Random submissions from random users with hostile values. Checks after
/// each one that structure is unchanged and that only the named input cells
/// of the submitted transaction changed.
inline WikiFuzzResult wiki_fuzz(std::uint64_t seed, int submissions) {
    Gen g(seed);
    Workbook wb = wiki_workbook();
    const std::vector<std::string> refs = {"a1", "b1", "b2", "b3", "b4", "b6", "c1", "c2", "d1", "d4", "z99", "b5"};
    const std::vector<std::string> values = {
        "x",       "=a1",      "=/w/b1",    "'=x",  "red",   "green", "blue", "s",  "l",
        "",        "\xff\xfe", "=sum(/[a1>0]/b1)",  "1e3",   "TRUE",  "=rand()", "<script>", "../x/",
        "=c1",     "#REF!",    "\xc3\xa9t\xc3\xa9", "  ",    "0",     "=html.box.4x8(\"t\")"};
    const std::vector<std::string> likely_refs = {"b1", "b2", "b3"};
    const std::vector<std::string> likely_values = {"x", "red", "green", "s", "m", "=a1", ""};
    const std::vector<std::string> users = {"clerk", "clerk", "viewer", "maker", "nobody"};
    const std::vector<std::string> txs = {"order", "order", "other", "", "bogus"};
    WikiFuzzResult out;
    auto violate = [&](const std::string& why) {
        if (out.violations++ == 0) out.first_violation = why;
    };
    for (int i = 0; i < submissions; ++i) {
        std::string before_structure = structure_of(wb.site());
        Site before = wb.site();
        std::string user = g.pick(users);
        std::string tx = g.pick(txs);
        std::map<CellAddr, std::string> inputs;
        int n = g.range(0, 3);
        for (int k = 0; k < n; ++k) {
            const auto& ref = g.coin(0.7) ? g.pick(likely_refs) : g.pick(refs);
            inputs[A(ref)] = g.coin(0.6) ? g.pick(likely_values) : g.pick(values);
        }
        try {
            wiki_submit(wb, user, P("/w/"), tx, inputs);
            ++out.accepted;
            for (const auto& [addr, raw] : inputs) {
                const Cell* c = wb.site().cell(P("/w/"), addr);
                const Cell* was = before.cell(P("/w/"), addr);
                if (!was || !was->attrs.wiki_input || was->is_formula() || was->attrs.transaction.value_or("") != tx)
                    violate("accepted a write to " + to_a1(addr));
                auto expect = parse_input(literal_entry(raw)).literal;
                if (expect && (!c || !c->literal || !identical(*c->literal, *expect)))
                    violate("stored value differs at " + to_a1(addr));
            }
        } catch (const PermissionDenied&) {
            ++out.rejected;
        } catch (const ValidationError&) {
            ++out.rejected;
        }
        if (structure_of(wb.site()) != before_structure) violate("structure changed at submission " + std::to_string(i));
        // Literal cells that were not submitted keep their source.
        for (const auto& [addr, cell] : before.page(P("/w/"))->cells) {
            if (inputs.contains(addr)) continue;
            const Cell* now = wb.site().cell(P("/w/"), addr);
            if (!cell.is_formula() && (!now || now->source() != cell.source())) violate("unsubmitted cell " + to_a1(addr));
        }
    }
    return out;
}

}  // namespace hn::test
