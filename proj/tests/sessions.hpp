#pragma once

// Random edit sessions over a small site: cell writes with static, relative,
// range and z-references, cycles, volatile functions, page creation and
// deletion, templates, create buttons, structural edits and admin events.

#include <string>
#include <vector>

#include "support.hpp"

namespace hn::test {

struct SessionGen {
    Gen& g;
    int max_pages = 12;
    std::string user = "system";

    std::vector<std::string> page_pool() const {
        std::vector<std::string> v;
        for (int i = 1; i <= 4; ++i) v.push_back("/p" + std::to_string(i) + "/");
        v.push_back("/p1/sub/");
        for (int i = 1; i <= max_pages - 5; ++i) v.push_back("/z/k" + std::to_string(i) + "/");
        return v;
    }

    std::string ref() {
        return std::string(1, static_cast<char>('a' + g.range(0, 2))) + std::to_string(g.range(1, 5));
    }

    std::string page_ref() {
        switch (g.range(0, 3)) {
            case 0: return "/p" + std::to_string(g.range(1, 4)) + "/" + ref();
            case 1: return "../" + ref();
            case 2: return "./sub/" + ref();
            default: return "/z/k" + std::to_string(g.range(1, max_pages - 5)) + "/" + ref();
        }
    }

    std::string zref() {
        static const std::vector<std::string> ops = {">", "<", ">=", "=", "<>"};
        return "/z/[a1" + g.pick(ops) + std::to_string(g.range(0, 9)) + "]/" + ref();
    }

    std::string source() {
        switch (g.range(0, 15)) {
            case 0:
            case 1:
            case 2: return std::to_string(g.range(-5, 9));
            case 3: return g.coin() ? "abc" : "TRUE";
            case 4: return "";
            case 5: return "=" + ref() + "+" + ref();
            case 6: return "=sum(" + ref() + ":" + ref() + ")";
            case 7: return "=" + page_ref() + "*2";
            case 8: return "=sum(" + zref() + ")";
            case 9: return "=count(" + zref() + ")+" + ref();
            case 10: return "=if(" + ref() + ">2," + page_ref() + "," + ref() + ")";
            case 11: return g.coin() ? "=rand()" : "=now()-40000";
            case 12: return "=" + ref() + "&\"x\"";
            case 13: return "=average(" + ref() + ":" + ref() + ")/" + ref();
            case 14: return "=" + zref();
            default: return "=max(" + page_ref() + "," + ref() + ")";
        }
    }

    /// One random mutation. Expected user-level failures are swallowed.
    void step(Workbook& wb) {
        auto pool = page_pool();
        std::string page = g.pick(pool);
        try {
            int kind = g.range(0, 99);
            if (kind < 60) {
                if (!wb.site().has_page(P(page))) wb.create_page(user, P(page));
                std::vector<CellWrite> writes;
                int n = g.range(1, 3);
                for (int i = 0; i < n; ++i) writes.push_back(CellWrite{A(ref()), source(), std::nullopt, std::nullopt});
                wb.set_cells(user, P(page), writes);
            } else if (kind < 72) {
                if (!wb.site().has_page(P(page))) {
                    std::optional<std::string> tpl;
                    if (!wb.site().templates.empty() && g.coin()) tpl = wb.site().templates.begin()->first;
                    wb.create_page(user, P(page), tpl);
                }
            } else if (kind < 78) {
                if (wb.site().has_page(P(page))) wb.delete_page(user, P(page));
            } else if (kind < 84) {
                if (wb.site().has_page(P(page)))
                    wb.structural(user, P(page), g.coin() ? Axis::Rows : Axis::Cols, g.coin(), g.range(1, 5),
                                  g.range(1, 2));
            } else if (kind < 88) {
                if (wb.site().has_page(P(page))) wb.save_template(user, P(page), g.coin() ? "t1" : "t2");
            } else if (kind < 93) {
                static const std::vector<std::string> specs = {"/z/[blank, incr, k]/", "./[blank, date, yyyy]/",
                                                               "/p2/[blank, date, mm]/[blank, date, dddd]/"};
                if (!wb.site().has_page(P("/p1/"))) wb.create_page(user, P("/p1/"));
                wb.create_pages(user, P("/p1/"), g.pick(specs));
            } else if (kind < 96) {
                static const std::vector<std::string> views = {"spreadsheet", "table", "wikipage", "webpage", "log"};
                ViewKind v = *parse_view_kind(g.pick(views));
                if (g.coin()) wb.grant(user, P(page), v, "g" + std::to_string(g.range(1, 2)));
                else wb.revoke(user, P(page), v, "g" + std::to_string(g.range(1, 2)));
            } else {
                std::string u = "u" + std::to_string(g.range(1, 3));
                json op;
                switch (g.range(0, 2)) {
                    case 0: op = {{"op", "useradd"}, {"user", u}, {"salt", "00"}, {"hash", ""}}; break;
                    case 1: op = {{"op", "groupadd"}, {"group", "g1"}}; break;
                    default: op = {{"op", "member_add"}, {"group", "g1"}, {"user", u}}; break;
                }
                wb.user_admin(user, op);
            }
        } catch (const NotFound&) {
        } catch (const AlreadyExists&) {
        } catch (const ValidationError&) {
        } catch (const BoundsError&) {
        }
    }
};

}  // namespace hn::test
