#include "hn/access.hpp"

#include <algorithm>
#include <climits>

#include "hn/audit.hpp"
#include "hn/engine.hpp"
#include "hn/error.hpp"
#include "hn/text.hpp"

namespace hn {

namespace {

constexpr ViewKind kAllViews[] = {ViewKind::Spreadsheet, ViewKind::Table, ViewKind::Wikipage, ViewKind::Webpage,
                                  ViewKind::Log};

bool member(const Site& site, const std::string& user, const std::string& group) {
    auto it = site.groups.find(group);
    return it != site.groups.end() && it->second.members.contains(user);
}

/// Groups of the nearest record granting `view` at or above `path`.
const std::set<std::string>* nearest(const Site& site, const Path& path, ViewKind view) {
    Path p = path;
    while (true) {
        auto it = site.grants.find(p);
        if (it != site.grants.end()) {
            auto v = it->second.find(view);
            if (v != it->second.end()) return &v->second;
        }
        if (p.depth() == 0) return nullptr;
        p = p.parent();
    }
}

json cell_json(const CellAddr& addr, const Cell& cell, bool editable) {
    json c = {{"ref", to_a1(addr)},
              {"value", value_to_json(cell.cached)},
              {"display", display(cell.cached)},
              {"editable", editable}};
    if (cell.format) c["format"] = *cell.format;
    return c;
}

std::string entry_text(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return literal_entry(v.get<std::string>());
    if (v.is_boolean()) return v.get<bool>() ? "TRUE" : "FALSE";
    if (v.is_number()) return format_number(v.get<double>());
    throw ValidationError("table values must be strings, numbers, booleans or null");
}

/// Column of a table key: header text first, then column letters.
int table_column(const TableRegion& t, const std::string& key) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (!t.header[i].empty() && iequals(t.header[i], key)) return t.first_col + static_cast<int>(i);
    if (auto col = column_index(key); col && *col >= t.first_col && *col <= t.last_col) return *col;
    throw ValidationError("unknown table column: " + key);
}

std::vector<CellWrite> row_writes(const Site& site, const Path& page, const TableRegion& t, int row,
                                  const json& values) {
    std::map<int, std::string> by_col;
    if (values.is_array()) {
        if (values.size() > t.header.size()) throw ValidationError("more values than table columns");
        for (std::size_t i = 0; i < values.size(); ++i) by_col[t.first_col + static_cast<int>(i)] = entry_text(values[i]);
    } else if (values.is_object()) {
        for (const auto& [k, v] : values.items()) by_col[table_column(t, k)] = entry_text(v);
    } else {
        throw ValidationError("table values must be an object or an array");
    }
    std::vector<CellWrite> writes;
    for (const auto& [col, text] : by_col) {
        CellAddr addr{col, row};
        if (const Cell* c = site.cell(page, addr); c && c->is_formula())
            throw ValidationError("table cell holds a formula: " + to_a1(addr));
        if (!valid_utf8(text)) throw ValidationError("value is not valid UTF-8");
        writes.push_back(CellWrite{addr, text, std::nullopt, std::nullopt});
    }
    return writes;
}

const Page& page_or_throw(const Site& site, const Path& path) {
    const Page* page = site.page(path);
    if (!page) throw NotFound("page not found: " + path.str());
    return *page;
}

}  // namespace

bool implies(ViewKind granted, ViewKind requested) {
    if (granted == ViewKind::Log || requested == ViewKind::Log) return granted == requested;
    return static_cast<int>(granted) <= static_cast<int>(requested);
}

bool is_admin(const Site& site, const std::string& user) {
    return site.users.contains(user) && member(site, user, std::string(kAdminGroup));
}

bool check(const Site& site, const std::string& user, const Path& path, ViewKind view) {
    if (!site.users.contains(user)) return false;
    if (member(site, user, std::string(kAdminGroup))) return true;
    for (ViewKind g : kAllViews) {
        if (!implies(g, view)) continue;
        const auto* groups = nearest(site, path, g);
        if (!groups) continue;
        for (const auto& name : *groups)
            if (member(site, user, name)) return true;
    }
    return false;
}

void require(const Site& site, const std::string& user, const Path& path, ViewKind view) {
    if (!check(site, user, path, view))
        throw PermissionDenied(std::string(to_string(view)) + " view of " + path.str() + " is not granted to " + user);
}

std::vector<ViewKind> permitted_views(const Site& site, const std::string& user, const Path& path) {
    std::vector<ViewKind> out;
    for (ViewKind v : kAllViews)
        if (check(site, user, path, v)) out.push_back(v);
    return out;
}

std::optional<ViewKind> default_view(const Site& site, const std::string& user, const Path& path) {
    auto views = permitted_views(site, user, path);
    if (views.empty()) return std::nullopt;
    return views.front();
}

std::vector<std::string> resolve_options(const Site& site, const Path& page, const Cell& cell) {
    if (cell.attrs.options_ref.empty()) return cell.attrs.options;
    std::vector<std::string> out;
    Ast ast;
    try {
        ast = parse(cell.attrs.options_ref);
    } catch (const ParseError&) {
        return out;
    }
    EvalContext ctx{site, page, CellAddr{1, 1}};
    Operand op = evaluate_operand(ast, ctx);
    for (const auto& v : op.values) {
        if (v.is_blank() || v.is_error() || v.is_render()) continue;
        auto t = coerce_text(v);
        if (!failed(t)) out.push_back(std::get<std::string>(t));
    }
    return out;
}

json render_view(const Site& site, const AuditLog* log, const std::string& user, const Path& path, ViewKind view) {
    require(site, user, path, view);
    const Page& page = page_or_throw(site, path);
    json views = json::array();
    for (ViewKind v : permitted_views(site, user, path)) views.push_back(to_string(v));
    json doc = {{"view", to_string(view)}, {"path", path.str()}};

    switch (view) {
        case ViewKind::Spreadsheet: {
            json cells = json::array();
            for (const auto& [addr, cell] : page.cells) {
                json c = cell_json(addr, cell, true);
                c["source"] = cell.source();
                if (!cell.attrs.empty()) c["attrs"] = attrs_to_json(cell.attrs);
                cells.push_back(std::move(c));
            }
            doc["cells"] = std::move(cells);
            doc["structural"] = true;
            if (page.template_origin) doc["template"] = *page.template_origin;
            break;
        }
        case ViewKind::Wikipage: {
            json cells = json::array();
            for (const auto& [addr, cell] : page.cells) {
                bool input = cell.attrs.wiki_input.has_value() && !cell.is_formula();
                if (!input && cell.cached.is_blank()) continue;
                json c = cell_json(addr, cell, input);
                if (input) {
                    c["control"] = {{"kind", to_string(*cell.attrs.wiki_input)},
                                    {"options", resolve_options(site, path, cell)},
                                    {"transaction", cell.attrs.transaction.value_or("")}};
                }
                cells.push_back(std::move(c));
            }
            doc["cells"] = std::move(cells);
            doc["structural"] = false;
            break;
        }
        case ViewKind::Webpage: {
            json cells = json::array();
            for (const auto& [addr, cell] : page.cells) {
                if (cell.cached.is_blank()) continue;
                cells.push_back(cell_json(addr, cell, false));
            }
            doc["cells"] = std::move(cells);
            doc["structural"] = false;
            break;
        }
        case ViewKind::Table: {
            TableRegion t = table_region(page);
            json rows = json::array();
            for (int i = 1; i <= t.rows; ++i) {
                int r = t.header_row + i;
                json values = json::array();
                json shown = json::array();
                for (int col = t.first_col; col <= t.last_col; ++col) {
                    const Cell* c = page.find({col, r});
                    Value v = c ? c->cached : Value();
                    values.push_back(value_to_json(v));
                    shown.push_back(display(v));
                }
                rows.push_back({{"row", i}, {"sheet_row", r}, {"values", values}, {"display", shown}});
            }
            doc["header"] = t.header;
            doc["header_row"] = t.header_row;
            doc["first_col"] = column_name(std::max(t.first_col, 1));
            doc["rows"] = std::move(rows);
            doc["editable"] = true;
            doc["structural"] = false;
            break;
        }
        case ViewKind::Log: {
            json entries = json::array();
            if (log)
                for (const auto& e : log->page_history(path)) entries.push_back(entry_to_json(e));
            doc["entries"] = std::move(entries);
            doc["structural"] = false;
            break;
        }
    }
    doc["views"] = std::move(views);
    return doc;
}

std::string literal_entry(const std::string& raw) {
    if (!raw.empty() && raw.front() == '=') return "'" + raw;
    return raw;
}

Event wiki_submit(Workbook& wb, const std::string& user, const Path& path, const std::string& transaction,
                  const std::map<CellAddr, std::string>& inputs) {
    const Site& site = wb.site();
    require(site, user, path, ViewKind::Wikipage);
    const Page& page = page_or_throw(site, path);
    if (inputs.empty()) throw ValidationError("no inputs submitted");

    std::vector<std::string> foreign, mismatched, invalid;
    std::vector<CellWrite> writes;
    for (const auto& [addr, raw] : inputs) {
        const Cell* cell = page.find(addr);
        if (!cell || !cell->attrs.wiki_input || cell->is_formula()) {
            foreign.push_back(to_a1(addr));
            continue;
        }
        if (cell->attrs.transaction.value_or("") != transaction) {
            mismatched.push_back(to_a1(addr));
            continue;
        }
        if (!valid_utf8(raw)) {
            invalid.push_back(to_a1(addr));
            continue;
        }
        if (*cell->attrs.wiki_input != ControlKind::Text && !raw.empty()) {
            auto options = resolve_options(site, path, *cell);
            if (std::find(options.begin(), options.end(), raw) == options.end()) {
                invalid.push_back(to_a1(addr));
                continue;
            }
        }
        writes.push_back(CellWrite{addr, literal_entry(raw), std::nullopt, std::nullopt});
    }
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
        return s;
    };
    if (!foreign.empty()) throw PermissionDenied("not wiki input cells: " + join(foreign));
    if (!mismatched.empty()) throw ValidationError("cells outside transaction '" + transaction + "': " + join(mismatched));
    if (!invalid.empty()) throw ValidationError("invalid values for: " + join(invalid));
    return wb.set_cells(user, path, writes, Action::WikiSubmit, {{"transaction", transaction}});
}

TableRegion table_region(const Page& page) {
    TableRegion t;
    int min_row = INT_MAX, min_col = INT_MAX, max_col = 0;
    for (const auto& [addr, cell] : page.cells) {
        if (cell.cached.is_blank()) continue;
        min_row = std::min(min_row, addr.row);
        min_col = std::min(min_col, addr.col);
        max_col = std::max(max_col, addr.col);
    }
    if (max_col == 0) return t;
    t.header_row = min_row;
    t.first_col = min_col;
    t.last_col = max_col;
    auto row_blank = [&](int r) {
        for (int c = min_col; c <= max_col; ++c)
            if (const Cell* cell = page.find({c, r}); cell && !cell->cached.is_blank()) return false;
        return true;
    };
    for (int c = min_col; c <= max_col; ++c) {
        const Cell* cell = page.find({c, min_row});
        t.header.push_back(cell ? display(cell->cached) : std::string());
    }
    while (t.header_row + t.rows + 1 <= kMaxRow && !row_blank(t.header_row + t.rows + 1)) ++t.rows;
    return t;
}

Event table_append(Workbook& wb, const std::string& user, const Path& path, const json& values) {
    const Site& site = wb.site();
    require(site, user, path, ViewKind::Table);
    TableRegion t = table_region(page_or_throw(site, path));
    if (t.header_row == 0) throw ValidationError("page has no table header");
    int row = t.header_row + t.rows + 1;
    if (row > kMaxRow) throw BoundsError("table is full");
    auto writes = row_writes(site, path, t, row, values);
    bool any = std::any_of(writes.begin(), writes.end(), [](const CellWrite& w) { return !w.source->empty(); });
    if (!any) throw ValidationError("appended row is blank");
    return wb.set_cells(user, path, writes, Action::SetCells, {{"table", {{"op", "append"}, {"row", t.rows + 1}}}});
}

Event table_update(Workbook& wb, const std::string& user, const Path& path, int row, const json& values) {
    const Site& site = wb.site();
    require(site, user, path, ViewKind::Table);
    TableRegion t = table_region(page_or_throw(site, path));
    if (row < 1 || row > t.rows) throw BoundsError("table row out of range: " + std::to_string(row));
    auto writes = row_writes(site, path, t, t.header_row + row, values);
    return wb.set_cells(user, path, writes, Action::SetCells, {{"table", {{"op", "update"}, {"row", row}}}});
}

Event table_delete(Workbook& wb, const std::string& user, const Path& path, int row) {
    const Site& site = wb.site();
    require(site, user, path, ViewKind::Table);
    TableRegion t = table_region(page_or_throw(site, path));
    if (row < 1 || row > t.rows) throw BoundsError("table row out of range: " + std::to_string(row));
    return *wb.structural(user, path, Axis::Rows, false, t.header_row + row, 1,
                          {{"table", {{"op", "delete"}, {"row", row}}}});
}

Event activate_create_button(Workbook& wb, const std::string& user, const Path& path, CellAddr addr) {
    const Site& site = wb.site();
    require(site, user, path, ViewKind::Wikipage);
    const Cell* cell = page_or_throw(site, path).find(addr);
    const CreateButtonDirective* button = nullptr;
    if (cell && cell->cached.is_render()) button = std::get_if<CreateButtonDirective>(&cell->cached.render());
    if (!button) throw ValidationError("cell " + to_a1(addr) + " is not a create button");
    return wb.create_pages(user, path, button->path_spec);
}

}  // namespace hn
