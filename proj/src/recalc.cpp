#include "hn/recalc.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <unordered_map>

#include "hn/engine.hpp"
#include "hn/error.hpp"
#include "hn/text.hpp"
#include "hn/zquery.hpp"

namespace hn {

// ---------------------------------------------------------------------------
// DepGraph

namespace {

bool is_single(const Rect& r) { return r.first == r.last; }

// A page can change a z-reference's result when it sits at a predicate
// position of the pattern (its existence and predicate inputs matter) or at
// full depth (its target cells matter).
bool z_relevant(const ZPattern& pattern, const Path& page) {
    std::size_t d = page.depth();
    if (d == 0 || d > pattern.length()) return false;
    const auto& segs = page.segments();
    for (std::size_t i = 0; i < d; ++i) {
        const auto& p = pattern.segments[i];
        if (!p.predicate && p.name != segs[i]) return false;
    }
    return d == pattern.length() || pattern.segments[d - 1].predicate != nullptr;
}

}  // namespace

void DepGraph::clear() {
    nodes_.clear();
    index_.clear();
    zreg_.clear();
    volatile_.clear();
}

void DepGraph::add_edge(const CellKey& from, Node& node, const StaticRef& ref) {
    if (node.refs[ref]++ > 0) return;
    PageIndex& idx = index_[ref.page];
    if (is_single(ref.rect)) idx.single[ref.rect.first].insert(from);
    else idx.ranges.emplace_back(ref.rect, from);
}

void DepGraph::remove_edge(const CellKey& from, Node& node, const StaticRef& ref) {
    auto it = node.refs.find(ref);
    if (it == node.refs.end()) return;
    if (--it->second > 0) return;
    node.refs.erase(it);
    auto pit = index_.find(ref.page);
    if (pit == index_.end()) return;
    PageIndex& idx = pit->second;
    if (is_single(ref.rect)) {
        auto sit = idx.single.find(ref.rect.first);
        if (sit != idx.single.end()) {
            sit->second.erase(from);
            if (sit->second.empty()) idx.single.erase(sit);
        }
    } else {
        auto rit = std::find(idx.ranges.begin(), idx.ranges.end(), std::pair{ref.rect, from});
        if (rit != idx.ranges.end()) idx.ranges.erase(rit);
    }
    if (idx.single.empty() && idx.ranges.empty()) index_.erase(pit);
}

void DepGraph::expand(const CellKey& key, Node& node, const ZEntry& z, const Path& page) {
    for (const auto& rect : zref_inputs_on(z.pattern, z.target, page)) {
        StaticRef ref{page, rect};
        add_edge(key, node, ref);
        node.expanded[page].push_back(ref);
    }
}

void DepGraph::add_formula(const Site& site, const CellKey& key, const Cell& cell) {
    remove_formula(key);
    if (!cell.ast) return;
    Node& node = nodes_[key];
    CollectedRefs refs = collect_refs(cell.ast, key.page);
    for (const auto& ref : refs.statics) add_edge(key, node, ref);
    for (auto& z : refs.zrefs) {
        ZEntry entry{std::move(z.pattern), z.target, {}};
        entry.prefix = entry.pattern.literal_prefix();
        zreg_[entry.prefix].insert(key);
        site.for_each_under(entry.prefix, [&](const Page& page) {
            if (z_relevant(entry.pattern, page.path)) expand(key, node, entry, page.path);
        });
        node.zrefs.push_back(std::move(entry));
    }
    if (refs.is_volatile) volatile_.insert(key);
}

void DepGraph::remove_formula(const CellKey& key) {
    auto it = nodes_.find(key);
    if (it == nodes_.end()) return;
    Node& node = it->second;
    while (!node.refs.empty()) {
        auto ref = node.refs.begin()->first;
        node.refs.begin()->second = 1;
        remove_edge(key, node, ref);
    }
    for (const auto& z : node.zrefs) {
        auto zit = zreg_.find(z.prefix);
        if (zit == zreg_.end()) continue;
        zit->second.erase(key);
        if (zit->second.empty()) zreg_.erase(zit);
    }
    volatile_.erase(key);
    nodes_.erase(it);
}

void DepGraph::page_created(const Path& page, std::set<CellKey>& dirty) {
    if (auto it = index_.find(page); it != index_.end()) {
        for (const auto& [_, keys] : it->second.single) dirty.insert(keys.begin(), keys.end());
        for (const auto& [_, key] : it->second.ranges) dirty.insert(key);
    }
    for (std::size_t d = 0; d <= page.depth(); ++d) {
        auto zit = zreg_.find(page.prefix(d));
        if (zit == zreg_.end()) continue;
        for (const auto& key : zit->second) {
            Node& node = nodes_.at(key);
            for (const auto& z : node.zrefs) {
                if (z.prefix.depth() != d || !z_relevant(z.pattern, page)) continue;
                expand(key, node, z, page);
                dirty.insert(key);
            }
        }
    }
}

void DepGraph::page_removed(const Path& page, std::set<CellKey>& dirty) {
    for (std::size_t d = 0; d <= page.depth(); ++d) {
        auto zit = zreg_.find(page.prefix(d));
        if (zit == zreg_.end()) continue;
        for (const auto& key : zit->second) {
            Node& node = nodes_.at(key);
            for (const auto& z : node.zrefs) {
                if (z.prefix.depth() == d && z_relevant(z.pattern, page)) dirty.insert(key);
            }
            auto eit = node.expanded.find(page);
            if (eit == node.expanded.end()) continue;
            for (const auto& ref : eit->second) remove_edge(key, node, ref);
            node.expanded.erase(eit);
        }
    }
    if (auto it = index_.find(page); it != index_.end()) {
        for (const auto& [_, keys] : it->second.single) dirty.insert(keys.begin(), keys.end());
        for (const auto& [_, key] : it->second.ranges) dirty.insert(key);
    }
}

void DepGraph::dependents(const CellKey& key, std::vector<CellKey>& out) const {
    auto it = index_.find(key.page);
    if (it == index_.end()) return;
    if (auto sit = it->second.single.find(key.addr); sit != it->second.single.end())
        out.insert(out.end(), sit->second.begin(), sit->second.end());
    for (const auto& [rect, dep] : it->second.ranges)
        if (rect.contains(key.addr)) out.push_back(dep);
}

std::set<std::pair<CellKey, StaticRef>> DepGraph::edges() const {
    std::set<std::pair<CellKey, StaticRef>> out;
    for (const auto& [key, node] : nodes_)
        for (const auto& [ref, _] : node.refs) out.emplace(key, ref);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation pass

void recalculate(Site& site, const DepGraph& graph, const std::set<CellKey>& seeds, double now, std::uint64_t seed,
                 const std::function<void(const CellKey&)>& before) {
    // Dirty closure.
    std::set<CellKey> visited(seeds.begin(), seeds.end());
    visited.insert(graph.volatiles().begin(), graph.volatiles().end());
    std::deque<CellKey> work(visited.begin(), visited.end());
    std::vector<CellKey> dirty;
    std::vector<CellKey> deps;
    while (!work.empty()) {
        CellKey key = std::move(work.front());
        work.pop_front();
        const Cell* cell = site.cell(key.page, key.addr);
        if (cell && cell->is_formula()) dirty.push_back(key);
        deps.clear();
        graph.dependents(key, deps);
        for (auto& d : deps) {
            if (visited.insert(d).second) work.push_back(std::move(d));
        }
    }
    if (dirty.empty()) return;
    std::sort(dirty.begin(), dirty.end());
    const std::size_t n = dirty.size();
    std::unordered_map<CellKey, int> id;
    id.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) id.emplace(dirty[i], static_cast<int>(i));

    std::vector<std::vector<int>> succ(n);
    std::vector<bool> self_loop(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        deps.clear();
        graph.dependents(dirty[i], deps);
        for (const auto& d : deps) {
            auto it = id.find(d);
            if (it == id.end()) continue;
            if (it->second == static_cast<int>(i)) self_loop[i] = true;
            else succ[i].push_back(it->second);
        }
        std::sort(succ[i].begin(), succ[i].end());
        succ[i].erase(std::unique(succ[i].begin(), succ[i].end()), succ[i].end());
    }

    // Tarjan's strongly connected components, iterative.
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0, comps = 0;
    std::vector<std::pair<int, std::size_t>> call;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        call.emplace_back(static_cast<int>(root), 0);
        while (!call.empty()) {
            auto& [v, pos] = call.back();
            if (pos == 0 && index[v] < 0) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            if (pos < succ[v].size()) {
                int w = succ[v][pos++];
                if (index[w] < 0) {
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = comps;
                    if (w == v) break;
                }
                ++comps;
            }
            int finished = v;
            call.pop_back();
            if (!call.empty()) {
                int parent = call.back().first;
                low[parent] = std::min(low[parent], low[finished]);
            }
        }
    }

    std::vector<std::vector<int>> members(static_cast<std::size_t>(comps));
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(comp[i])].push_back(static_cast<int>(i));
    std::vector<int> indeg(static_cast<std::size_t>(comps), 0);
    for (std::size_t i = 0; i < n; ++i)
        for (int w : succ[i])
            if (comp[w] != comp[i]) ++indeg[static_cast<std::size_t>(comp[w])];

    // Kahn over the condensation; ties broken by the smallest member key.
    std::set<std::pair<int, int>> ready;
    for (int c = 0; c < comps; ++c)
        if (indeg[static_cast<std::size_t>(c)] == 0) ready.emplace(members[static_cast<std::size_t>(c)].front(), c);
    while (!ready.empty()) {
        auto [_, c] = *ready.begin();
        ready.erase(ready.begin());
        const auto& ms = members[static_cast<std::size_t>(c)];
        bool cyclic = ms.size() > 1 || self_loop[static_cast<std::size_t>(ms.front())];
        for (int i : ms) {
            const CellKey& key = dirty[static_cast<std::size_t>(i)];
            Value v;
            if (cyclic) {
                v = ErrorKind::Circ;
            } else {
                const Cell* cell = site.cell(key.page, key.addr);
                EvalContext ctx{site, key.page, key.addr, now, seed};
                v = evaluate(cell->ast, ctx);
            }
            if (before) before(key);
            site.mutable_page(key.page).cells[key.addr].cached = std::move(v);
        }
        for (int i : ms) {
            for (int w : succ[static_cast<std::size_t>(i)]) {
                int cw = comp[w];
                if (cw == c) continue;
                if (--indeg[static_cast<std::size_t>(cw)] == 0)
                    ready.emplace(members[static_cast<std::size_t>(cw)].front(), cw);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Workbook

namespace {

CellState state_of(const Site& site, const CellKey& key) {
    const Cell* c = site.cell(key.page, key.addr);
    if (!c) return {};
    return {c->source(), c->cached};
}

void check_addr(CellAddr a) {
    if (a.col < 1 || a.col > kMaxCol || a.row < 1 || a.row > kMaxRow)
        throw BoundsError("cell out of range: col " + std::to_string(a.col) + ", row " + std::to_string(a.row));
}

CellAddr addr_of(const json& c) {
    auto a = parse_a1(c.at("ref").get<std::string>());
    if (!a) throw ValidationError("bad cell reference: " + c.at("ref").get<std::string>());
    return *a;
}

bool valid_name(std::string_view s) {
    if (s.empty() || s.size() > 64) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
               c == '.' || c == '@';
    });
}

std::int64_t system_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace

struct Workbook::Txn {
    const Site& site;
    std::map<CellKey, CellState> before;

    void touch(const CellKey& key) {
        if (!before.contains(key)) before.emplace(key, state_of(site, key));
    }

    std::vector<CellChange> changes() const {
        std::vector<CellChange> out;
        for (const auto& [key, prior] : before) {
            CellState now = state_of(site, key);
            if (now == prior) continue;
            out.push_back({key.page, key.addr, prior, std::move(now)});
        }
        return out;
    }
};

Workbook::Workbook() : clock_(system_ms) {}

Workbook::Workbook(Site site) : site_(std::move(site)), clock_(system_ms) { rebuild_graph(); }

void Workbook::rebuild_graph() {
    graph_.clear();
    for (const auto& [path, page] : site_.pages())
        for (const auto& [addr, cell] : page->cells)
            if (cell.is_formula()) graph_.add_formula(site_, CellKey{path, addr}, cell);
}

Event Workbook::make_event(const std::string& user, Action action, const Path& path, json payload,
                           std::optional<std::int64_t> ms) const {
    Event e;
    e.seq = site_.seq + 1;
    e.ts = format_timestamp(ms ? *ms : clock_());
    e.user = user;
    e.action = action;
    e.path = path;
    e.payload = std::move(payload);
    return e;
}

Event Workbook::commit(Event e) {
    execute(e);
    if (sink_) sink_(e);
    return e;
}

void Workbook::execute(Event& e) {
    Txn txn{site_, {}};
    std::set<CellKey> seeds;
    const json& p = e.payload;
    switch (e.action) {
        case Action::SetCells:
        case Action::WikiSubmit: write_cells(e, txn, seeds); break;
        case Action::CreatePage: {
            for (const auto& pg : p.at("pages"))
                instantiate(Path::parse(pg.at("path").get<std::string>()), pg.at("template").get<std::string>(), txn,
                            seeds);
            if (p.contains("counters")) {
                for (const auto& [k, v] : p["counters"].items()) site_.counters[k] = v.get<std::int64_t>();
            }
            break;
        }
        case Action::DeletePage: remove_page(e.path, txn, seeds); break;
        case Action::SaveTemplate: {
            const Page* page = site_.page(e.path);
            if (!page) throw NotFound("page not found: " + e.path.str());
            Template t;
            t.name = p.at("name").get<std::string>();
            t.cells = page->cells;
            for (auto& [_, cell] : t.cells) {
                cell.cached = cell.literal ? *cell.literal : Value();
            }
            t.views = page->views;
            if (auto it = site_.grants.find(e.path); it != site_.grants.end()) t.perms = it->second;
            site_.templates[t.name] = std::move(t);
            break;
        }
        case Action::StructuralEdit: apply_structural(e, txn, seeds); break;
        case Action::Grant: {
            auto view = parse_view_kind(p.at("view").get<std::string>());
            if (!view) throw ValidationError("bad view");
            site_.grants[e.path][*view].insert(p.at("group").get<std::string>());
            break;
        }
        case Action::Revoke: {
            auto view = parse_view_kind(p.at("view").get<std::string>());
            if (!view) throw ValidationError("bad view");
            auto it = site_.grants.find(e.path);
            if (it != site_.grants.end()) {
                auto vit = it->second.find(*view);
                if (vit != it->second.end()) {
                    vit->second.erase(p.at("group").get<std::string>());
                    if (vit->second.empty()) it->second.erase(vit);
                }
                if (it->second.empty()) site_.grants.erase(it);
            }
            break;
        }
        case Action::UserAdmin: apply_admin(e); break;
    }
    double now = serial_from_ms(parse_timestamp(e.ts));
    recalculate(site_, graph_, seeds, now, static_cast<std::uint64_t>(e.seq),
                [&](const CellKey& k) { txn.touch(k); });
    e.changes = txn.changes();
    site_.seq = e.seq;
    site_.ts = e.ts;
}

void Workbook::write_cells(const Event& e, Txn& txn, std::set<CellKey>& seeds) {
    for (const auto& c : e.payload.at("cells")) {
        CellAddr addr = addr_of(c);
        CellKey key{e.path, addr};
        txn.touch(key);
        Page& page = site_.mutable_page(e.path);
        Cell& cell = page.cells[addr];
        if (c.contains("src")) {
            if (cell.is_formula()) graph_.remove_formula(key);
            CellInput in = parse_input(c["src"].get<std::string>());
            cell.formula.reset();
            cell.ast.reset();
            cell.literal.reset();
            cell.cached = Value();
            if (in.formula) {
                cell.ast = *in.formula;
                cell.formula = print(cell.ast);
            } else if (in.literal) {
                cell.literal = *in.literal;
                cell.cached = *in.literal;
            }
        }
        if (c.contains("attrs")) cell.attrs = c["attrs"].is_null() ? CellAttrs{} : attrs_from_json(c["attrs"]);
        if (c.contains("format")) {
            if (c["format"].is_null()) cell.format.reset();
            else cell.format = c["format"].get<std::string>();
        }
        if (cell.is_default()) {
            page.cells.erase(addr);
        } else if (c.contains("src") && cell.is_formula()) {
            graph_.add_formula(site_, key, cell);
        }
        seeds.insert(key);
    }
}

void Workbook::instantiate(const Path& path, const std::string& template_name, Txn& txn,
                           std::set<CellKey>& seeds) {
    Page& page = site_.add_page(path);
    graph_.page_created(path, seeds);
    if (template_name == kBlankTemplate) return;
    auto it = site_.templates.find(template_name);
    if (it == site_.templates.end()) throw NotFound("template not found: " + template_name);
    const Template& t = it->second;
    page.template_origin = template_name;
    page.views = t.views;
    if (!t.perms.empty()) site_.grants[path] = t.perms;
    for (const auto& [addr, cell] : t.cells) {
        CellKey key{path, addr};
        txn.touch(key);
        Cell& c = page.cells[addr] = cell;
        c.cached = c.literal ? *c.literal : Value();
        if (c.is_formula()) graph_.add_formula(site_, key, c);
        seeds.insert(key);
    }
}

void Workbook::remove_page(const Path& path, Txn& txn, std::set<CellKey>& seeds) {
    const Page* page = site_.page(path);
    if (!page) throw NotFound("page not found: " + path.str());
    for (const auto& [addr, cell] : page->cells) {
        CellKey key{path, addr};
        txn.touch(key);
        if (cell.is_formula()) graph_.remove_formula(key);
        seeds.insert(key);
    }
    site_.remove_page(path);
    graph_.page_removed(path, seeds);
}

void Workbook::apply_structural(const Event& e, Txn& txn, std::set<CellKey>& seeds) {
    const json& p = e.payload;
    std::string op = p.at("op").get<std::string>();
    bool insert = op.starts_with("insert_");
    Axis axis = op.ends_with("_cols") ? Axis::Cols : Axis::Rows;
    int at = p.at("at").get<int>();
    int count = p.at("count").get<int>();
    Shift shift{e.path, axis, at, insert ? count : -count};

    const Page* page = site_.page(e.path);
    if (!page) throw NotFound("page not found: " + e.path.str());
    std::map<CellAddr, Cell> moved;
    for (const auto& [addr, cell] : page->cells) {
        txn.touch({e.path, addr});
        if (auto na = shift_addr(addr, shift)) {
            txn.touch({e.path, *na});
            moved.emplace(*na, cell);
        }
    }
    for (const auto& [path, pg] : site_.pages())
        for (const auto& [addr, cell] : pg->cells)
            if (cell.is_formula()) txn.touch({path, addr});
    site_.mutable_page(e.path).cells = std::move(moved);

    // Rewrite references site-wide.
    struct Rewrite {
        Path page;
        CellAddr addr;
        Ast ast;
        std::optional<std::string> options_ref;
    };
    std::vector<Rewrite> rewrites;
    for (const auto& [path, pg] : site_.pages()) {
        for (const auto& [addr, cell] : pg->cells) {
            Rewrite r{path, addr, nullptr, std::nullopt};
            if (cell.is_formula()) {
                Ast next = rewrite_refs(cell.ast, path, shift);
                if (!equal(next, cell.ast)) r.ast = next;
            }
            if (!cell.attrs.options_ref.empty()) {
                Ast ref = parse(cell.attrs.options_ref);
                Ast next = rewrite_refs(ref, path, shift);
                if (!equal(next, ref)) r.options_ref = print(next);
            }
            if (r.ast || r.options_ref) rewrites.push_back(std::move(r));
        }
    }
    for (auto& r : rewrites) {
        Cell& cell = site_.mutable_page(r.page).cells.at(r.addr);
        if (r.ast) {
            cell.ast = r.ast;
            cell.formula = print(r.ast);
        }
        if (r.options_ref) cell.attrs.options_ref = *r.options_ref;
    }

    rebuild_graph();
    for (const auto& [path, pg] : site_.pages())
        for (const auto& [addr, cell] : pg->cells) {
            if (!cell.is_formula()) continue;
            seeds.insert({path, addr});
            site_.mutable_page(path).cells[addr].cached = Value();
        }
}

void Workbook::apply_admin(const Event& e) {
    const json& p = e.payload;
    std::string op = p.at("op").get<std::string>();
    if (op == "useradd" || op == "passwd") {
        std::string id = p.at("user").get<std::string>();
        site_.users[id] = User{id, p.at("salt").get<std::string>(), p.at("hash").get<std::string>()};
    } else if (op == "userdel") {
        std::string id = p.at("user").get<std::string>();
        site_.users.erase(id);
        for (auto& [_, g] : site_.groups) g.members.erase(id);
    } else if (op == "groupadd") {
        std::string g = p.at("group").get<std::string>();
        site_.groups[g] = Group{g, {}};
    } else if (op == "groupdel") {
        site_.groups.erase(p.at("group").get<std::string>());
    } else if (op == "member_add") {
        site_.groups.at(p.at("group").get<std::string>()).members.insert(p.at("user").get<std::string>());
    } else if (op == "member_remove") {
        site_.groups.at(p.at("group").get<std::string>()).members.erase(p.at("user").get<std::string>());
    } else {
        throw ValidationError("unknown admin op: " + op);
    }
}

// ---------------------------------------------------------------------------
// Public mutations

Event Workbook::set_cells(const std::string& user, const Path& page, const std::vector<CellWrite>& writes,
                          Action action, json extra) {
    if (!site_.has_page(page)) throw NotFound("page not found: " + page.str());
    json cells = json::array();
    for (const auto& w : writes) {
        check_addr(w.addr);
        json c = {{"ref", to_a1(w.addr)}};
        if (w.source) {
            if (!valid_utf8(*w.source)) throw ValidationError("cell source is not valid UTF-8");
            CellInput in = parse_input(*w.source);
            if (in.formula) c["src"] = print(*in.formula);
            else if (in.literal) c["src"] = literal_source(*in.literal);
            else c["src"] = "";
        }
        if (w.attrs) {
            if (!w.attrs->options_ref.empty()) parse(w.attrs->options_ref);
            for (const auto& o : w.attrs->options)
                if (!valid_utf8(o)) throw ValidationError("option is not valid UTF-8");
            if (w.attrs->transaction && !valid_utf8(*w.attrs->transaction))
                throw ValidationError("transaction is not valid UTF-8");
            c["attrs"] = w.attrs->empty() ? json(nullptr) : attrs_to_json(*w.attrs);
        }
        if (w.format) {
            if (!valid_utf8(*w.format)) throw ValidationError("format is not valid UTF-8");
            c["format"] = w.format->empty() ? json(nullptr) : json(*w.format);
        }
        cells.push_back(std::move(c));
    }
    extra["cells"] = std::move(cells);
    return commit(make_event(user, action, page, std::move(extra)));
}

std::optional<Event> Workbook::create_page(const std::string& user, const Path& page,
                                           const std::optional<std::string>& template_name) {
    std::string name = template_name ? to_lower(*template_name) : std::string(kBlankTemplate);
    if (name.empty()) name = kBlankTemplate;
    if (site_.has_page(page)) {
        if (name == kBlankTemplate) return std::nullopt;
        throw AlreadyExists("page already exists: " + page.str());
    }
    if (name != kBlankTemplate && !site_.templates.contains(name)) throw NotFound("template not found: " + name);
    json payload = {{"pages", json::array({{{"path", page.str()}, {"template", name}}})}};
    return commit(make_event(user, Action::CreatePage, page, std::move(payload)));
}

Event Workbook::create_pages(const std::string& user, const Path& base, const std::string& spec) {
    PathSpec parsed = parse_path_spec(spec);
    std::int64_t now = clock_();
    Expansion exp = expand_path_spec(parsed, base, site_, now);
    json pages = json::array();
    for (const auto& [path, tpl] : exp.to_create) pages.push_back({{"path", path.str()}, {"template", tpl}});
    json payload = {{"spec", spec}, {"pages", pages}, {"counters", exp.counters}, {"redirect", exp.redirect.str()}};
    return commit(make_event(user, Action::CreatePage, base, std::move(payload), now));
}

Event Workbook::delete_page(const std::string& user, const Path& page) {
    if (!site_.has_page(page)) throw NotFound("page not found: " + page.str());
    return commit(make_event(user, Action::DeletePage, page, json::object()));
}

Event Workbook::save_template(const std::string& user, const Path& page, const std::string& name) {
    if (!site_.has_page(page)) throw NotFound("page not found: " + page.str());
    std::string n = to_lower(name);
    if (!valid_segment(n) || n == kBlankTemplate) throw ValidationError("bad template name: " + name);
    return commit(make_event(user, Action::SaveTemplate, page, {{"name", n}}));
}

std::optional<Event> Workbook::structural(const std::string& user, const Path& page, Axis axis, bool insert, int at,
                                          int count, json extra) {
    int limit = axis == Axis::Rows ? kMaxRow : kMaxCol;
    if (at < 1 || at > limit) throw BoundsError("position out of range: " + std::to_string(at));
    if (count < 0 || count > limit) throw BoundsError("count out of range: " + std::to_string(count));
    if (!site_.has_page(page)) throw NotFound("page not found: " + page.str());
    if (count == 0) return std::nullopt;
    std::string op = std::string(insert ? "insert_" : "delete_") + (axis == Axis::Rows ? "rows" : "cols");
    extra["op"] = op;
    extra["at"] = at;
    extra["count"] = count;
    return commit(make_event(user, Action::StructuralEdit, page, std::move(extra)));
}

Event Workbook::grant(const std::string& user, const Path& path, ViewKind view, const std::string& group) {
    if (!site_.groups.contains(group)) throw NotFound("group not found: " + group);
    return commit(make_event(user, Action::Grant, path, {{"view", to_string(view)}, {"group", group}}));
}

Event Workbook::revoke(const std::string& user, const Path& path, ViewKind view, const std::string& group) {
    auto it = site_.grants.find(path);
    bool present = it != site_.grants.end() && it->second.contains(view) && it->second.at(view).contains(group);
    if (!present) throw NotFound("no such grant");
    return commit(make_event(user, Action::Revoke, path, {{"view", to_string(view)}, {"group", group}}));
}

Event Workbook::user_admin(const std::string& user, const json& op) {
    if (!op.is_object() || !op.contains("op") || !op["op"].is_string()) throw ValidationError("missing op");
    std::string kind = op["op"];
    auto str = [&](const char* k) {
        if (!op.contains(k) || !op[k].is_string()) throw ValidationError(std::string("missing field: ") + k);
        return op[k].get<std::string>();
    };
    json payload = {{"op", kind}};
    if (kind == "useradd" || kind == "passwd") {
        std::string id = str("user");
        if (!valid_name(id)) throw ValidationError("bad user id: " + id);
        bool exists = site_.users.contains(id);
        if (kind == "useradd" && exists) throw AlreadyExists("user exists: " + id);
        if (kind == "passwd" && !exists) throw NotFound("user not found: " + id);
        payload["user"] = id;
        payload["salt"] = str("salt");
        payload["hash"] = str("hash");
    } else if (kind == "userdel") {
        std::string id = str("user");
        if (!site_.users.contains(id)) throw NotFound("user not found: " + id);
        payload["user"] = id;
    } else if (kind == "groupadd" || kind == "groupdel") {
        std::string g = str("group");
        if (!valid_name(g)) throw ValidationError("bad group name: " + g);
        bool exists = site_.groups.contains(g);
        if (kind == "groupadd" && exists) throw AlreadyExists("group exists: " + g);
        if (kind == "groupdel" && !exists) throw NotFound("group not found: " + g);
        if (kind == "groupdel" && g == kAdminGroup) throw ValidationError("the admin group cannot be removed");
        payload["group"] = g;
    } else if (kind == "member_add" || kind == "member_remove") {
        std::string g = str("group");
        std::string id = str("user");
        if (!site_.groups.contains(g)) throw NotFound("group not found: " + g);
        if (!site_.users.contains(id)) throw NotFound("user not found: " + id);
        payload["group"] = g;
        payload["user"] = id;
    } else {
        throw ValidationError("unknown admin op: " + kind);
    }
    return commit(make_event(user, Action::UserAdmin, Path(), std::move(payload)));
}

// ---------------------------------------------------------------------------
// Replay and oracles

void Workbook::replay(const Event& e, bool verify) {
    if (e.seq != site_.seq + 1)
        throw JournalError(e.seq, "expected seq " + std::to_string(site_.seq + 1));
    Event copy = e;
    copy.changes.clear();
    try {
        execute(copy);
    } catch (const JournalError&) {
        throw;
    } catch (const std::exception& ex) {
        throw JournalError(e.seq, ex.what());
    }
    if (verify && copy.changes != e.changes)
        throw JournalError(e.seq, "recorded cell changes differ from replayed changes");
}

std::map<CellKey, Value> Workbook::full_recompute() const {
    Site copy = site_;
    DepGraph graph;
    std::set<CellKey> all;
    for (const auto& [path, page] : site_.pages()) {
        for (const auto& [addr, cell] : page->cells) {
            if (!cell.is_formula()) continue;
            all.insert({path, addr});
            copy.mutable_page(path).cells[addr].cached = Value();
        }
    }
    for (const auto& key : all) graph.add_formula(copy, key, *copy.cell(key.page, key.addr));
    double now = site_.ts.empty() ? 0.0 : serial_from_ms(parse_timestamp(site_.ts));
    recalculate(copy, graph, all, now, static_cast<std::uint64_t>(site_.seq));
    std::map<CellKey, Value> out;
    for (const auto& key : all) out.emplace(key, copy.cell(key.page, key.addr)->cached);
    return out;
}

std::map<CellKey, Value> Workbook::formula_values() const {
    std::map<CellKey, Value> out;
    for (const auto& [path, page] : site_.pages())
        for (const auto& [addr, cell] : page->cells)
            if (cell.is_formula()) out.emplace(CellKey{path, addr}, cell.cached);
    return out;
}

bool Workbook::graph_consistent() const {
    DepGraph fresh;
    for (const auto& [path, page] : site_.pages())
        for (const auto& [addr, cell] : page->cells)
            if (cell.is_formula()) fresh.add_formula(site_, CellKey{path, addr}, cell);
    return fresh.edges() == graph_.edges() && fresh.volatiles() == graph_.volatiles();
}

}  // namespace hn
