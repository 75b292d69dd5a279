#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "hn/store.hpp"

namespace hn {

/// Dependency edges between cells. Static references are stored as ranges on
/// concrete pages; z-references are registered under their literal prefix and
/// expanded into ordinary edges on every page that can influence them.
class DepGraph {
public:
    void clear();

    /// Registers the references of formula cell `key`.
    void add_formula(const Site& site, const CellKey& key, const Cell& cell);
    void remove_formula(const CellKey& key);

    /// Expands z-edges onto a newly created page and adds the cells whose
    /// result may change because the page now exists.
    void page_created(const Path& page, std::set<CellKey>& dirty);
    /// Drops z-edges on a removed page and adds affected cells to `dirty`.
    void page_removed(const Path& page, std::set<CellKey>& dirty);

    /// Formula cells that read `key` (directly or through a range/z-ref).
    void dependents(const CellKey& key, std::vector<CellKey>& out) const;

    const std::set<CellKey>& volatiles() const { return volatile_; }

    /// Every (dependent, page, rect) edge, for consistency checks.
    std::set<std::pair<CellKey, StaticRef>> edges() const;

private:
    struct ZEntry {
        ZPattern pattern;
        Rect target;
        Path prefix;
    };
    struct Node {
        std::map<StaticRef, int> refs;  // edge multiplicities
        std::vector<ZEntry> zrefs;
        std::map<Path, std::vector<StaticRef>> expanded;  // z-edges per page
    };
    struct PageIndex {
        std::unordered_map<CellAddr, std::set<CellKey>> single;
        std::vector<std::pair<Rect, CellKey>> ranges;
    };

    void add_edge(const CellKey& from, Node& node, const StaticRef& ref);
    void remove_edge(const CellKey& from, Node& node, const StaticRef& ref);
    void expand(const CellKey& key, Node& node, const ZEntry& z, const Path& page);

    std::map<CellKey, Node> nodes_;
    std::unordered_map<Path, PageIndex> index_;
    std::map<Path, std::set<CellKey>> zreg_;  // literal prefix -> dependents
    std::set<CellKey> volatile_;
};

/// A cell write as submitted by a user. Unset fields are left unchanged.
struct CellWrite {
    CellAddr addr;
    std::optional<std::string> source;
    std::optional<CellAttrs> attrs;
    std::optional<std::string> format;  // "" clears
};

/// The commit pipeline: the only code path that mutates a Site. Every public
/// mutation builds an Event, executes it, records the cell-level changes and
/// hands the event to the sink. Replay executes journaled events through the
/// same path.
class Workbook {
public:
    Workbook();
    /// Adopts a site restored from a snapshot; cached values are trusted.
    explicit Workbook(Site site);

    const Site& site() const { return site_; }
    /// Immutable copy sharing unchanged pages with the live site.
    std::shared_ptr<const Site> snapshot() const { return std::make_shared<const Site>(site_); }

    using Clock = std::function<std::int64_t()>;
    using Sink = std::function<void(const Event&)>;
    void set_clock(Clock clock) { clock_ = std::move(clock); }
    void set_sink(Sink sink) { sink_ = std::move(sink); }

    /// Throws NotFound for a missing page, ParseError for bad formulas.
    Event set_cells(const std::string& user, const Path& page, const std::vector<CellWrite>& writes,
                    Action action = Action::SetCells, json extra = json::object());

    /// nullopt when the page exists and no template was requested.
    std::optional<Event> create_page(const std::string& user, const Path& page,
                                     const std::optional<std::string>& template_name = std::nullopt);
    /// Expands a path spec against `base` and creates the missing pages in
    /// one event. The event payload carries "redirect".
    Event create_pages(const std::string& user, const Path& base, const std::string& spec);
    Event delete_page(const std::string& user, const Path& page);
    Event save_template(const std::string& user, const Path& page, const std::string& name);

    /// Count 0 is a no-op without an event. Throws BoundsError for at < 1.
    std::optional<Event> structural(const std::string& user, const Path& page, Axis axis, bool insert, int at,
                                    int count, json extra = json::object());

    Event grant(const std::string& user, const Path& path, ViewKind view, const std::string& group);
    Event revoke(const std::string& user, const Path& path, ViewKind view, const std::string& group);
    /// ops: useradd/passwd {user,salt,hash}, userdel {user}, groupadd/groupdel
    /// {group}, member_add/member_remove {group,user}.
    Event user_admin(const std::string& user, const json& op);

    /// Applies a journaled event. With `verify`, the recomputed cell changes
    /// must equal the recorded ones (JournalError otherwise).
    void replay(const Event& e, bool verify = true);

    /// Evaluates every formula from scratch on a copy of the site.
    std::map<CellKey, Value> full_recompute() const;
    /// Cached values of every formula cell.
    std::map<CellKey, Value> formula_values() const;
    /// True when the incremental graph equals one rebuilt from scratch.
    bool graph_consistent() const;

    std::int64_t now_ms() const { return clock_(); }

private:
    struct Txn;

    Event make_event(const std::string& user, Action action, const Path& path, json payload,
                     std::optional<std::int64_t> ms = std::nullopt) const;
    Event commit(Event e);
    void execute(Event& e);
    void write_cells(const Event& e, Txn& txn, std::set<CellKey>& seeds);
    void instantiate(const Path& page, const std::string& template_name, Txn& txn, std::set<CellKey>& seeds);
    void remove_page(const Path& page, Txn& txn, std::set<CellKey>& seeds);
    void apply_structural(const Event& e, Txn& txn, std::set<CellKey>& seeds);
    void apply_admin(const Event& e);
    void rebuild_graph();

    Site site_;
    DepGraph graph_;
    Clock clock_;
    Sink sink_;
};

/// Evaluates the dirty closure of `seeds` on `site` in topological order.
/// Cells on dependency cycles become #CIRC!. `before` (optional) is called
/// with each cell key just before its cached value is overwritten.
void recalculate(Site& site, const DepGraph& graph, const std::set<CellKey>& seeds, double now, std::uint64_t seed,
                 const std::function<void(const CellKey&)>& before = {});

}  // namespace hn
