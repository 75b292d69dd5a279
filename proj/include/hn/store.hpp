#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hn/formula.hpp"
#include "hn/path.hpp"
#include "hn/value.hpp"

namespace hn {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Cells and pages

/// Marks a cell as an input of the wikipage view.
struct CellAttrs {
    std::optional<ControlKind> wiki_input;
    std::vector<std::string> options;   // literal choices for select/radio
    std::string options_ref;            // or a range formula such as "=d1:d3"
    std::optional<std::string> transaction;

    bool empty() const { return !wiki_input && options.empty() && options_ref.empty() && !transaction; }
    bool operator==(const CellAttrs&) const = default;
};

struct Cell {
    std::optional<std::string> formula;  // canonical text, starts with '='
    Ast ast;                             // parsed formula, never serialized
    std::optional<Value> literal;
    Value cached;
    CellAttrs attrs;
    std::optional<std::string> format;

    /// Text that re-enters this cell exactly (formula, or literal entry text).
    std::string source() const;
    bool is_formula() const { return formula.has_value(); }
    /// True for a cell holding nothing worth storing.
    bool is_default() const { return !formula && !literal && attrs.empty() && !format; }
};

/// Parsed form of what a user typed into a cell.
struct CellInput {
    std::optional<Ast> formula;
    std::optional<Value> literal;  // nullopt with no formula means "clear"
};

/// "=..." parses as a formula (throws ParseError), "'x" is the text "x",
/// numbers and TRUE/FALSE become typed literals, "" clears.
CellInput parse_input(std::string_view source);

/// Entry text for a literal so that parse_input gives the same value back.
std::string literal_source(const Value& v);

enum class ViewKind : std::uint8_t { Spreadsheet, Table, Wikipage, Webpage, Log };

std::string_view to_string(ViewKind v);
std::optional<ViewKind> parse_view_kind(std::string_view s);

using Grants = std::map<ViewKind, std::set<std::string>>;

struct Page {
    Path path;
    std::map<CellAddr, Cell> cells;
    std::map<std::string, std::string> views;
    std::optional<std::string> template_origin;

    const Cell* find(CellAddr a) const {
        auto it = cells.find(a);
        return it == cells.end() ? nullptr : &it->second;
    }
};

struct Template {
    std::string name;
    std::map<CellAddr, Cell> cells;
    std::map<std::string, std::string> views;
    Grants perms;
};

/// Name of the implicit empty template.
inline constexpr std::string_view kBlankTemplate = "blank";

struct User {
    std::string id;
    std::string salt;  // hex
    std::string hash;  // hex, empty when no password is set
};

struct Group {
    std::string name;
    std::set<std::string> members;
};

inline constexpr std::string_view kAdminGroup = "admin";

/// The whole page tree plus site-level tables. Pages are shared between
/// snapshots and copied on first write (see mutable_page).
class Site {
public:
    Site();

    const Page* page(const Path& p) const;
    bool has_page(const Path& p) const { return pages_.contains(p); }
    /// Copy-on-write access; throws NotFound when the page is absent.
    Page& mutable_page(const Path& p);
    Page& add_page(const Path& p);
    void remove_page(const Path& p);

    /// Cached value of a cell; #REF! when the page does not exist.
    Value value(const Path& p, CellAddr a) const;
    const Cell* cell(const Path& p, CellAddr a) const;

    const std::map<Path, std::shared_ptr<Page>>& pages() const { return pages_; }

    /// Pages whose path starts with `prefix`, in canonical order.
    template <typename Fn>
    void for_each_under(const Path& prefix, Fn&& fn) const {
        for (auto it = pages_.lower_bound(prefix); it != pages_.end(); ++it) {
            if (!it->first.starts_with(prefix)) break;
            fn(*it->second);
        }
    }

    std::map<std::string, Template> templates;
    std::map<std::string, User> users;
    std::map<std::string, Group> groups;
    std::map<Path, Grants> grants;
    std::map<std::string, std::int64_t> counters;
    std::int64_t seq = 0;
    std::string ts;  // timestamp of the last applied event

private:
    std::map<Path, std::shared_ptr<Page>> pages_;
};

// ---------------------------------------------------------------------------
// Path specs for structural buttons

struct LiteralSeg {
    std::string text;
    bool operator==(const LiteralSeg&) const = default;
};

enum class SegSource : std::uint8_t { Date, Incr };

struct TemplatedSeg {
    std::string template_name;
    SegSource source = SegSource::Date;
    std::string fmt;  // date token, or the prefix for incr
    bool operator==(const TemplatedSeg&) const = default;
};

struct PathSpec {
    RefFlavor anchor = RefFlavor::RootAbsolute;  // or BaseRelative
    int up = 0;
    std::vector<std::variant<LiteralSeg, TemplatedSeg>> segments;
};

/// Parses `/some/page/[blank, date, yyyy]/...`. Throws SpecError.
PathSpec parse_path_spec(std::string_view text);

struct Expansion {
    std::vector<std::pair<Path, std::string>> to_create;  // (page, template)
    Path redirect;
    std::map<std::string, std::int64_t> counters;  // updated incr counters
};

/// Renders templated segments (date tokens yyyy, mm, dddd; incr counters
/// scoped to the parent path) and lists the pages that do not exist yet.
/// `now_ms` is milliseconds since the Unix epoch, UTC. Throws SpecError.
Expansion expand_path_spec(const PathSpec& spec, const Path& base, const Site& site, std::int64_t now_ms);

// ---------------------------------------------------------------------------
// Journal

enum class Action : std::uint8_t {
    SetCells,
    CreatePage,
    DeletePage,
    SaveTemplate,
    WikiSubmit,
    StructuralEdit,
    Grant,
    Revoke,
    UserAdmin,
};

std::string_view to_string(Action a);
std::optional<Action> parse_action(std::string_view s);

struct CellState {
    std::string source;
    Value value;
    bool operator==(const CellState& o) const { return source == o.source && identical(value, o.value); }
};

struct CellChange {
    Path path;
    CellAddr addr;
    CellState before;
    CellState after;
    bool operator==(const CellChange&) const = default;
};

/// One user action. `payload` holds the action's input; `changes` holds every
/// cell coordinate whose source or value the action changed, with prior state.
struct Event {
    std::int64_t seq = 0;
    std::string ts;
    std::string user;
    Action action = Action::SetCells;
    Path path;
    json payload = json::object();
    std::vector<CellChange> changes;
};

std::string format_timestamp(std::int64_t ms_since_epoch);
/// Throws Error on malformed input.
std::int64_t parse_timestamp(std::string_view iso);
/// Spreadsheet serial date (days since 1899-12-30) for a Unix time in ms.
double serial_from_ms(std::int64_t ms_since_epoch);

json value_to_json(const Value& v);
json attrs_to_json(const CellAttrs& a);
CellAttrs attrs_from_json(const json& j);
Value value_from_json(const json& j);

std::string encode_event(const Event& e);
/// Throws JournalError(expected_seq, ...) on malformed lines.
Event decode_event(std::string_view line, std::int64_t expected_seq);

json site_to_json(const Site& site);
/// Throws Error on malformed snapshots. Formulas are re-parsed.
Site site_from_json(const json& j);
std::string snapshot_text(const Site& site);

/// Reads a journal file; checks that seq numbers are gapless from 1.
/// Throws JournalError with the failing position.
std::vector<Event> read_journal(const std::filesystem::path& file);

/// Data directory holding `journal.log` and `snapshot.json`.
class DataDir {
public:
    explicit DataDir(std::filesystem::path root);
    ~DataDir();
    DataDir(const DataDir&) = delete;
    DataDir& operator=(const DataDir&) = delete;

    /// From HN_DATA_DIR, defaulting to ./hn-data.
    static std::filesystem::path from_env();

    /// Takes an exclusive advisory lock; throws Error if another process has it.
    void lock();

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path journal_file() const { return root_ / "journal.log"; }
    std::filesystem::path snapshot_file() const { return root_ / "snapshot.json"; }

    void append(const Event& e);
    void write_snapshot(const Site& site);
    std::optional<json> read_snapshot() const;

private:
    std::filesystem::path root_;
    int lock_fd_ = -1;
};

}  // namespace hn
