#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hn/store.hpp"

namespace hn {

struct HistoryEntry {
    std::int64_t seq = 0;
    std::string ts;
    std::string user;
    Action action = Action::SetCells;
    Path path;               // the event's page
    std::string summary;     // e.g. "SetCells /a/ (3 cells)" or "insert_rows at 2 count 1"
    std::optional<CellChange> change;  // set for cell-level entries
};

json entry_to_json(const HistoryEntry& e);

/// Index over the journal. The journal stays the single source of truth;
/// this only remembers where each cell and user appears.
class AuditLog {
public:
    void add(const Event& e);
    std::size_t size() const { return events_.size(); }
    const std::vector<Event>& events() const { return events_; }

    /// Every recorded change of one coordinate, in seq order.
    std::vector<HistoryEntry> cell_history(const Path& page, CellAddr addr) const;
    /// Events on one page (path match or cell changes there), in seq order.
    std::vector<HistoryEntry> page_history(const Path& page) const;
    /// Events attributed to `user` with from <= ts <= to, in seq order.
    std::vector<HistoryEntry> user_trail(const std::string& user, std::optional<std::int64_t> from_ms = std::nullopt,
                                         std::optional<std::int64_t> to_ms = std::nullopt) const;

private:
    HistoryEntry summarize(const Event& e) const;

    std::vector<Event> events_;
    std::map<CellKey, std::vector<std::pair<std::size_t, std::size_t>>> cells_;  // (event, change)
    std::map<Path, std::vector<std::size_t>> pages_;
    std::map<std::string, std::vector<std::size_t>> users_;
};

/// Checked queries: cell history needs the log view at the page; the user
/// trail is admin-only. Throw PermissionDenied.
std::vector<HistoryEntry> checked_cell_history(const AuditLog& log, const Site& site, const std::string& requester,
                                               const Path& page, CellAddr addr);
std::vector<HistoryEntry> checked_user_trail(const AuditLog& log, const Site& site, const std::string& requester,
                                             const std::string& user, std::optional<std::int64_t> from_ms,
                                             std::optional<std::int64_t> to_ms);

}  // namespace hn
