#include "hn/audit.hpp"

#include <algorithm>

#include "hn/access.hpp"
#include "hn/error.hpp"

namespace hn {

json entry_to_json(const HistoryEntry& e) {
    json j = {{"seq", e.seq},
              {"ts", e.ts},
              {"user", e.user},
              {"action", to_string(e.action)},
              {"path", e.path.str()},
              {"summary", e.summary}};
    if (e.change) {
        j["cell"] = {{"path", e.change->path.str()}, {"ref", to_a1(e.change->addr)}};
        j["before"] = {{"src", e.change->before.source}, {"val", value_to_json(e.change->before.value)}};
        j["after"] = {{"src", e.change->after.source}, {"val", value_to_json(e.change->after.value)}};
    }
    return j;
}

void AuditLog::add(const Event& e) {
    std::size_t i = events_.size();
    events_.push_back(e);
    std::set<Path> touched{e.path};
    for (std::size_t k = 0; k < e.changes.size(); ++k) {
        const auto& c = e.changes[k];
        cells_[CellKey{c.path, c.addr}].emplace_back(i, k);
        touched.insert(c.path);
    }
    for (const auto& p : touched) pages_[p].push_back(i);
    users_[e.user].push_back(i);
}

HistoryEntry AuditLog::summarize(const Event& e) const {
    HistoryEntry h{e.seq, e.ts, e.user, e.action, e.path, {}, std::nullopt};
    std::string s = std::string(to_string(e.action)) + " " + e.path.str();
    const json& p = e.payload;
    switch (e.action) {
        case Action::SetCells:
        case Action::WikiSubmit:
            if (p.contains("cells")) s += " (" + std::to_string(p["cells"].size()) + " cells)";
            break;
        case Action::CreatePage:
            if (p.contains("pages")) s += " (" + std::to_string(p["pages"].size()) + " pages)";
            break;
        case Action::StructuralEdit:
            s += " " + p.value("op", std::string()) + " at " + std::to_string(p.value("at", 0)) + " count " +
                 std::to_string(p.value("count", 0));
            break;
        case Action::SaveTemplate: s += " as " + p.value("name", std::string()); break;
        case Action::Grant:
        case Action::Revoke:
            s += " " + p.value("view", std::string()) + " " + p.value("group", std::string());
            break;
        case Action::UserAdmin: s += " " + p.value("op", std::string()); break;
        case Action::DeletePage: break;
    }
    h.summary = std::move(s);
    return h;
}

std::vector<HistoryEntry> AuditLog::cell_history(const Path& page, CellAddr addr) const {
    std::vector<HistoryEntry> out;
    auto it = cells_.find(CellKey{page, addr});
    if (it == cells_.end()) return out;
    for (auto [i, k] : it->second) {
        HistoryEntry h = summarize(events_[i]);
        h.change = events_[i].changes[k];
        out.push_back(std::move(h));
    }
    return out;
}

std::vector<HistoryEntry> AuditLog::page_history(const Path& page) const {
    std::vector<HistoryEntry> out;
    auto it = pages_.find(page);
    if (it == pages_.end()) return out;
    for (std::size_t i : it->second) out.push_back(summarize(events_[i]));
    return out;
}

std::vector<HistoryEntry> AuditLog::user_trail(const std::string& user, std::optional<std::int64_t> from_ms,
                                               std::optional<std::int64_t> to_ms) const {
    std::vector<HistoryEntry> out;
    auto it = users_.find(user);
    if (it == users_.end()) return out;
    for (std::size_t i : it->second) {
        std::int64_t t = parse_timestamp(events_[i].ts);
        if (from_ms && t < *from_ms) continue;
        if (to_ms && t > *to_ms) continue;
        out.push_back(summarize(events_[i]));
    }
    return out;
}

std::vector<HistoryEntry> checked_cell_history(const AuditLog& log, const Site& site, const std::string& requester,
                                               const Path& page, CellAddr addr) {
    require(site, requester, page, ViewKind::Log);
    return log.cell_history(page, addr);
}

std::vector<HistoryEntry> checked_user_trail(const AuditLog& log, const Site& site, const std::string& requester,
                                             const std::string& user, std::optional<std::int64_t> from_ms,
                                             std::optional<std::int64_t> to_ms) {
    if (!is_admin(site, requester)) throw PermissionDenied("user trail is restricted to admins");
    return log.user_trail(user, from_ms, to_ms);
}

}  // namespace hn
