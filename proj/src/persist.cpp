#include "hn/persist.hpp"

#include <fstream>
#include <sstream>

#include "hn/error.hpp"

namespace hn {

LoadedSite load_site(const DataDir& dir) {
    LoadedSite out;
    std::vector<Event> events = read_journal(dir.journal_file());
    if (auto snap = dir.read_snapshot()) {
        out.workbook = Workbook(site_from_json(*snap));
        out.snapshot_seq = out.workbook.site().seq;
        if (out.snapshot_seq > static_cast<std::int64_t>(events.size()))
            throw JournalError(static_cast<std::int64_t>(events.size()) + 1,
                               "journal ends before snapshot seq " + std::to_string(out.snapshot_seq));
    }
    for (const auto& e : events) {
        if (e.seq > out.snapshot_seq) out.workbook.replay(e, true);
        out.audit.add(e);
    }
    return out;
}

bool same_values(const std::map<CellKey, Value>& a, const std::map<CellKey, Value>& b) {
    if (a.size() != b.size()) return false;
    for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib)
        if (!(ia->first == ib->first) || !identical(ia->second, ib->second)) return false;
    return true;
}

VerifyReport verify_data(const DataDir& dir) {
    VerifyReport r;
    auto fail = [&](std::int64_t seq, std::string msg) {
        r.ok = false;
        r.failed_seq = seq;
        r.message = std::move(msg);
        return r;
    };
    std::vector<Event> events;
    try {
        events = read_journal(dir.journal_file());
    } catch (const JournalError& ex) {
        return fail(ex.seq(), ex.what());
    }
    r.events = static_cast<std::int64_t>(events.size());

    std::optional<std::string> snap_text;
    std::int64_t snap_seq = 0;
    if (std::ifstream in(dir.snapshot_file()); in) {
        std::stringstream ss;
        ss << in.rdbuf();
        snap_text = ss.str();
        while (!snap_text->empty() && (snap_text->back() == '\n' || snap_text->back() == '\r')) snap_text->pop_back();
        try {
            snap_seq = json::parse(*snap_text).at("seq").get<std::int64_t>();
        } catch (const std::exception& ex) {
            return fail(0, std::string("unreadable snapshot: ") + ex.what());
        }
        if (snap_seq > r.events)
            return fail(r.events + 1, "journal ends at seq " + std::to_string(r.events) + " but the snapshot is at seq " +
                                          std::to_string(snap_seq));
    }

    Workbook wb;
    auto check_snapshot = [&] {
        return !snap_text || snapshot_text(wb.site()) == *snap_text;
    };
    if (snap_text && snap_seq == 0 && !check_snapshot()) return fail(0, "snapshot differs from replay at seq 0");
    for (const auto& e : events) {
        try {
            wb.replay(e, true);
        } catch (const JournalError& ex) {
            return fail(ex.seq(), ex.what());
        }
        if (snap_text && e.seq == snap_seq && !check_snapshot())
            return fail(e.seq, "snapshot differs from replay at seq " + std::to_string(e.seq));
    }
    if (!same_values(wb.full_recompute(), wb.formula_values()))
        return fail(wb.site().seq, "cached values differ from a full recompute");
    if (snap_text) {
        try {
            LoadedSite loaded = load_site(dir);
            if (snapshot_text(loaded.workbook.site()) != snapshot_text(wb.site()))
                return fail(wb.site().seq, "snapshot plus journal suffix differs from full replay");
        } catch (const JournalError& ex) {
            return fail(ex.seq(), ex.what());
        }
    }
    return r;
}

}  // namespace hn
