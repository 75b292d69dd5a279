#pragma once

#include <cstdint>
#include <string>

#include "hn/audit.hpp"
#include "hn/recalc.hpp"
#include "hn/store.hpp"

namespace hn {

struct LoadedSite {
    Workbook workbook;
    AuditLog audit;
    std::int64_t snapshot_seq = 0;
};

/// Snapshot plus the journal suffix after it. Every journal event feeds the
/// audit index. Throws JournalError.
LoadedSite load_site(const DataDir& dir);

struct VerifyReport {
    bool ok = true;
    std::int64_t events = 0;
    std::int64_t failed_seq = 0;
    std::string message;
};

/// Replays the whole journal from empty, checking recorded changes, the
/// snapshot at its seq, the snapshot-plus-suffix state and a full recompute
/// at the end. Read-only.
VerifyReport verify_data(const DataDir& dir);

/// Bit-level equality of two value maps.
bool same_values(const std::map<CellKey, Value>& a, const std::map<CellKey, Value>& b);

}  // namespace hn
