#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hn/recalc.hpp"
#include "hn/store.hpp"

namespace hn {

class AuditLog;

/// Capability order spreadsheet > table > wikipage > webpage. Log is only
/// implied by itself.
bool implies(ViewKind granted, ViewKind requested);

bool is_admin(const Site& site, const std::string& user);

/// Nearest record per view kind, walking from `path` up to the root.
bool check(const Site& site, const std::string& user, const Path& path, ViewKind view);
/// Throws PermissionDenied.
void require(const Site& site, const std::string& user, const Path& path, ViewKind view);

/// Views `user` may open at `path`, highest first.
std::vector<ViewKind> permitted_views(const Site& site, const std::string& user, const Path& path);
/// Spreadsheet when allowed, else the highest permitted view.
std::optional<ViewKind> default_view(const Site& site, const std::string& user, const Path& path);

/// Choices of a select or radio input: the literal list, or the non-blank
/// values of its options range.
std::vector<std::string> resolve_options(const Site& site, const Path& page, const Cell& cell);

/// Structured document for one view of one page. `log` feeds the log view
/// and may be null. Throws PermissionDenied, NotFound.
json render_view(const Site& site, const AuditLog* log, const std::string& user, const Path& page, ViewKind view);

/// Literal entry text for a value typed into a form or table: a leading "="
/// stays text.
std::string literal_entry(const std::string& raw);

/// Commits the inputs of one transaction. Every target must be a wiki input
/// of that transaction and hold no formula.
Event wiki_submit(Workbook& wb, const std::string& user, const Path& page, const std::string& transaction,
                  const std::map<CellAddr, std::string>& inputs);

/// Header row is the first row of the used range; data rows follow it until
/// the first all-blank row.
struct TableRegion {
    int header_row = 0;  // 0 when the page is empty
    int first_col = 1;
    int last_col = 0;
    int rows = 0;  // data rows
    std::vector<std::string> header;
};

TableRegion table_region(const Page& page);

/// Values are keyed by header text (case-insensitive) or "A".."Z" style
/// column letters. Row indexes are 1-based over the data rows.
Event table_append(Workbook& wb, const std::string& user, const Path& page, const json& values);
Event table_update(Workbook& wb, const std::string& user, const Path& page, int row, const json& values);
Event table_delete(Workbook& wb, const std::string& user, const Path& page, int row);

/// Runs the create button held by `cell`. The event payload has "redirect".
Event activate_create_button(Workbook& wb, const std::string& user, const Path& page, CellAddr cell);

}  // namespace hn
