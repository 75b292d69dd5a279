#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hn/path.hpp"
#include "hn/value.hpp"

namespace hn {

struct AstNode;
using Ast = std::shared_ptr<const AstNode>;

/// How a reference names its page.
enum class RefFlavor : std::uint8_t {
    Local,         // a3
    RootAbsolute,  // /page/a4
    BaseRelative,  // ./x/a4, ../a4
    Bang,          // !page!a4 (legacy syntax, root-absolute)
    Z,             // /some/page/[a1 > 44]/b7
};

/// A1 coordinate with `$` markers kept from the source.
struct CellRef {
    CellAddr addr;
    bool col_abs = false;
    bool row_abs = false;
    bool operator==(const CellRef&) const = default;
};

/// One component of a page path inside a formula: a literal name or a
/// bracketed predicate (z-segment).
struct PathSegment {
    std::string name;  // empty when predicate is set
    Ast predicate;
};

/// Page part of a reference. For BaseRelative, `up` counts `../` steps
/// (0 means `./`). Z references remember whether they were anchored at the
/// root or relative to the containing page in `anchor`.
struct PageSpec {
    RefFlavor flavor = RefFlavor::Local;
    RefFlavor anchor = RefFlavor::RootAbsolute;
    int up = 0;
    std::vector<PathSegment> segments;
};

struct NumberLit {
    double value;
};
struct TextLit {
    std::string value;
};
struct BoolLit {
    bool value;
};
struct ErrorLit {
    ErrorKind kind;
};

/// Single cell (last == nullopt) or rectangular range reference.
struct RefNode {
    PageSpec page;
    CellRef first;
    std::optional<CellRef> last;
};

struct FuncCall {
    std::string name;  // lowercase dotted identifier
    std::vector<Ast> args;
};

enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Pow, Concat, Eq, Ne, Lt, Le, Gt, Ge };
enum class UnaryOp : std::uint8_t { Neg, Plus };

struct Binary {
    BinaryOp op;
    Ast lhs;
    Ast rhs;
};
struct Unary {
    UnaryOp op;
    Ast operand;
};
struct Percent {
    Ast operand;
};

struct AstNode {
    std::variant<NumberLit, TextLit, BoolLit, ErrorLit, RefNode, FuncCall, Binary, Unary, Percent> node;
};

/// Parses formula text beginning with `=`. Throws ParseError.
Ast parse(std::string_view source);

/// Parses the inside of a z-segment. Only local references, literals,
/// operators and non-volatile functions are allowed. Throws ParseError.
Ast parse_predicate(std::string_view source);

/// Canonical text: lowercase names and refs, no spaces, minimal parentheses.
/// `print` prepends `=`; `print_expr` does not.
std::string print(const Ast& ast);
std::string print_expr(const Ast& ast);

/// Structural equality (ignores the shared-pointer identity).
bool equal(const Ast& a, const Ast& b);

std::string_view to_string(BinaryOp op);

/// True when the reference carries at least one predicate segment.
bool is_zref(const RefNode& ref);

/// A z-pattern resolved against its containing page: absolute literal
/// segments interleaved with predicates.
struct ZPattern {
    std::vector<PathSegment> segments;

    /// Longest leading run of literal segments (recomputed on each call).
    Path literal_prefix() const;
    std::size_t length() const { return segments.size(); }
};

/// A resolved dependency range on a concrete page.
struct StaticRef {
    Path page;
    Rect rect;
    auto operator<=>(const StaticRef& o) const {
        if (auto c = page <=> o.page; c != 0) return c;
        if (auto c = rect.first <=> o.rect.first; c != 0) return c;
        return rect.last <=> o.rect.last;
    }
    bool operator==(const StaticRef&) const = default;
};

struct ZDependency {
    ZPattern pattern;
    Rect target;
};

struct CollectedRefs {
    std::set<StaticRef> statics;
    std::vector<ZDependency> zrefs;
    bool is_volatile = false;
};

/// Resolves the page of a non-z reference against `base`; nullopt when it
/// escapes above the root.
std::optional<Path> resolve_page(const PageSpec& page, const Path& base);

/// Resolves a z-reference's pattern against `base`; nullopt on escape.
std::optional<ZPattern> resolve_zpattern(const PageSpec& page, const Path& base);

Rect rect_of(const RefNode& ref);

/// Every reference reachable from `ast`, resolved against `base`. References
/// escaping above the root are dropped (they evaluate to #REF!).
CollectedRefs collect_refs(const Ast& ast, const Path& base);

/// Local references used by a predicate (resolved per candidate page).
std::vector<Rect> predicate_refs(const Ast& predicate);

// Row/column shifts applied by structural edits.
enum class Axis : std::uint8_t { Rows, Cols };

struct Shift {
    Path page;  // the page whose rows/cols move
    Axis axis = Axis::Rows;
    int at = 1;      // first affected index
    int count = 0;   // > 0 insert, < 0 delete |count| starting at `at`
};

/// Rewrites every reference that resolves to `shift.page` (from a formula on
/// `base`). References to deleted cells become #REF!. Z-references are kept
/// as written since their targets are per-matching-page coordinates.
Ast rewrite_refs(const Ast& ast, const Path& base, const Shift& shift);

/// Applies a shift to a single coordinate; nullopt when deleted.
std::optional<CellAddr> shift_addr(CellAddr a, const Shift& shift);

}  // namespace hn
