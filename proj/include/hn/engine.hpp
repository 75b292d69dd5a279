#pragma once

#include <cstdint>
#include <vector>

#include "hn/formula.hpp"
#include "hn/value.hpp"

namespace hn {

class Site;

/// What a sub-expression evaluates to before it is reduced to a scalar:
/// a plain value, or the values behind a reference (cell, range, z-ref).
struct Operand {
    std::vector<Value> values;  // row-major
    int rows = 1;
    int cols = 1;
    bool is_ref = false;

    static Operand scalar(Value v) { return Operand{{std::move(v)}, 1, 1, false}; }
    bool is_single() const { return values.size() == 1; }
    const Value& at(int r, int c) const { return values[static_cast<std::size_t>(r * cols + c)]; }
};

/// Read-only evaluation context for one cell within one recalc pass.
struct EvalContext {
    const Site& site;
    Path base;
    CellAddr cell;
    double now = 0;          // serial date, fixed per pass
    std::uint64_t seed = 0;  // fixed per pass
    mutable std::uint64_t rand_calls = 0;
};

/// Evaluates a formula to the value stored in its cell. Never throws for
/// evaluation problems; they come back as Error values.
Value evaluate(const Ast& ast, const EvalContext& ctx);

Operand evaluate_operand(const Ast& ast, const EvalContext& ctx);

/// Reduces an operand to one value: single cells pass through, multi-cell
/// references give #VALUE!, empty ones give Blank.
Value to_scalar(const Operand& op);

/// Evaluates a z-segment predicate with local refs bound to `page`. Any error
/// (including a missing page) counts as false.
bool evaluate_predicate(const Ast& predicate, const Path& page, const Site& site, double now = 0,
                        std::uint64_t seed = 0);

/// Desktop-spreadsheet ordering: Number < Text < Boolean, text compared
/// case-insensitively. Blank compares as the other side's zero value.
/// Errors are not comparable and must be filtered by the caller.
int compare_values(const Value& a, const Value& b);

}  // namespace hn
