#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hn/engine.hpp"

namespace hn {

struct FunctionInfo {
    int min_arity = 0;
    int max_arity = 0;  // -1 for variadic
    bool lazy = false;
    bool is_volatile = false;
};

/// nullopt for unregistered names.
std::optional<FunctionInfo> function_info(std::string_view name);

/// Sorted list of every registered function name.
std::vector<std::string> function_names();

/// Arguments of one call. Each argument is evaluated on first access, so
/// lazy functions only pay for the branches they touch.
class Args {
public:
    Args(const std::vector<Ast>& asts, const EvalContext& ctx) : asts_(asts), ctx_(ctx), cache_(asts.size()) {}

    std::size_t size() const { return asts_.size(); }
    const Operand& operand(std::size_t i);
    /// Single value of argument i (multi-cell refs give #VALUE!).
    Value scalar(std::size_t i);
    const EvalContext& ctx() const { return ctx_; }

private:
    const std::vector<Ast>& asts_;
    const EvalContext& ctx_;
    std::vector<std::optional<Operand>> cache_;
};

/// Calls a built-in. Unknown names give #NAME?, wrong arity #VALUE!.
Operand call(std::string_view name, Args& args);

/// Deterministic uniform draw in [0, 1) for RAND within a pass.
double pass_random(const EvalContext& ctx, std::uint64_t ordinal);

}  // namespace hn
