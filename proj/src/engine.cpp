#include "hn/engine.hpp"

#include <cmath>

#include "hn/stdlib.hpp"
#include "hn/store.hpp"
#include "hn/text.hpp"
#include "hn/zquery.hpp"

namespace hn {

namespace {

int type_rank(const Value& v) {
    if (v.is_number()) return 0;
    if (v.is_text()) return 1;
    if (v.is_bool()) return 2;
    return 3;
}

Value zero_like(const Value& other) {
    if (other.is_text()) return Value(std::string());
    if (other.is_bool()) return Value(false);
    return Value(0.0);
}

Operand read_rect(const Site& site, const Path& page, const Rect& rect) {
    Operand out;
    out.rows = rect.rows();
    out.cols = rect.cols();
    out.is_ref = true;
    const Page* p = site.page(page);
    out.values.reserve(static_cast<std::size_t>(out.rows) * static_cast<std::size_t>(out.cols));
    for (int r = rect.first.row; r <= rect.last.row; ++r) {
        for (int c = rect.first.col; c <= rect.last.col; ++c) {
            const Cell* cell = p->find(CellAddr{c, r});
            out.values.push_back(cell ? cell->cached : Value());
        }
    }
    return out;
}

Operand eval_ref(const RefNode& ref, const EvalContext& ctx) {
    Rect rect = rect_of(ref);
    if (is_zref(ref)) {
        auto pattern = resolve_zpattern(ref.page, ctx.base);
        if (!pattern) return Operand::scalar(ErrorKind::Ref);
        auto pages = match_pages(*pattern, ctx.site, ctx.now, ctx.seed);
        Operand out;
        out.is_ref = true;
        out.cols = rect.cols();
        out.rows = static_cast<int>(pages.size()) * rect.rows();
        for (const auto& page : pages) {
            auto part = read_rect(ctx.site, page, rect);
            out.values.insert(out.values.end(), part.values.begin(), part.values.end());
        }
        return out;
    }
    auto page = resolve_page(ref.page, ctx.base);
    if (!page || !ctx.site.has_page(*page)) return Operand::scalar(ErrorKind::Ref);
    return read_rect(ctx.site, *page, rect);
}

Value arithmetic(BinaryOp op, const Value& a, const Value& b) {
    if (a.is_error()) return a;
    if (b.is_error()) return b;
    auto ca = coerce_number(a);
    if (failed(ca)) return std::get<ErrorKind>(ca);
    auto cb = coerce_number(b);
    if (failed(cb)) return std::get<ErrorKind>(cb);
    double x = std::get<double>(ca);
    double y = std::get<double>(cb);
    switch (op) {
        case BinaryOp::Add: return checked_number(x + y);
        case BinaryOp::Sub: return checked_number(x - y);
        case BinaryOp::Mul: return checked_number(x * y);
        case BinaryOp::Div:
            if (y == 0) return ErrorKind::Div0;
            return checked_number(x / y);
        case BinaryOp::Pow:
            if (x == 0 && y == 0) return ErrorKind::Num;
            if (x == 0 && y < 0) return ErrorKind::Div0;
            return checked_number(std::pow(x, y));
        default: return ErrorKind::Value;
    }
}

Value comparison(BinaryOp op, const Value& a, const Value& b) {
    if (a.is_error()) return a;
    if (b.is_error()) return b;
    if (a.is_render() || b.is_render()) return ErrorKind::Value;
    int c = compare_values(a, b);
    switch (op) {
        case BinaryOp::Eq: return c == 0;
        case BinaryOp::Ne: return c != 0;
        case BinaryOp::Lt: return c < 0;
        case BinaryOp::Le: return c <= 0;
        case BinaryOp::Gt: return c > 0;
        case BinaryOp::Ge: return c >= 0;
        default: return ErrorKind::Value;
    }
}

Value binary(BinaryOp op, const Value& a, const Value& b) {
    switch (op) {
        case BinaryOp::Concat: {
            if (a.is_error()) return a;
            if (b.is_error()) return b;
            auto ta = coerce_text(a);
            if (failed(ta)) return std::get<ErrorKind>(ta);
            auto tb = coerce_text(b);
            if (failed(tb)) return std::get<ErrorKind>(tb);
            return std::get<std::string>(ta) + std::get<std::string>(tb);
        }
        case BinaryOp::Eq:
        case BinaryOp::Ne:
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return comparison(op, a, b);
        default: return arithmetic(op, a, b);
    }
}

}  // namespace

int compare_values(const Value& a, const Value& b) {
    if (a.is_blank() && b.is_blank()) return 0;
    if (a.is_blank()) return compare_values(zero_like(b), b);
    if (b.is_blank()) return compare_values(a, zero_like(a));
    int ra = type_rank(a);
    int rb = type_rank(b);
    if (ra != rb) return ra < rb ? -1 : 1;
    if (a.is_number()) return a.number() < b.number() ? -1 : (a.number() > b.number() ? 1 : 0);
    if (a.is_text()) return icompare(a.text(), b.text());
    if (a.is_bool()) return static_cast<int>(a.boolean()) - static_cast<int>(b.boolean());
    return 0;
}

Value to_scalar(const Operand& op) {
    if (op.values.size() == 1) return op.values.front();
    if (op.values.empty()) return Value();
    return ErrorKind::Value;
}

Operand evaluate_operand(const Ast& ast, const EvalContext& ctx) {
    struct Visitor {
        const EvalContext& ctx;
        Operand operator()(const NumberLit& n) const { return Operand::scalar(n.value); }
        Operand operator()(const TextLit& t) const { return Operand::scalar(t.value); }
        Operand operator()(const BoolLit& b) const { return Operand::scalar(b.value); }
        Operand operator()(const ErrorLit& e) const { return Operand::scalar(e.kind); }
        Operand operator()(const RefNode& r) const { return eval_ref(r, ctx); }
        Operand operator()(const FuncCall& f) const {
            Args args(f.args, ctx);
            return call(f.name, args);
        }
        Operand operator()(const Binary& b) const {
            Value lhs = to_scalar(evaluate_operand(b.lhs, ctx));
            Value rhs = to_scalar(evaluate_operand(b.rhs, ctx));
            return Operand::scalar(binary(b.op, lhs, rhs));
        }
        Operand operator()(const Unary& u) const {
            Value v = to_scalar(evaluate_operand(u.operand, ctx));
            if (u.op == UnaryOp::Plus) return Operand::scalar(v);
            auto n = coerce_number(v);
            if (failed(n)) return Operand::scalar(std::get<ErrorKind>(n));
            return Operand::scalar(-std::get<double>(n));
        }
        Operand operator()(const Percent& p) const {
            auto n = coerce_number(to_scalar(evaluate_operand(p.operand, ctx)));
            if (failed(n)) return Operand::scalar(std::get<ErrorKind>(n));
            return Operand::scalar(std::get<double>(n) / 100.0);
        }
    };
    return std::visit(Visitor{ctx}, ast->node);
}

Value evaluate(const Ast& ast, const EvalContext& ctx) {
    Value v = to_scalar(evaluate_operand(ast, ctx));
    if (v.is_number()) return checked_number(v.number());
    return v;
}

bool evaluate_predicate(const Ast& predicate, const Path& page, const Site& site, double now, std::uint64_t seed) {
    if (!site.has_page(page)) return false;
    EvalContext ctx{site, page, CellAddr{1, 1}, now, seed};
    auto b = coerce_boolean(evaluate(predicate, ctx));
    if (failed(b)) return false;
    return std::get<bool>(b);
}

}  // namespace hn
