#include "hn/formula.hpp"

#include <cctype>
#include <charconv>

#include "hn/error.hpp"
#include "hn/stdlib.hpp"
#include "hn/text.hpp"

namespace hn {

namespace {

Ast make(auto node) { return std::make_shared<const AstNode>(AstNode{std::move(node)}); }

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

class Parser {
public:
    Parser(std::string_view src, std::size_t offset, bool predicate)
        : src_(src), offset_(offset), predicate_(predicate) {}

    Ast parse_all() {
        skip_ws();
        if (at_end()) fail("empty expression");
        Ast e = comparison();
        skip_ws();
        if (!at_end()) fail(std::string("unexpected '") + peek() + "'");
        return e;
    }

private:
    std::string_view src_;
    std::size_t offset_;
    bool predicate_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(offset_ + pos_, msg); }
    [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
        throw ParseError(offset_ + at, msg);
    }

    bool at_end() const { return pos_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }
    void skip_ws() {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) ++pos_;
    }
    bool accept(std::string_view tok) {
        if (src_.substr(pos_).starts_with(tok)) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    Ast comparison() {
        Ast lhs = concat();
        for (;;) {
            skip_ws();
            BinaryOp op;
            if (accept("<>")) op = BinaryOp::Ne;
            else if (accept("<=")) op = BinaryOp::Le;
            else if (accept(">=")) op = BinaryOp::Ge;
            else if (accept("=")) op = BinaryOp::Eq;
            else if (accept("<")) op = BinaryOp::Lt;
            else if (accept(">")) op = BinaryOp::Gt;
            else return lhs;
            lhs = make(Binary{op, lhs, concat()});
        }
    }

    Ast concat() {
        Ast lhs = additive();
        for (;;) {
            skip_ws();
            if (!accept("&")) return lhs;
            lhs = make(Binary{BinaryOp::Concat, lhs, additive()});
        }
    }

    Ast additive() {
        Ast lhs = multiplicative();
        for (;;) {
            skip_ws();
            BinaryOp op;
            if (accept("+")) op = BinaryOp::Add;
            else if (accept("-")) op = BinaryOp::Sub;
            else return lhs;
            lhs = make(Binary{op, lhs, multiplicative()});
        }
    }

    Ast multiplicative() {
        Ast lhs = power();
        for (;;) {
            skip_ws();
            BinaryOp op;
            if (accept("*")) op = BinaryOp::Mul;
            else if (accept("/")) op = BinaryOp::Div;
            else return lhs;
            lhs = make(Binary{op, lhs, power()});
        }
    }

    Ast power() {
        Ast lhs = unary();
        for (;;) {
            skip_ws();
            if (!accept("^")) return lhs;
            lhs = make(Binary{BinaryOp::Pow, lhs, unary()});
        }
    }

    Ast unary() {
        skip_ws();
        if (accept("-")) return make(Unary{UnaryOp::Neg, unary()});
        if (accept("+")) return make(Unary{UnaryOp::Plus, unary()});
        return postfix();
    }

    Ast postfix() {
        Ast e = primary();
        for (;;) {
            skip_ws();
            if (!accept("%")) return e;
            e = make(Percent{e});
        }
    }

    Ast primary() {
        skip_ws();
        if (at_end()) fail("unexpected end of formula");
        char c = peek();
        if (c == '(') {
            ++pos_;
            Ast e = comparison();
            skip_ws();
            if (!accept(")")) fail("expected ')'");
            return e;
        }
        if (c == '"') return text_literal();
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            return number_literal();
        }
        if (c == '#') return error_literal();
        if (c == '/' || (c == '.' && peek(1) == '/') || (c == '.' && peek(1) == '.' && peek(2) == '/')) {
            return path_ref();
        }
        if (c == '!') return bang_ref();
        if (c == '$' || std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name_or_ref();
        fail(std::string("unexpected '") + c + "'");
    }

    Ast text_literal() {
        std::size_t start = pos_;
        ++pos_;
        std::string out;
        for (;;) {
            if (at_end()) fail_at(start, "unterminated string");
            char c = src_[pos_++];
            if (c == '"') {
                if (peek() == '"') {
                    out.push_back('"');
                    ++pos_;
                    continue;
                }
                break;
            }
            out.push_back(c);
        }
        return make(TextLit{std::move(out)});
    }

    Ast number_literal() {
        std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (peek() == '.') {
            ++pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (std::isdigit(static_cast<unsigned char>(peek(1))) ||
             ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
            pos_ += 2;
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        std::string_view text = src_.substr(start, pos_ - start);
        double v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) fail_at(start, "bad number");
        return make(NumberLit{v});
    }

    Ast error_literal() {
        for (ErrorKind k : {ErrorKind::Div0, ErrorKind::Value, ErrorKind::Ref, ErrorKind::Name, ErrorKind::Num,
                            ErrorKind::NA, ErrorKind::Circ}) {
            auto name = to_string(k);
            if (src_.size() - pos_ >= name.size() && iequals(src_.substr(pos_, name.size()), name)) {
                pos_ += name.size();
                return make(ErrorLit{k});
            }
        }
        fail("unknown error literal");
    }

    // Tries to read `$?letters$?digits` at pos_ without consuming on failure.
    std::optional<CellRef> try_cell_ref() {
        std::size_t p = pos_;
        CellRef ref;
        if (p < src_.size() && src_[p] == '$') {
            ref.col_abs = true;
            ++p;
        }
        std::size_t ls = p;
        while (p < src_.size() && std::isalpha(static_cast<unsigned char>(src_[p]))) ++p;
        auto col = column_index(src_.substr(ls, p - ls));
        if (!col) return std::nullopt;
        if (p < src_.size() && src_[p] == '$') {
            ref.row_abs = true;
            ++p;
        }
        std::size_t ds = p;
        long row = 0;
        while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
            row = row * 10 + (src_[p] - '0');
            if (row > kMaxRow) return std::nullopt;
            ++p;
        }
        if (p == ds || row < 1) return std::nullopt;
        if (p < src_.size() && (is_ident_char(src_[p]) || src_[p] == '(')) return std::nullopt;
        ref.addr = CellAddr{*col, static_cast<int>(row)};
        pos_ = p;
        return ref;
    }

    RefNode finish_ref(PageSpec page, std::size_t at) {
        auto first = try_cell_ref();
        if (!first) fail_at(at, "expected a cell reference");
        RefNode ref{std::move(page), *first, std::nullopt};
        if (peek() == ':') {
            std::size_t colon = pos_;
            ++pos_;
            auto last = try_cell_ref();
            if (!last) fail_at(colon, "expected a cell reference after ':'");
            ref.last = *last;
        }
        return ref;
    }

    Ast name_or_ref() {
        std::size_t start = pos_;
        if (auto ref = [&]() -> std::optional<RefNode> {
                auto first = try_cell_ref();
                if (!first) return std::nullopt;
                RefNode r{PageSpec{}, *first, std::nullopt};
                if (peek() == ':') {
                    std::size_t colon = pos_;
                    ++pos_;
                    auto last = try_cell_ref();
                    if (!last) fail_at(colon, "expected a cell reference after ':'");
                    r.last = *last;
                }
                return r;
            }()) {
            return make(*ref);
        }
        if (peek() == '$') fail("expected a cell reference");
        while (!at_end() && is_ident_char(peek())) ++pos_;
        std::string name = to_lower(src_.substr(start, pos_ - start));
        std::size_t after_name = pos_;
        skip_ws();
        if (peek() == '(') {
            validate_function_name(name, start);
            ++pos_;
            std::vector<Ast> args;
            skip_ws();
            if (!accept(")")) {
                for (;;) {
                    args.push_back(comparison());
                    skip_ws();
                    if (accept(")")) break;
                    if (!accept(",")) fail("expected ',' or ')'");
                }
            }
            if (predicate_) {
                auto info = function_info(name);
                if (info && info->is_volatile) {
                    fail_at(start, "volatile function '" + name + "' is not allowed in a predicate");
                }
            }
            return make(FuncCall{std::move(name), std::move(args)});
        }
        pos_ = after_name;
        if (name == "true") return make(BoolLit{true});
        if (name == "false") return make(BoolLit{false});
        fail_at(start, "unknown name '" + name + "'");
    }

    void validate_function_name(const std::string& name, std::size_t at) const {
        // [a-z][a-z0-9_]*(\.[a-z0-9][a-z0-9_]*)*
        bool ok = !name.empty() && std::isalpha(static_cast<unsigned char>(name[0]));
        bool after_dot = false;
        for (std::size_t i = 0; ok && i < name.size(); ++i) {
            char c = name[i];
            if (c == '.') {
                if (after_dot || i + 1 == name.size()) ok = false;
                after_dot = true;
            } else {
                if (after_dot && c == '_') ok = false;
                after_dot = false;
            }
        }
        if (!ok) fail_at(at, "invalid function name '" + name + "'");
    }

    // Reads a `[...]` predicate starting at '['; `]` inside string literals is
    // permitted, nested brackets are not.
    Ast predicate_segment() {
        std::size_t open = pos_;
        ++pos_;
        std::size_t inner = pos_;
        bool in_string = false;
        while (!at_end()) {
            char c = peek();
            if (in_string) {
                if (c == '"') {
                    if (peek(1) == '"') {
                        pos_ += 2;
                        continue;
                    }
                    in_string = false;
                }
            } else if (c == '"') {
                in_string = true;
            } else if (c == '[') {
                fail("z-segments may not nest");
            } else if (c == ']') {
                break;
            }
            ++pos_;
        }
        if (at_end()) fail_at(open, "unterminated z-segment");
        std::string_view body = src_.substr(inner, pos_ - inner);
        ++pos_;
        return Parser(body, offset_ + inner, true).parse_all();
    }

    Ast path_ref() {
        std::size_t start = pos_;
        if (predicate_) fail("path references are not allowed in a predicate");
        PageSpec page;
        if (accept("./")) {
            page.flavor = RefFlavor::BaseRelative;
            page.up = 0;
        } else if (peek() == '.') {
            page.flavor = RefFlavor::BaseRelative;
            while (accept("../")) ++page.up;
        } else {
            ++pos_;
            page.flavor = RefFlavor::RootAbsolute;
        }
        bool has_predicate = false;
        for (;;) {
            if (peek() == '[') {
                page.segments.push_back(PathSegment{"", predicate_segment()});
                has_predicate = true;
                if (!accept("/")) fail("expected '/' after z-segment");
                continue;
            }
            std::size_t comp = pos_;
            while (!at_end() && (is_name_char(peek()) || peek() == '$')) ++pos_;
            if (peek() == '/' && pos_ > comp) {
                std::string seg = to_lower(src_.substr(comp, pos_ - comp));
                if (!valid_segment(seg)) fail_at(comp, "illegal path segment '" + seg + "'");
                page.segments.push_back(PathSegment{std::move(seg), nullptr});
                ++pos_;
                continue;
            }
            pos_ = comp;
            break;
        }
        bool has_step = !page.segments.empty() || page.up > 0;
        if (!has_step) fail_at(start, "a path reference needs at least one page segment");
        if (has_predicate) {
            page.anchor = page.flavor;
            page.flavor = RefFlavor::Z;
        }
        return make(finish_ref(std::move(page), pos_));
    }

    Ast bang_ref() {
        std::size_t start = pos_;
        if (predicate_) fail("path references are not allowed in a predicate");
        PageSpec page;
        page.flavor = RefFlavor::Bang;
        ++pos_;
        for (;;) {
            std::size_t comp = pos_;
            while (!at_end() && (is_name_char(peek()) || peek() == '$')) ++pos_;
            if (peek() == '!' && pos_ > comp) {
                std::string seg = to_lower(src_.substr(comp, pos_ - comp));
                if (!valid_segment(seg)) fail_at(comp, "illegal path segment '" + seg + "'");
                page.segments.push_back(PathSegment{std::move(seg), nullptr});
                ++pos_;
                continue;
            }
            pos_ = comp;
            break;
        }
        if (page.segments.empty()) fail_at(start, "a bang reference needs at least one page segment");
        return make(finish_ref(std::move(page), pos_));
    }
};

enum Prec { kCompare = 1, kConcat, kAdd, kMul, kPow, kUnary, kPercent, kPrimary };

int binary_prec(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return kAdd;
        case BinaryOp::Mul:
        case BinaryOp::Div: return kMul;
        case BinaryOp::Pow: return kPow;
        case BinaryOp::Concat: return kConcat;
        default: return kCompare;
    }
}

int prec_of(const Ast& a) {
    if (auto* b = std::get_if<Binary>(&a->node)) return binary_prec(b->op);
    if (std::holds_alternative<Unary>(a->node)) return kUnary;
    if (std::holds_alternative<Percent>(a->node)) return kPercent;
    return kPrimary;
}

std::string cell_text(const CellRef& r) {
    std::string out;
    if (r.col_abs) out += '$';
    out += column_name(r.addr.col);
    if (r.row_abs) out += '$';
    out += std::to_string(r.addr.row);
    return out;
}

void print_into(const Ast& a, std::string& out);

void print_wrapped(const Ast& a, bool parens, std::string& out) {
    if (parens) out += '(';
    print_into(a, out);
    if (parens) out += ')';
}

void print_page(const PageSpec& page, std::string& out) {
    auto segs = [&](char sep) {
        for (const auto& s : page.segments) {
            if (s.predicate) {
                out += '[';
                print_into(s.predicate, out);
                out += ']';
            } else {
                out += s.name;
            }
            out += sep;
        }
    };
    RefFlavor anchor = page.flavor == RefFlavor::Z ? page.anchor : page.flavor;
    switch (anchor) {
        case RefFlavor::Local: return;
        case RefFlavor::Bang:
            out += '!';
            segs('!');
            return;
        case RefFlavor::RootAbsolute:
            out += '/';
            segs('/');
            return;
        case RefFlavor::BaseRelative:
            if (page.up == 0) out += "./";
            for (int i = 0; i < page.up; ++i) out += "../";
            segs('/');
            return;
        case RefFlavor::Z: return;
    }
}

void print_into(const Ast& a, std::string& out) {
    struct Visitor {
        std::string& out;
        void operator()(const NumberLit& n) const { out += format_number(n.value); }
        void operator()(const TextLit& t) const {
            out += '"';
            for (char c : t.value) {
                if (c == '"') out += '"';
                out += c;
            }
            out += '"';
        }
        void operator()(const BoolLit& b) const { out += b.value ? "true" : "false"; }
        void operator()(const ErrorLit& e) const { out += to_string(e.kind); }
        void operator()(const RefNode& r) const {
            print_page(r.page, out);
            out += cell_text(r.first);
            if (r.last) {
                out += ':';
                out += cell_text(*r.last);
            }
        }
        void operator()(const FuncCall& f) const {
            out += f.name;
            out += '(';
            for (std::size_t i = 0; i < f.args.size(); ++i) {
                if (i) out += ',';
                print_into(f.args[i], out);
            }
            out += ')';
        }
        void operator()(const Binary& b) const {
            int p = binary_prec(b.op);
            print_wrapped(b.lhs, prec_of(b.lhs) < p, out);
            out += to_string(b.op);
            print_wrapped(b.rhs, prec_of(b.rhs) <= p, out);
        }
        void operator()(const Unary& u) const {
            out += u.op == UnaryOp::Neg ? '-' : '+';
            print_wrapped(u.operand, prec_of(u.operand) < kUnary, out);
        }
        void operator()(const Percent& p) const {
            print_wrapped(p.operand, prec_of(p.operand) < kPercent, out);
            out += '%';
        }
    };
    std::visit(Visitor{out}, a->node);
}

bool equal_page(const PageSpec& a, const PageSpec& b) {
    if (a.flavor != b.flavor || a.up != b.up || a.segments.size() != b.segments.size()) return false;
    if (a.flavor == RefFlavor::Z && a.anchor != b.anchor) return false;
    for (std::size_t i = 0; i < a.segments.size(); ++i) {
        const auto& x = a.segments[i];
        const auto& y = b.segments[i];
        if (x.name != y.name || bool(x.predicate) != bool(y.predicate)) return false;
        if (x.predicate && !equal(x.predicate, y.predicate)) return false;
    }
    return true;
}

void collect_into(const Ast& a, const Path& base, CollectedRefs& out) {
    struct Visitor {
        const Path& base;
        CollectedRefs& out;
        void operator()(const NumberLit&) const {}
        void operator()(const TextLit&) const {}
        void operator()(const BoolLit&) const {}
        void operator()(const ErrorLit&) const {}
        void operator()(const RefNode& r) const {
            if (is_zref(r)) {
                if (auto pat = resolve_zpattern(r.page, base)) out.zrefs.push_back({std::move(*pat), rect_of(r)});
                return;
            }
            if (auto page = resolve_page(r.page, base)) out.statics.insert({std::move(*page), rect_of(r)});
        }
        void operator()(const FuncCall& f) const {
            if (auto info = function_info(f.name); info && info->is_volatile) out.is_volatile = true;
            for (const auto& arg : f.args) collect_into(arg, base, out);
        }
        void operator()(const Binary& b) const {
            collect_into(b.lhs, base, out);
            collect_into(b.rhs, base, out);
        }
        void operator()(const Unary& u) const { collect_into(u.operand, base, out); }
        void operator()(const Percent& p) const { collect_into(p.operand, base, out); }
    };
    std::visit(Visitor{base, out}, a->node);
}

std::optional<int> shift_coord(int c, const Shift& s) {
    if (s.count > 0) return c >= s.at ? c + s.count : c;
    int n = -s.count;
    int end = s.at + n - 1;
    if (c < s.at) return c;
    if (c <= end) return std::nullopt;
    return c - n;
}

// Shifts an inclusive [lo, hi] span; nullopt when fully deleted.
std::optional<std::pair<int, int>> shift_span(int lo, int hi, const Shift& s) {
    if (s.count > 0) return std::pair{*shift_coord(lo, s), *shift_coord(hi, s)};
    int n = -s.count;
    int end = s.at + n - 1;
    if (lo >= s.at && hi <= end) return std::nullopt;
    int nlo = lo < s.at ? lo : (lo > end ? lo - n : s.at);
    int nhi = hi > end ? hi - n : (hi >= s.at ? s.at - 1 : hi);
    return std::pair{nlo, nhi};
}

Ast rewrite_into(const Ast& a, const Path& base, const Shift& shift) {
    struct Visitor {
        const Ast& self;
        const Path& base;
        const Shift& shift;
        Ast operator()(const NumberLit&) const { return self; }
        Ast operator()(const TextLit&) const { return self; }
        Ast operator()(const BoolLit&) const { return self; }
        Ast operator()(const ErrorLit&) const { return self; }
        Ast operator()(const RefNode& r) const {
            if (is_zref(r)) return self;
            auto page = resolve_page(r.page, base);
            if (!page || *page != shift.page) return self;
            RefNode out = r;
            auto get = [&](const CellRef& c) { return shift.axis == Axis::Rows ? c.addr.row : c.addr.col; };
            auto set = [&](CellRef& c, int v) { (shift.axis == Axis::Rows ? c.addr.row : c.addr.col) = v; };
            if (!r.last) {
                auto moved = shift_coord(get(r.first), shift);
                if (!moved) return make(ErrorLit{ErrorKind::Ref});
                set(out.first, *moved);
            } else {
                int lo = get(r.first);
                int hi = get(*r.last);
                bool swapped = lo > hi;
                if (swapped) std::swap(lo, hi);
                auto span = shift_span(lo, hi, shift);
                if (!span) return make(ErrorLit{ErrorKind::Ref});
                set(swapped ? *out.last : out.first, span->first);
                set(swapped ? out.first : *out.last, span->second);
            }
            int limit = shift.axis == Axis::Rows ? kMaxRow : kMaxCol;
            if (get(out.first) > limit || (out.last && get(*out.last) > limit)) return make(ErrorLit{ErrorKind::Ref});
            return make(std::move(out));
        }
        Ast operator()(const FuncCall& f) const {
            FuncCall out{f.name, {}};
            for (const auto& arg : f.args) out.args.push_back(rewrite_into(arg, base, shift));
            return make(std::move(out));
        }
        Ast operator()(const Binary& b) const {
            return make(Binary{b.op, rewrite_into(b.lhs, base, shift), rewrite_into(b.rhs, base, shift)});
        }
        Ast operator()(const Unary& u) const { return make(Unary{u.op, rewrite_into(u.operand, base, shift)}); }
        Ast operator()(const Percent& p) const { return make(Percent{rewrite_into(p.operand, base, shift)}); }
    };
    return std::visit(Visitor{a, base, shift}, a->node);
}

}  // namespace

Ast parse(std::string_view source) {
    std::size_t lead = 0;
    while (lead < source.size() && source[lead] == ' ') ++lead;
    if (lead >= source.size() || source[lead] != '=') throw ParseError(lead, "a formula must start with '='");
    return Parser(source.substr(lead + 1), lead + 1, false).parse_all();
}

Ast parse_predicate(std::string_view source) { return Parser(source, 0, true).parse_all(); }

std::string print(const Ast& ast) { return "=" + print_expr(ast); }

std::string print_expr(const Ast& ast) {
    std::string out;
    print_into(ast, out);
    return out;
}

std::string_view to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Pow: return "^";
        case BinaryOp::Concat: return "&";
        case BinaryOp::Eq: return "=";
        case BinaryOp::Ne: return "<>";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
    }
    return "?";
}

bool equal(const Ast& a, const Ast& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b || a->node.index() != b->node.index()) return false;
    struct Visitor {
        const AstNode& other;
        bool operator()(const NumberLit& n) const { return n.value == std::get<NumberLit>(other.node).value; }
        bool operator()(const TextLit& t) const { return t.value == std::get<TextLit>(other.node).value; }
        bool operator()(const BoolLit& x) const { return x.value == std::get<BoolLit>(other.node).value; }
        bool operator()(const ErrorLit& e) const { return e.kind == std::get<ErrorLit>(other.node).kind; }
        bool operator()(const RefNode& r) const {
            const auto& o = std::get<RefNode>(other.node);
            return r.first == o.first && r.last == o.last && equal_page(r.page, o.page);
        }
        bool operator()(const FuncCall& f) const {
            const auto& o = std::get<FuncCall>(other.node);
            if (f.name != o.name || f.args.size() != o.args.size()) return false;
            for (std::size_t i = 0; i < f.args.size(); ++i) {
                if (!equal(f.args[i], o.args[i])) return false;
            }
            return true;
        }
        bool operator()(const Binary& x) const {
            const auto& o = std::get<Binary>(other.node);
            return x.op == o.op && equal(x.lhs, o.lhs) && equal(x.rhs, o.rhs);
        }
        bool operator()(const Unary& u) const {
            const auto& o = std::get<Unary>(other.node);
            return u.op == o.op && equal(u.operand, o.operand);
        }
        bool operator()(const Percent& p) const { return equal(p.operand, std::get<Percent>(other.node).operand); }
    };
    return std::visit(Visitor{*b}, a->node);
}

bool is_zref(const RefNode& ref) { return ref.page.flavor == RefFlavor::Z; }

Path ZPattern::literal_prefix() const {
    std::vector<std::string> segs;
    for (const auto& s : segments) {
        if (s.predicate) break;
        segs.push_back(s.name);
    }
    return Path::from_segments(std::move(segs));
}

std::optional<Path> resolve_page(const PageSpec& page, const Path& base) {
    std::vector<std::string> segs;
    switch (page.flavor) {
        case RefFlavor::Local: return base;
        case RefFlavor::RootAbsolute:
        case RefFlavor::Bang: break;
        case RefFlavor::BaseRelative: {
            if (static_cast<std::size_t>(page.up) > base.depth()) return std::nullopt;
            segs = base.prefix(base.depth() - static_cast<std::size_t>(page.up)).segments();
            break;
        }
        case RefFlavor::Z: return std::nullopt;
    }
    for (const auto& s : page.segments) segs.push_back(s.name);
    return Path::from_segments(std::move(segs));
}

std::optional<ZPattern> resolve_zpattern(const PageSpec& page, const Path& base) {
    if (page.flavor != RefFlavor::Z) return std::nullopt;
    ZPattern out;
    if (page.anchor == RefFlavor::BaseRelative) {
        if (static_cast<std::size_t>(page.up) > base.depth()) return std::nullopt;
        Path anchor = base.prefix(base.depth() - static_cast<std::size_t>(page.up));
        for (const auto& s : anchor.segments()) out.segments.push_back(PathSegment{s, nullptr});
    }
    for (const auto& s : page.segments) out.segments.push_back(s);
    return out;
}

Rect rect_of(const RefNode& ref) {
    if (!ref.last) return Rect{ref.first.addr, ref.first.addr};
    CellAddr a = ref.first.addr;
    CellAddr b = ref.last->addr;
    return Rect{CellAddr{std::min(a.col, b.col), std::min(a.row, b.row)},
                CellAddr{std::max(a.col, b.col), std::max(a.row, b.row)}};
}

CollectedRefs collect_refs(const Ast& ast, const Path& base) {
    CollectedRefs out;
    collect_into(ast, base, out);
    return out;
}

std::vector<Rect> predicate_refs(const Ast& predicate) {
    CollectedRefs refs;
    collect_into(predicate, Path(), refs);
    std::vector<Rect> out;
    for (const auto& s : refs.statics) out.push_back(s.rect);
    return out;
}

Ast rewrite_refs(const Ast& ast, const Path& base, const Shift& shift) {
    if (shift.count == 0) return ast;
    return rewrite_into(ast, base, shift);
}

std::optional<CellAddr> shift_addr(CellAddr a, const Shift& shift) {
    int& c = shift.axis == Axis::Rows ? a.row : a.col;
    auto moved = shift_coord(c, shift);
    if (!moved) return std::nullopt;
    c = *moved;
    int limit = shift.axis == Axis::Rows ? kMaxRow : kMaxCol;
    if (c > limit) return std::nullopt;
    return a;
}

}  // namespace hn
