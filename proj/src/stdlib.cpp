#include "hn/stdlib.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>

#include "hn/error.hpp"
#include "hn/store.hpp"
#include "hn/text.hpp"

namespace hn {

const Operand& Args::operand(std::size_t i) {
    if (!cache_[i]) cache_[i] = evaluate_operand(asts_[i], ctx_);
    return *cache_[i];
}

Value Args::scalar(std::size_t i) { return to_scalar(operand(i)); }

double pass_random(const EvalContext& ctx, std::uint64_t ordinal) {
    std::seed_seq seq{static_cast<std::uint32_t>(ctx.seed), static_cast<std::uint32_t>(ctx.seed >> 32),
                      static_cast<std::uint32_t>(std::hash<std::string>{}(ctx.base.str())),
                      static_cast<std::uint32_t>(ctx.cell.row), static_cast<std::uint32_t>(ctx.cell.col),
                      static_cast<std::uint32_t>(ordinal)};
    std::mt19937_64 gen(seq);
    return std::generate_canonical<double, 53>(gen);
}

namespace {

using Fn = Operand (*)(Args&);

Operand V(Value v) { return Operand::scalar(std::move(v)); }

// --------------------------------------------------------------------------
// Argument helpers

Coerced<double> num(Args& a, std::size_t i) { return coerce_number(a.scalar(i)); }

Coerced<std::string> txt(Args& a, std::size_t i) {
    Value v = a.scalar(i);
    return coerce_text(v);
}

#define HN_TRY(var, expr)                                            \
    auto var##_c = (expr);                                           \
    if (failed(var##_c)) return V(std::get<ErrorKind>(var##_c));     \
    auto var = std::move(std::get<0>(var##_c))

struct Numbers {
    std::vector<double> values;
    std::optional<ErrorKind> error;
};

// Range semantics: numbers count, text/booleans/blanks are skipped, errors
// propagate. Direct scalar arguments are coerced instead.
Numbers gather_numbers(Args& a, std::size_t from = 0) {
    Numbers out;
    for (std::size_t i = from; i < a.size(); ++i) {
        const Operand& op = a.operand(i);
        if (op.is_ref) {
            for (const auto& v : op.values) {
                if (v.is_error()) {
                    out.error = v.error();
                    return out;
                }
                if (v.is_number()) out.values.push_back(v.number());
            }
        } else {
            auto n = coerce_number(op.values.front());
            if (failed(n)) {
                out.error = std::get<ErrorKind>(n);
                return out;
            }
            out.values.push_back(std::get<double>(n));
        }
    }
    return out;
}

double pow10(int d) { return std::pow(10.0, d); }

// Rounds through a 15-significant-digit decimal so values such as 1.005
// round the way a desktop spreadsheet shows them.
double decimal_correct(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return std::strtod(buf, nullptr);
}

double round_digits(double x, int digits, double (*fn)(double)) {
    if (digits >= 0) {
        double f = pow10(digits);
        return fn(decimal_correct(x * f)) / f;
    }
    double f = pow10(-digits);
    return fn(decimal_correct(x / f)) * f;
}

std::u32string u32(const std::string& s) { return utf8_decode(s); }
std::string u8(const std::u32string& s) { return utf8_encode(s); }

// --------------------------------------------------------------------------
// Logical

Operand logical_fold(Args& a, bool is_and) {
    std::optional<bool> acc;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Operand& op = a.operand(i);
        auto take = [&](bool b) { acc = acc ? (is_and ? (*acc && b) : (*acc || b)) : b; };
        if (op.is_ref) {
            for (const auto& v : op.values) {
                if (v.is_error()) return V(v.error());
                if (v.is_bool()) take(v.boolean());
                else if (v.is_number()) take(v.number() != 0);
            }
        } else {
            auto b = coerce_boolean(op.values.front());
            if (failed(b)) return V(std::get<ErrorKind>(b));
            take(std::get<bool>(b));
        }
    }
    if (!acc) return V(ErrorKind::Value);
    return V(*acc);
}

Operand fn_and(Args& a) { return logical_fold(a, true); }
Operand fn_or(Args& a) { return logical_fold(a, false); }
Operand fn_true(Args&) { return V(true); }
Operand fn_false(Args&) { return V(false); }

Operand fn_not(Args& a) {
    HN_TRY(b, coerce_boolean(a.scalar(0)));
    return V(!b);
}

Operand fn_if(Args& a) {
    HN_TRY(cond, coerce_boolean(a.scalar(0)));
    if (cond) return a.operand(1);
    if (a.size() > 2) return a.operand(2);
    return V(false);
}

// --------------------------------------------------------------------------
// Math

template <double (*F)(double)>
Operand unary_math(Args& a) {
    HN_TRY(x, num(a, 0));
    return V(checked_number(F(x)));
}

double neg_abs(double x) { return std::fabs(x); }
double m_cos(double x) { return std::cos(x); }
double m_sin(double x) { return std::sin(x); }
double m_tan(double x) { return std::tan(x); }
double m_atan(double x) { return std::atan(x); }
double m_exp(double x) { return std::exp(x); }
double m_floor(double x) { return std::floor(x); }
double m_degrees(double x) { return x * 180.0 / std::numbers::pi; }
double m_radians(double x) { return x * std::numbers::pi / 180.0; }

Operand fn_acos(Args& a) {
    HN_TRY(x, num(a, 0));
    if (x < -1 || x > 1) return V(ErrorKind::Num);
    return V(std::acos(x));
}

Operand fn_asin(Args& a) {
    HN_TRY(x, num(a, 0));
    if (x < -1 || x > 1) return V(ErrorKind::Num);
    return V(std::asin(x));
}

Operand fn_atan2(Args& a) {
    HN_TRY(x, num(a, 0));
    HN_TRY(y, num(a, 1));
    if (x == 0 && y == 0) return V(ErrorKind::Div0);
    return V(std::atan2(y, x));
}

Operand fn_even(Args& a) {
    HN_TRY(x, num(a, 0));
    double v = std::ceil(std::fabs(x));
    if (std::fmod(v, 2.0) != 0) v += 1;
    return V(checked_number(x < 0 ? -v : v));
}

Operand fn_odd(Args& a) {
    HN_TRY(x, num(a, 0));
    double v = std::ceil(std::fabs(x));
    if (std::fmod(v, 2.0) == 0) v += 1;
    return V(checked_number(x < 0 ? -v : v));
}

Operand fn_fact(Args& a) {
    HN_TRY(x, num(a, 0));
    if (x < 0) return V(ErrorKind::Num);
    double n = std::floor(x);
    if (n > 170) return V(ErrorKind::Num);
    double r = 1;
    for (int i = 2; i <= static_cast<int>(n); ++i) r *= i;
    return V(r);
}

Operand fn_ln(Args& a) {
    HN_TRY(x, num(a, 0));
    if (x <= 0) return V(ErrorKind::Num);
    return V(std::log(x));
}

Operand fn_log(Args& a) {
    HN_TRY(x, num(a, 0));
    double base = 10;
    if (a.size() > 1) {
        HN_TRY(b, num(a, 1));
        base = b;
    }
    if (x <= 0 || base <= 0) return V(ErrorKind::Num);
    if (base == 1) return V(ErrorKind::Div0);
    if (base == 10) return V(std::log10(x));
    return V(checked_number(std::log(x) / std::log(base)));
}

Operand fn_log10(Args& a) {
    HN_TRY(x, num(a, 0));
    if (x <= 0) return V(ErrorKind::Num);
    return V(std::log10(x));
}

Operand fn_mod(Args& a) {
    HN_TRY(n, num(a, 0));
    HN_TRY(d, num(a, 1));
    if (d == 0) return V(ErrorKind::Div0);
    return V(checked_number(n - d * std::floor(n / d)));
}

Operand fn_pi(Args&) { return V(std::numbers::pi); }

Operand fn_power(Args& a) {
    HN_TRY(x, num(a, 0));
    HN_TRY(y, num(a, 1));
    if (x == 0 && y == 0) return V(ErrorKind::Num);
    if (x == 0 && y < 0) return V(ErrorKind::Div0);
    return V(checked_number(std::pow(x, y)));
}

Operand fn_product(Args& a) {
    auto n = gather_numbers(a);
    if (n.error) return V(*n.error);
    if (n.values.empty()) return V(0.0);
    double r = 1;
    for (double v : n.values) r *= v;
    return V(checked_number(r));
}

Operand fn_rand(Args& a) { return V(pass_random(a.ctx(), a.ctx().rand_calls++)); }

Operand fn_round(Args& a) {
    HN_TRY(x, num(a, 0));
    HN_TRY(d, num(a, 1));
    return V(checked_number(round_digits(x, static_cast<int>(std::trunc(d)), [](double v) { return std::round(v); })));
}

Operand fn_trunc(Args& a) {
    HN_TRY(x, num(a, 0));
    int digits = 0;
    if (a.size() > 1) {
        HN_TRY(d, num(a, 1));
        digits = static_cast<int>(std::trunc(d));
    }
    return V(checked_number(round_digits(x, digits, [](double v) { return std::trunc(v); })));
}

Operand fn_sign(Args& a) {
    HN_TRY(x, num(a, 0));
    return V(x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0));
}

Operand fn_sqrt(Args& a) {
    HN_TRY(x, num(a, 0));
    if (x < 0) return V(ErrorKind::Num);
    return V(std::sqrt(x));
}

Operand fn_sum(Args& a) {
    auto n = gather_numbers(a);
    if (n.error) return V(*n.error);
    double s = 0;
    for (double v : n.values) s += v;
    return V(checked_number(s));
}

// --------------------------------------------------------------------------
// Criteria for COUNTIF / SUMIF

struct Criterion {
    BinaryOp op = BinaryOp::Eq;
    Value operand;
};

Criterion parse_criterion(const Value& c) {
    if (!c.is_text()) return {BinaryOp::Eq, c.is_blank() ? Value(std::string()) : c};
    std::string_view s = c.text();
    Criterion out;
    for (auto [tok, op] : {std::pair{"<=", BinaryOp::Le}, {">=", BinaryOp::Ge}, {"<>", BinaryOp::Ne},
                           {"<", BinaryOp::Lt}, {">", BinaryOp::Gt}, {"=", BinaryOp::Eq}}) {
        if (s.starts_with(tok)) {
            out.op = op;
            s.remove_prefix(std::string_view(tok).size());
            break;
        }
    }
    if (auto n = parse_number(s)) out.operand = *n;
    else if (iequals(s, "TRUE")) out.operand = true;
    else if (iequals(s, "FALSE")) out.operand = false;
    else out.operand = std::string(s);
    return out;
}

bool criterion_equal(const Criterion& c, const Value& v) {
    const Value& o = c.operand;
    if (o.is_number()) return v.is_number() && v.number() == o.number();
    if (o.is_bool()) return v.is_bool() && v.boolean() == o.boolean();
    if (o.is_text()) {
        if (o.text().empty()) return v.is_blank() || (v.is_text() && v.text().empty());
        return v.is_text() && wildcard_match(o.text(), v.text());
    }
    return false;
}

bool criterion_match(const Criterion& c, const Value& v) {
    if (c.op == BinaryOp::Eq) return criterion_equal(c, v);
    if (c.op == BinaryOp::Ne) return !criterion_equal(c, v);
    const Value& o = c.operand;
    if (v.is_error() || v.is_blank()) return false;
    bool same = (o.is_number() && v.is_number()) || (o.is_text() && v.is_text()) || (o.is_bool() && v.is_bool());
    if (same) {
        int cmp = compare_values(v, o);
        switch (c.op) {
            case BinaryOp::Lt: return cmp < 0;
            case BinaryOp::Le: return cmp <= 0;
            case BinaryOp::Gt: return cmp > 0;
            case BinaryOp::Ge: return cmp >= 0;
            default: return false;
        }
    }
    return false;
}

Operand fn_sumif(Args& a) {
    const Operand& range = a.operand(0);
    Criterion crit = parse_criterion(a.scalar(1));
    if (crit.operand.is_error()) return V(crit.operand.error());
    const Operand& sums = a.size() > 2 ? a.operand(2) : range;
    double s = 0;
    for (std::size_t i = 0; i < range.values.size(); ++i) {
        if (!criterion_match(crit, range.values[i])) continue;
        if (i >= sums.values.size()) break;
        const Value& v = sums.values[i];
        if (v.is_error()) return V(v.error());
        if (v.is_number()) s += v.number();
    }
    return V(checked_number(s));
}

// --------------------------------------------------------------------------
// Statistical

Operand fn_average(Args& a) {
    auto n = gather_numbers(a);
    if (n.error) return V(*n.error);
    if (n.values.empty()) return V(ErrorKind::Div0);
    double s = 0;
    for (double v : n.values) s += v;
    return V(checked_number(s / static_cast<double>(n.values.size())));
}

Operand fn_count(Args& a) {
    double count = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Operand& op = a.operand(i);
        if (op.is_ref) {
            for (const auto& v : op.values)
                if (v.is_number()) ++count;
        } else {
            const Value& v = op.values.front();
            if (v.is_number() || v.is_bool() || (v.is_text() && parse_number(v.text()))) ++count;
        }
    }
    return V(count);
}

Operand fn_counta(Args& a) {
    double count = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Operand& op = a.operand(i);
        if (op.is_ref) {
            for (const auto& v : op.values)
                if (!v.is_blank()) ++count;
        } else {
            ++count;
        }
    }
    return V(count);
}

Operand fn_countblank(Args& a) {
    const Operand& op = a.operand(0);
    double count = 0;
    for (const auto& v : op.values)
        if (v.is_blank() || (v.is_text() && v.text().empty())) ++count;
    return V(count);
}

Operand fn_countif(Args& a) {
    const Operand& range = a.operand(0);
    Criterion crit = parse_criterion(a.scalar(1));
    if (crit.operand.is_error()) return V(crit.operand.error());
    double count = 0;
    for (const auto& v : range.values)
        if (criterion_match(crit, v)) ++count;
    return V(count);
}

Operand fn_max(Args& a) {
    auto n = gather_numbers(a);
    if (n.error) return V(*n.error);
    if (n.values.empty()) return V(0.0);
    return V(*std::max_element(n.values.begin(), n.values.end()));
}

Operand fn_min(Args& a) {
    auto n = gather_numbers(a);
    if (n.error) return V(*n.error);
    if (n.values.empty()) return V(0.0);
    return V(*std::min_element(n.values.begin(), n.values.end()));
}

Operand fn_median(Args& a) {
    auto n = gather_numbers(a);
    if (n.error) return V(*n.error);
    if (n.values.empty()) return V(ErrorKind::Num);
    auto& v = n.values;
    std::sort(v.begin(), v.end());
    std::size_t mid = v.size() / 2;
    if (v.size() % 2 == 1) return V(v[mid]);
    return V((v[mid - 1] + v[mid]) / 2.0);
}

Operand fn_mode(Args& a) {
    auto n = gather_numbers(a);
    if (n.error) return V(*n.error);
    std::optional<double> best;
    std::size_t best_count = 1;
    for (std::size_t i = 0; i < n.values.size(); ++i) {
        auto c = static_cast<std::size_t>(std::count(n.values.begin(), n.values.end(), n.values[i]));
        if (c > best_count) {
            best = n.values[i];
            best_count = c;
        }
    }
    if (!best) return V(ErrorKind::NA);
    return V(*best);
}

Operand variance(Args& a, bool sample, bool root) {
    auto n = gather_numbers(a);
    if (n.error) return V(*n.error);
    std::size_t k = n.values.size();
    if (k < (sample ? 2u : 1u)) return V(ErrorKind::Div0);
    double mean = 0;
    for (double v : n.values) mean += v;
    mean /= static_cast<double>(k);
    double ss = 0;
    for (double v : n.values) ss += (v - mean) * (v - mean);
    double var = ss / static_cast<double>(sample ? k - 1 : k);
    return V(checked_number(root ? std::sqrt(var) : var));
}

Operand fn_stdev(Args& a) { return variance(a, true, true); }
Operand fn_stdevp(Args& a) { return variance(a, false, true); }
Operand fn_var(Args& a) { return variance(a, true, false); }
Operand fn_varp(Args& a) { return variance(a, false, false); }

// --------------------------------------------------------------------------
// Text

Operand fn_concatenate(Args& a) {
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        HN_TRY(s, txt(a, i));
        out += s;
    }
    return V(out);
}

Operand fn_exact(Args& a) {
    HN_TRY(x, txt(a, 0));
    HN_TRY(y, txt(a, 1));
    return V(x == y);
}

Coerced<int> int_arg(Args& a, std::size_t i, int fallback) {
    if (i >= a.size()) return fallback;
    auto n = num(a, i);
    if (failed(n)) return std::get<ErrorKind>(n);
    double d = std::trunc(std::get<double>(n));
    if (d > 1e9) d = 1e9;
    if (d < -1e9) d = -1e9;
    return static_cast<int>(d);
}

Operand find_impl(Args& a, bool insensitive) {
    HN_TRY(needle, txt(a, 0));
    HN_TRY(hay, txt(a, 1));
    HN_TRY(start, int_arg(a, 2, 1));
    std::u32string h = u32(hay);
    if (start < 1 || static_cast<std::size_t>(start) > h.size() + 1) return V(ErrorKind::Value);
    if (needle.empty()) return V(start);
    std::u32string n = u32(needle);
    for (std::size_t i = static_cast<std::size_t>(start) - 1; i < h.size(); ++i) {
        if (insensitive) {
            if (wildcard_match(needle + "*", u8(h.substr(i)))) return V(static_cast<double>(i + 1));
        } else if (h.compare(i, n.size(), n) == 0) {
            return V(static_cast<double>(i + 1));
        }
    }
    return V(ErrorKind::Value);
}

Operand fn_find(Args& a) { return find_impl(a, false); }
Operand fn_search(Args& a) { return find_impl(a, true); }

Operand fn_left(Args& a) {
    HN_TRY(s, txt(a, 0));
    HN_TRY(n, int_arg(a, 1, 1));
    if (n < 0) return V(ErrorKind::Value);
    return V(u8(u32(s).substr(0, static_cast<std::size_t>(n))));
}

Operand fn_right(Args& a) {
    HN_TRY(s, txt(a, 0));
    HN_TRY(n, int_arg(a, 1, 1));
    if (n < 0) return V(ErrorKind::Value);
    auto w = u32(s);
    std::size_t k = std::min(w.size(), static_cast<std::size_t>(n));
    return V(u8(w.substr(w.size() - k)));
}

Operand fn_mid(Args& a) {
    HN_TRY(s, txt(a, 0));
    HN_TRY(start, int_arg(a, 1, 1));
    HN_TRY(n, int_arg(a, 2, 0));
    if (start < 1 || n < 0) return V(ErrorKind::Value);
    auto w = u32(s);
    if (static_cast<std::size_t>(start) > w.size()) return V(std::string());
    return V(u8(w.substr(static_cast<std::size_t>(start) - 1, static_cast<std::size_t>(n))));
}

Operand fn_len(Args& a) {
    HN_TRY(s, txt(a, 0));
    return V(static_cast<double>(u32(s).size()));
}

Operand fn_lower(Args& a) {
    HN_TRY(s, txt(a, 0));
    return V(to_lower(s));
}

Operand fn_upper(Args& a) {
    HN_TRY(s, txt(a, 0));
    return V(to_upper(s));
}

bool is_letter(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }

Operand fn_proper(Args& a) {
    HN_TRY(s, txt(a, 0));
    auto w = u32(s);
    bool after_letter = false;
    for (auto& c : w) {
        if (is_letter(c)) {
            bool upper = c <= U'Z';
            if (!after_letter && !upper) c = c - U'a' + U'A';
            if (after_letter && upper) c = c - U'A' + U'a';
            after_letter = true;
        } else {
            after_letter = false;
        }
    }
    return V(u8(w));
}

Operand fn_replace(Args& a) {
    HN_TRY(s, txt(a, 0));
    HN_TRY(start, int_arg(a, 1, 1));
    HN_TRY(n, int_arg(a, 2, 0));
    HN_TRY(repl, txt(a, 3));
    if (start < 1 || n < 0) return V(ErrorKind::Value);
    auto w = u32(s);
    std::size_t from = std::min(w.size(), static_cast<std::size_t>(start) - 1);
    w.replace(from, static_cast<std::size_t>(n), u32(repl));
    return V(u8(w));
}

inline constexpr std::size_t kMaxText = 32767;

Operand fn_rept(Args& a) {
    HN_TRY(s, txt(a, 0));
    HN_TRY(n, int_arg(a, 1, 0));
    if (n < 0) return V(ErrorKind::Value);
    if (s.size() * static_cast<std::size_t>(n) > kMaxText) return V(ErrorKind::Value);
    std::string out;
    for (int i = 0; i < n; ++i) out += s;
    return V(out);
}

Operand fn_substitute(Args& a) {
    HN_TRY(s, txt(a, 0));
    HN_TRY(from, txt(a, 1));
    HN_TRY(to, txt(a, 2));
    HN_TRY(instance, int_arg(a, 3, 0));
    if (a.size() > 3 && instance < 1) return V(ErrorKind::Value);
    if (from.empty()) return V(s);
    std::string out;
    std::size_t pos = 0;
    int seen = 0;
    while (true) {
        std::size_t hit = s.find(from, pos);
        if (hit == std::string::npos) break;
        ++seen;
        out.append(s, pos, hit - pos);
        out += (instance == 0 || seen == instance) ? to : from;
        pos = hit + from.size();
    }
    out.append(s, pos);
    return V(out);
}

Operand fn_t(Args& a) {
    Value v = a.scalar(0);
    if (v.is_error()) return V(v);
    if (v.is_text()) return V(v);
    return V(std::string());
}

Operand fn_trim(Args& a) {
    HN_TRY(s, txt(a, 0));
    std::string out;
    bool pending = false;
    for (char c : s) {
        if (c == ' ') {
            pending = !out.empty();
            continue;
        }
        if (pending) out += ' ';
        pending = false;
        out += c;
    }
    return V(out);
}

Operand fn_value(Args& a) {
    Value v = a.scalar(0);
    if (v.is_error()) return V(v);
    if (v.is_number()) return V(v);
    if (v.is_blank()) return V(0.0);
    if (v.is_text()) {
        if (auto n = parse_number(v.text())) return V(*n);
    }
    return V(ErrorKind::Value);
}

// --------------------------------------------------------------------------
// Date and time. Serial numbers count days from 1899-12-30.

using namespace std::chrono;

constexpr sys_days kEpoch = sys_days{year{1899} / December / 30};

std::optional<year_month_day> civil(double serial) {
    if (serial < 0 || serial > 2958465) return std::nullopt;  // up to 9999-12-31
    return year_month_day{kEpoch + days{static_cast<int>(std::floor(serial))}};
}

Operand fn_date(Args& a) {
    HN_TRY(y, num(a, 0));
    HN_TRY(m, num(a, 1));
    HN_TRY(d, num(a, 2));
    int yy = static_cast<int>(std::trunc(y));
    long mm = static_cast<long>(std::trunc(m));
    long dd = static_cast<long>(std::trunc(d));
    if (yy < 0 || yy >= 10000) return V(ErrorKind::Num);
    if (yy < 1900) yy += 1900;
    long months = yy * 12L + (mm - 1);
    long ny = months >= 0 ? months / 12 : -((-months + 11) / 12);
    long nm = months - ny * 12 + 1;
    sys_days first{year{static_cast<int>(ny)} / month{static_cast<unsigned>(nm)} / 1};
    double serial = static_cast<double>((first - kEpoch).count() + dd - 1);
    if (serial < 0 || serial > 2958465) return V(ErrorKind::Num);
    return V(serial);
}

template <typename F>
Operand date_part(Args& a, F part) {
    HN_TRY(s, num(a, 0));
    auto ymd = civil(s);
    if (!ymd) return V(ErrorKind::Num);
    return V(static_cast<double>(part(*ymd)));
}

Operand fn_year(Args& a) { return date_part(a, [](year_month_day d) { return static_cast<int>(d.year()); }); }
Operand fn_month(Args& a) { return date_part(a, [](year_month_day d) { return static_cast<unsigned>(d.month()); }); }
Operand fn_day(Args& a) { return date_part(a, [](year_month_day d) { return static_cast<unsigned>(d.day()); }); }

Coerced<long> seconds_of_day(Args& a) {
    auto n = num(a, 0);
    if (failed(n)) return std::get<ErrorKind>(n);
    double s = std::get<double>(n);
    if (s < 0) return ErrorKind::Num;
    double frac = s - std::floor(s);
    return static_cast<long>(std::llround(frac * 86400.0)) % 86400;
}

Operand fn_hour(Args& a) {
    HN_TRY(s, seconds_of_day(a));
    return V(static_cast<double>(s / 3600));
}

Operand fn_minute(Args& a) {
    HN_TRY(s, seconds_of_day(a));
    return V(static_cast<double>(s / 60 % 60));
}

Operand fn_second(Args& a) {
    HN_TRY(s, seconds_of_day(a));
    return V(static_cast<double>(s % 60));
}

Operand fn_time(Args& a) {
    HN_TRY(h, num(a, 0));
    HN_TRY(m, num(a, 1));
    HN_TRY(s, num(a, 2));
    double total = std::trunc(h) * 3600 + std::trunc(m) * 60 + std::trunc(s);
    if (total < 0) return V(ErrorKind::Num);
    return V(std::fmod(total, 86400.0) / 86400.0);
}

Operand fn_now(Args& a) { return V(a.ctx().now); }
Operand fn_today(Args& a) { return V(std::floor(a.ctx().now)); }

Operand fn_weekday(Args& a) {
    HN_TRY(s, num(a, 0));
    HN_TRY(type, int_arg(a, 1, 1));
    if (s < 0) return V(ErrorKind::Num);
    long sunday_based = (static_cast<long>(std::floor(s)) + 6) % 7;  // 0 = Sunday
    long monday_based = (sunday_based + 6) % 7;                        // 0 = Monday
    switch (type) {
        case 1: return V(static_cast<double>(sunday_based + 1));
        case 2: return V(static_cast<double>(monday_based + 1));
        case 3: return V(static_cast<double>(monday_based));
        default: return V(ErrorKind::Num);
    }
}

// --------------------------------------------------------------------------
// Lookup

Operand fn_choose(Args& a) {
    HN_TRY(i, int_arg(a, 0, 0));
    if (i < 1 || static_cast<std::size_t>(i) >= a.size()) return V(ErrorKind::Value);
    return a.operand(static_cast<std::size_t>(i));
}

bool same_kind(const Value& a, const Value& b) {
    return (a.is_number() && b.is_number()) || (a.is_text() && b.is_text()) || (a.is_bool() && b.is_bool());
}

bool lookup_equal(const Value& key, const Value& v) {
    if (!same_kind(key, v)) return false;
    if (key.is_text()) return wildcard_match(key.text(), v.text());
    return compare_values(key, v) == 0;
}

// Position (0-based) of `key` in `line`. mode 0 exact, 1 largest <= key,
// -1 smallest >= key. Approximate modes assume sorted input and stop at
// the first entry past the key.
std::optional<std::size_t> lookup(const Value& key, const std::vector<Value>& line, int mode) {
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const Value& v = line[i];
        if (mode == 0) {
            if (lookup_equal(key, v)) return i;
            continue;
        }
        if (!same_kind(key, v)) continue;
        int c = compare_values(v, key);
        if (mode > 0 ? c <= 0 : c >= 0) found = i;
        else break;
    }
    return found;
}

Operand table_lookup(Args& a, bool vertical) {
    Value key = a.scalar(0);
    if (key.is_error()) return V(key);
    const Operand table = a.operand(1);
    HN_TRY(index, int_arg(a, 2, 0));
    bool approx = true;
    if (a.size() > 3) {
        HN_TRY(b, coerce_boolean(a.scalar(3)));
        approx = b;
    }
    int extent = vertical ? table.cols : table.rows;
    int length = vertical ? table.rows : table.cols;
    if (index < 1) return V(ErrorKind::Value);
    if (index > extent) return V(ErrorKind::Ref);
    std::vector<Value> line;
    for (int i = 0; i < length; ++i) line.push_back(vertical ? table.at(i, 0) : table.at(0, i));
    auto hit = lookup(key, line, approx ? 1 : 0);
    if (!hit) return V(ErrorKind::NA);
    int k = static_cast<int>(*hit);
    return V(vertical ? table.at(k, index - 1) : table.at(index - 1, k));
}

Operand fn_vlookup(Args& a) { return table_lookup(a, true); }
Operand fn_hlookup(Args& a) { return table_lookup(a, false); }

Operand fn_match(Args& a) {
    Value key = a.scalar(0);
    if (key.is_error()) return V(key);
    const Operand& arr = a.operand(1);
    HN_TRY(mode, int_arg(a, 2, 1));
    if (arr.rows != 1 && arr.cols != 1) return V(ErrorKind::NA);
    auto hit = lookup(key, arr.values, mode > 0 ? 1 : (mode < 0 ? -1 : 0));
    if (!hit) return V(ErrorKind::NA);
    return V(static_cast<double>(*hit + 1));
}

Operand fn_index(Args& a) {
    const Operand arr = a.operand(0);
    HN_TRY(r, int_arg(a, 1, 0));
    HN_TRY(c, int_arg(a, 2, 0));
    if (a.size() == 2 && arr.rows == 1) std::swap(r, c);
    if (a.size() == 2 && arr.cols == 1 && arr.rows == 1) c = 1;
    if (r < 0 || c < 0) return V(ErrorKind::Value);
    if (r > arr.rows || c > arr.cols) return V(ErrorKind::Ref);
    if (r == 0 && arr.rows == 1) r = 1;
    if (c == 0 && arr.cols == 1) c = 1;
    Operand out;
    out.is_ref = arr.is_ref;
    int r0 = r == 0 ? 0 : r - 1, r1 = r == 0 ? arr.rows - 1 : r - 1;
    int c0 = c == 0 ? 0 : c - 1, c1 = c == 0 ? arr.cols - 1 : c - 1;
    out.rows = r1 - r0 + 1;
    out.cols = c1 - c0 + 1;
    for (int i = r0; i <= r1; ++i)
        for (int j = c0; j <= c1; ++j) out.values.push_back(arr.at(i, j));
    return out;
}

// --------------------------------------------------------------------------
// Info

template <bool (*P)(const Value&)>
Operand predicate(Args& a) {
    return V(P(a.scalar(0)));
}

bool p_blank(const Value& v) { return v.is_blank(); }
bool p_err(const Value& v) { return v.is_error() && v.error() != ErrorKind::NA; }
bool p_error(const Value& v) { return v.is_error(); }
bool p_logical(const Value& v) { return v.is_bool(); }
bool p_na(const Value& v) { return v.is_error() && v.error() == ErrorKind::NA; }
bool p_nontext(const Value& v) { return !v.is_text(); }
bool p_number(const Value& v) { return v.is_number(); }
bool p_text(const Value& v) { return v.is_text(); }

Operand fn_n(Args& a) {
    Value v = a.scalar(0);
    if (v.is_error() || v.is_number()) return V(v);
    if (v.is_bool()) return V(v.boolean() ? 1.0 : 0.0);
    return V(0.0);
}

Operand fn_na(Args&) { return V(ErrorKind::NA); }

// --------------------------------------------------------------------------
// Platform: layout, navigation, forms, structural buttons

Operand fn_box(Args& a) {
    BoxDirective box{4, 8, {}, {}, {}};
    std::string* parts[] = {&box.title, &box.body, &box.footer};
    for (std::size_t i = 0; i < a.size(); ++i) {
        HN_TRY(s, txt(a, i));
        *parts[i] = s;
    }
    return V(RenderDirective{box});
}

Operand fn_menu(Args& a) {
    MenuDirective menu;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Operand& op = a.operand(i);
        MenuEntry entry;
        bool first = true;
        for (const auto& v : op.values) {
            if (v.is_error()) return V(v);
            if (v.is_blank()) continue;
            auto t = coerce_text(v);
            if (failed(t)) return V(std::get<ErrorKind>(t));
            if (first) entry.label = std::get<std::string>(t);
            else entry.children.push_back(std::get<std::string>(t));
            first = false;
        }
        if (!first) menu.entries.push_back(std::move(entry));
    }
    return V(RenderDirective{menu});
}

Operand fn_input(Args& a) {
    FormControlDirective f;
    f.control = ControlKind::Text;
    if (a.size() > 0) {
        HN_TRY(tx, txt(a, 0));
        f.transaction = tx;
    }
    return V(RenderDirective{f});
}

Operand choice_control(Args& a, ControlKind kind) {
    FormControlDirective f;
    f.control = kind;
    for (const auto& v : a.operand(0).values) {
        if (v.is_error()) return V(v);
        if (v.is_blank()) continue;
        auto t = coerce_text(v);
        if (failed(t)) return V(std::get<ErrorKind>(t));
        f.options.push_back(std::get<std::string>(t));
    }
    if (f.options.empty()) return V(ErrorKind::Value);
    if (a.size() > 1) {
        HN_TRY(tx, txt(a, 1));
        f.transaction = tx;
    }
    return V(RenderDirective{f});
}

Operand fn_select(Args& a) { return choice_control(a, ControlKind::Select); }
Operand fn_radio(Args& a) { return choice_control(a, ControlKind::Radio); }

Operand fn_create_button(Args& a) {
    HN_TRY(label, txt(a, 0));
    HN_TRY(spec, txt(a, 1));
    try {
        parse_path_spec(spec);
    } catch (const Error&) {
        return V(ErrorKind::Value);
    }
    return V(RenderDirective{CreateButtonDirective{label, spec}});
}

// --------------------------------------------------------------------------
// Registry

struct Entry {
    FunctionInfo info;
    Fn fn;
};

constexpr int kVar = -1;

const std::map<std::string, Entry, std::less<>>& registry() {
    static const std::map<std::string, Entry, std::less<>> table = {
        // logical
        {"and", {{1, kVar, true}, fn_and}},
        {"false", {{0, 0}, fn_false}},
        {"if", {{2, 3, true}, fn_if}},
        {"not", {{1, 1}, fn_not}},
        {"or", {{1, kVar, true}, fn_or}},
        {"true", {{0, 0}, fn_true}},
        // math
        {"abs", {{1, 1}, unary_math<neg_abs>}},
        {"acos", {{1, 1}, fn_acos}},
        {"asin", {{1, 1}, fn_asin}},
        {"atan", {{1, 1}, unary_math<m_atan>}},
        {"atan2", {{2, 2}, fn_atan2}},
        {"cos", {{1, 1}, unary_math<m_cos>}},
        {"degrees", {{1, 1}, unary_math<m_degrees>}},
        {"even", {{1, 1}, fn_even}},
        {"exp", {{1, 1}, unary_math<m_exp>}},
        {"fact", {{1, 1}, fn_fact}},
        {"int", {{1, 1}, unary_math<m_floor>}},
        {"ln", {{1, 1}, fn_ln}},
        {"log", {{1, 2}, fn_log}},
        {"log10", {{1, 1}, fn_log10}},
        {"mod", {{2, 2}, fn_mod}},
        {"odd", {{1, 1}, fn_odd}},
        {"pi", {{0, 0}, fn_pi}},
        {"power", {{2, 2}, fn_power}},
        {"product", {{1, kVar}, fn_product}},
        {"radians", {{1, 1}, unary_math<m_radians>}},
        {"rand", {{0, 0, false, true}, fn_rand}},
        {"round", {{2, 2}, fn_round}},
        {"sign", {{1, 1}, fn_sign}},
        {"sin", {{1, 1}, unary_math<m_sin>}},
        {"sqrt", {{1, 1}, fn_sqrt}},
        {"sum", {{1, kVar}, fn_sum}},
        {"sumif", {{2, 3}, fn_sumif}},
        {"tan", {{1, 1}, unary_math<m_tan>}},
        {"trunc", {{1, 2}, fn_trunc}},
        // statistical
        {"average", {{1, kVar}, fn_average}},
        {"count", {{1, kVar}, fn_count}},
        {"counta", {{1, kVar}, fn_counta}},
        {"countblank", {{1, 1}, fn_countblank}},
        {"countif", {{2, 2}, fn_countif}},
        {"max", {{1, kVar}, fn_max}},
        {"median", {{1, kVar}, fn_median}},
        {"min", {{1, kVar}, fn_min}},
        {"mode", {{1, kVar}, fn_mode}},
        {"stdev", {{1, kVar}, fn_stdev}},
        {"stdevp", {{1, kVar}, fn_stdevp}},
        {"var", {{1, kVar}, fn_var}},
        {"varp", {{1, kVar}, fn_varp}},
        // text
        {"concatenate", {{1, kVar}, fn_concatenate}},
        {"exact", {{2, 2}, fn_exact}},
        {"find", {{2, 3}, fn_find}},
        {"left", {{1, 2}, fn_left}},
        {"len", {{1, 1}, fn_len}},
        {"lower", {{1, 1}, fn_lower}},
        {"mid", {{3, 3}, fn_mid}},
        {"proper", {{1, 1}, fn_proper}},
        {"replace", {{4, 4}, fn_replace}},
        {"rept", {{2, 2}, fn_rept}},
        {"right", {{1, 2}, fn_right}},
        {"search", {{2, 3}, fn_search}},
        {"substitute", {{3, 4}, fn_substitute}},
        {"t", {{1, 1}, fn_t}},
        {"trim", {{1, 1}, fn_trim}},
        {"upper", {{1, 1}, fn_upper}},
        {"value", {{1, 1}, fn_value}},
        // date and time
        {"date", {{3, 3}, fn_date}},
        {"day", {{1, 1}, fn_day}},
        {"hour", {{1, 1}, fn_hour}},
        {"minute", {{1, 1}, fn_minute}},
        {"month", {{1, 1}, fn_month}},
        {"now", {{0, 0, false, true}, fn_now}},
        {"second", {{1, 1}, fn_second}},
        {"time", {{3, 3}, fn_time}},
        {"today", {{0, 0, false, true}, fn_today}},
        {"weekday", {{1, 2}, fn_weekday}},
        {"year", {{1, 1}, fn_year}},
        // lookup
        {"choose", {{2, kVar, true}, fn_choose}},
        {"hlookup", {{3, 4}, fn_hlookup}},
        {"index", {{2, 3}, fn_index}},
        {"match", {{2, 3}, fn_match}},
        {"vlookup", {{3, 4}, fn_vlookup}},
        // info
        {"isblank", {{1, 1}, predicate<p_blank>}},
        {"iserr", {{1, 1}, predicate<p_err>}},
        {"iserror", {{1, 1}, predicate<p_error>}},
        {"islogical", {{1, 1}, predicate<p_logical>}},
        {"isna", {{1, 1}, predicate<p_na>}},
        {"isnontext", {{1, 1}, predicate<p_nontext>}},
        {"isnumber", {{1, 1}, predicate<p_number>}},
        {"istext", {{1, 1}, predicate<p_text>}},
        {"n", {{1, 1}, fn_n}},
        {"na", {{0, 0}, fn_na}},
        // platform
        {"html.box.4x8", {{1, 3}, fn_box}},
        {"html.menu", {{1, kVar}, fn_menu}},
        {"form.input", {{0, 1}, fn_input}},
        {"form.select", {{1, 2}, fn_select}},
        {"form.radio", {{1, 2}, fn_radio}},
        {"create.button", {{2, 2}, fn_create_button}},
    };
    return table;
}

}  // namespace

std::optional<FunctionInfo> function_info(std::string_view name) {
    const auto& t = registry();
    auto it = t.find(to_lower(name));
    if (it == t.end()) return std::nullopt;
    return it->second.info;
}

std::vector<std::string> function_names() {
    std::vector<std::string> out;
    for (const auto& [name, _] : registry()) out.push_back(name);
    return out;
}

Operand call(std::string_view name, Args& args) {
    const auto& t = registry();
    auto it = t.find(to_lower(name));
    if (it == t.end()) return V(ErrorKind::Name);
    const FunctionInfo& info = it->second.info;
    auto n = static_cast<int>(args.size());
    if (n < info.min_arity || (info.max_arity != kVar && n > info.max_arity)) return V(ErrorKind::Value);
    return it->second.fn(args);
}

}  // namespace hn
