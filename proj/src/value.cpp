#include "hn/value.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cctype>
#include <cstdlib>

#include "hn/text.hpp"

namespace hn {

namespace {

constexpr std::array<std::string_view, 7> kErrorNames = {"#DIV/0!", "#VALUE!", "#REF!", "#NAME?",
                                                         "#NUM!",   "#N/A",    "#CIRC!"};

}  // namespace

std::string_view to_string(ErrorKind k) { return kErrorNames[static_cast<std::size_t>(k)]; }

std::optional<ErrorKind> parse_error_kind(std::string_view text) {
    for (std::size_t i = 0; i < kErrorNames.size(); ++i) {
        if (iequals(kErrorNames[i], text)) return static_cast<ErrorKind>(i);
    }
    return std::nullopt;
}

std::string_view to_string(ControlKind k) {
    switch (k) {
        case ControlKind::Text: return "text";
        case ControlKind::Select: return "select";
        case ControlKind::Radio: return "radio";
    }
    return "text";
}

std::optional<ControlKind> parse_control_kind(std::string_view text) {
    if (text == "text") return ControlKind::Text;
    if (text == "select") return ControlKind::Select;
    if (text == "radio") return ControlKind::Radio;
    return std::nullopt;
}

Value::Value(double d) : v_(d) {}

bool identical(const Value& a, const Value& b) {
    if (a.is_number() && b.is_number()) {
        return std::bit_cast<std::uint64_t>(a.number()) == std::bit_cast<std::uint64_t>(b.number());
    }
    return a == b;
}

std::string format_number(double d) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
    if (ec != std::errc{}) return "#NUM!";
    return std::string(buf.data(), end);
}

std::string number_to_text(double d) {
    if (d == 0) return "0";
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.15G", d);
    std::string s(buf.data());
    auto epos = s.find('E');
    std::string mantissa = epos == std::string::npos ? s : s.substr(0, epos);
    std::string exponent = epos == std::string::npos ? "" : s.substr(epos);
    if (mantissa.find('.') != std::string::npos) {
        while (!mantissa.empty() && mantissa.back() == '0') mantissa.pop_back();
        if (!mantissa.empty() && mantissa.back() == '.') mantissa.pop_back();
    }
    return mantissa + exponent;
}

std::string display(const Value& v) {
    struct Visitor {
        std::string operator()(Blank) const { return ""; }
        std::string operator()(double d) const { return format_number(d); }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(bool b) const { return b ? "TRUE" : "FALSE"; }
        std::string operator()(ErrorKind e) const { return std::string(to_string(e)); }
        std::string operator()(const RenderDirective& r) const {
            if (auto* box = std::get_if<BoxDirective>(&r)) return box->title;
            if (auto* btn = std::get_if<CreateButtonDirective>(&r)) return btn->label;
            return "";
        }
    };
    return std::visit(Visitor{}, v.storage());
}

std::optional<double> parse_number(std::string_view text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && text[b] == ' ') ++b;
    while (e > b && text[e - 1] == ' ') --e;
    if (b == e) return std::nullopt;
    std::string_view body = text.substr(b, e - b);

    bool percent = false;
    if (body.back() == '%') {
        percent = true;
        body.remove_suffix(1);
    }
    bool negative = false;
    if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    if (body.empty()) return std::nullopt;

    // Validate the shape strictly: digits [. digits] [e [sign] digits]
    std::size_t i = 0;
    std::size_t int_digits = 0;
    while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i, ++int_digits;
    std::size_t frac_digits = 0;
    if (i < body.size() && body[i] == '.') {
        ++i;
        while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i, ++frac_digits;
    }
    if (int_digits + frac_digits == 0) return std::nullopt;
    if (i < body.size() && (body[i] == 'e' || body[i] == 'E')) {
        ++i;
        if (i < body.size() && (body[i] == '+' || body[i] == '-')) ++i;
        std::size_t exp_digits = 0;
        while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i, ++exp_digits;
        if (exp_digits == 0) return std::nullopt;
    }
    if (i != body.size()) return std::nullopt;

    double value = 0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec == std::errc::result_out_of_range) return std::nullopt;
    if (ec != std::errc{} || ptr != body.data() + body.size()) return std::nullopt;
    if (negative) value = -value;
    if (percent) value /= 100.0;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

Coerced<double> coerce_number(const Value& v) {
    struct Visitor {
        Coerced<double> operator()(Blank) const { return 0.0; }
        Coerced<double> operator()(double d) const { return d; }
        Coerced<double> operator()(const std::string& s) const {
            if (auto d = parse_number(s)) return *d;
            return ErrorKind::Value;
        }
        Coerced<double> operator()(bool b) const { return b ? 1.0 : 0.0; }
        Coerced<double> operator()(ErrorKind e) const { return e; }
        Coerced<double> operator()(const RenderDirective&) const { return ErrorKind::Value; }
    };
    return std::visit(Visitor{}, v.storage());
}

Coerced<bool> coerce_boolean(const Value& v) {
    struct Visitor {
        Coerced<bool> operator()(Blank) const { return false; }
        Coerced<bool> operator()(double d) const { return d != 0.0; }
        Coerced<bool> operator()(const std::string& s) const {
            if (iequals(s, "TRUE")) return true;
            if (iequals(s, "FALSE")) return false;
            return ErrorKind::Value;
        }
        Coerced<bool> operator()(bool b) const { return b; }
        Coerced<bool> operator()(ErrorKind e) const { return e; }
        Coerced<bool> operator()(const RenderDirective&) const { return ErrorKind::Value; }
    };
    return std::visit(Visitor{}, v.storage());
}

Coerced<std::string> coerce_text(const Value& v) {
    struct Visitor {
        Coerced<std::string> operator()(Blank) const { return std::string(); }
        Coerced<std::string> operator()(double d) const { return number_to_text(d); }
        Coerced<std::string> operator()(const std::string& s) const { return s; }
        Coerced<std::string> operator()(bool b) const { return std::string(b ? "TRUE" : "FALSE"); }
        Coerced<std::string> operator()(ErrorKind e) const { return e; }
        Coerced<std::string> operator()(const RenderDirective&) const { return ErrorKind::Value; }
    };
    return std::visit(Visitor{}, v.storage());
}

Value checked_number(double d) {
    if (!std::isfinite(d)) return Value(ErrorKind::Num);
    return Value(d);
}

}  // namespace hn
