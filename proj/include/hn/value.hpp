#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hn {

enum class ErrorKind : std::uint8_t { Div0, Value, Ref, Name, Num, NA, Circ };

std::string_view to_string(ErrorKind k);
std::optional<ErrorKind> parse_error_kind(std::string_view text);

// Render directives are what layout, navigation, form and structural
// functions evaluate to. They never mutate state by themselves.
struct BoxDirective {
    int width = 1;
    int height = 1;
    std::string title;
    std::string body;
    std::string footer;
    bool operator==(const BoxDirective&) const = default;
};

struct MenuEntry {
    std::string label;
    std::vector<std::string> children;
    bool operator==(const MenuEntry&) const = default;
};

struct MenuDirective {
    std::vector<MenuEntry> entries;
    bool operator==(const MenuDirective&) const = default;
};

enum class ControlKind : std::uint8_t { Text, Select, Radio };

std::string_view to_string(ControlKind k);
std::optional<ControlKind> parse_control_kind(std::string_view text);

struct FormControlDirective {
    ControlKind control = ControlKind::Text;
    std::vector<std::string> options;
    std::string transaction;
    bool operator==(const FormControlDirective&) const = default;
};

struct CreateButtonDirective {
    std::string label;
    std::string path_spec;
    bool operator==(const CreateButtonDirective&) const = default;
};

using RenderDirective =
    std::variant<BoxDirective, MenuDirective, FormControlDirective, CreateButtonDirective>;

struct Blank {
    bool operator==(const Blank&) const = default;
};

/// Tagged scalar held by every cell. Stored numbers are never NaN or infinite.
class Value {
public:
    using Storage = std::variant<Blank, double, std::string, bool, ErrorKind, RenderDirective>;

    Value() = default;
    Value(Blank) {}
    Value(double d);
    Value(int i) : Value(static_cast<double>(i)) {}
    Value(std::string s) : v_(std::move(s)) {}
    Value(const char* s) : v_(std::string(s)) {}
    Value(bool b) : v_(b) {}
    Value(ErrorKind e) : v_(e) {}
    Value(RenderDirective r) : v_(std::move(r)) {}

    bool is_blank() const { return std::holds_alternative<Blank>(v_); }
    bool is_number() const { return std::holds_alternative<double>(v_); }
    bool is_text() const { return std::holds_alternative<std::string>(v_); }
    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_error() const { return std::holds_alternative<ErrorKind>(v_); }
    bool is_render() const { return std::holds_alternative<RenderDirective>(v_); }

    double number() const { return std::get<double>(v_); }
    const std::string& text() const { return std::get<std::string>(v_); }
    bool boolean() const { return std::get<bool>(v_); }
    ErrorKind error() const { return std::get<ErrorKind>(v_); }
    const RenderDirective& render() const { return std::get<RenderDirective>(v_); }

    const Storage& storage() const { return v_; }

    bool operator==(const Value&) const = default;

private:
    Storage v_;
};

/// Bit-level equality; distinguishes +0.0 from -0.0.
bool identical(const Value& a, const Value& b);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double d);

/// General-format text used when a number is coerced to text inside a formula
/// (15 significant digits, exponent as E+NN).
std::string number_to_text(double d);

/// Display text of a value (numbers use shortest round-trip form).
std::string display(const Value& v);

template <typename T>
using Coerced = std::variant<T, ErrorKind>;

template <typename T>
bool failed(const Coerced<T>& c) {
    return std::holds_alternative<ErrorKind>(c);
}

/// Parses text as a decimal number: optional sign, digits, fraction, exponent,
/// optional trailing percent. Surrounding spaces are allowed.
std::optional<double> parse_number(std::string_view text);

Coerced<double> coerce_number(const Value& v);
Coerced<bool> coerce_boolean(const Value& v);
Coerced<std::string> coerce_text(const Value& v);

/// Maps a computed double to a storable value (NaN and infinities become #NUM!).
Value checked_number(double d);

}  // namespace hn
