#pragma once

// Conformance vectors for the built-in functions. Expected values are the
// results a desktop spreadsheet gives for the same formulas over the fixture
// page below (dates use the 1899-12-30 epoch, so serials from 1900-03-01 on
// agree with every major implementation).

#include <string>
#include <vector>

#include "support.hpp"

namespace hn::test {

struct Vector {
    const char* function;
    const char* formula;
    Value expect;
};

inline const Path kFixture = Path::parse("/fx/");

/// a1:a5 1..5; b1:b5 apple, banana, cherry, TRUE, blank; d1:e4 a vertical
/// lookup table; f1:f8 2,4,4,4,5,5,7,9; g1:g3 10, "x", blank; a10:d11 a
/// horizontal lookup table.
inline Workbook fixture_workbook() {
    Workbook wb = make_workbook();
    wb.create_page("system", kFixture);
    std::vector<std::pair<const char*, const char*>> cells = {
        {"a1", "1"},      {"a2", "2"},      {"a3", "3"},      {"a4", "4"},     {"a5", "5"},
        {"b1", "apple"},  {"b2", "banana"}, {"b3", "cherry"}, {"b4", "TRUE"},  {"d1", "1"},
        {"d2", "2"},      {"d3", "3"},      {"d4", "4"},      {"e1", "one"},   {"e2", "two"},
        {"e3", "three"},  {"e4", "four"},   {"f1", "2"},      {"f2", "4"},     {"f3", "4"},
        {"f4", "4"},      {"f5", "5"},      {"f6", "5"},      {"f7", "7"},     {"f8", "9"},
        {"g1", "10"},     {"g2", "x"},      {"a10", "1"},     {"b10", "2"},    {"c10", "3"},
        {"d10", "4"},     {"a11", "one"},   {"b11", "two"},   {"c11", "three"}, {"d11", "four"},
    };
    std::vector<CellWrite> writes;
    for (auto [ref, src] : cells) writes.push_back(CellWrite{A(ref), std::string(src), std::nullopt, std::nullopt});
    wb.set_cells("system", kFixture, writes);
    return wb;
}

inline const double kPi = 3.141592653589793;

inline Value box(const char* title, const char* body = "", const char* footer = "") {
    return Value(RenderDirective{BoxDirective{4, 8, title, body, footer}});
}

inline Value control(ControlKind k, std::vector<std::string> options, const char* tx = "") {
    return Value(RenderDirective{FormControlDirective{k, std::move(options), tx}});
}

inline const std::vector<Vector>& vectors() {
    using E = ErrorKind;
    static const std::vector<Vector> v = {
        // logical
        {"and", "=and(TRUE,TRUE)", true},
        {"and", "=and(TRUE,FALSE)", false},
        {"and", "=and(1,0)", false},
        {"and", "=and(a1:a5)", true},
        {"or", "=or(FALSE,FALSE)", false},
        {"or", "=or(TRUE,FALSE)", true},
        {"or", "=or(0,1)", true},
        {"not", "=not(TRUE)", false},
        {"not", "=not(0)", true},
        {"not", "=not(\"x\")", E::Value},
        {"if", "=if(TRUE,1,2)", 1},
        {"if", "=if(FALSE,1,2)", 2},
        {"if", "=if(FALSE,1)", false},
        {"if", "=if(1/0>1,1,2)", E::Div0},
        {"true", "=true()", true},
        {"true", "=not(true())", false},
        {"true", "=true()+1", 2},
        {"false", "=false()", false},
        {"false", "=false()+1", 1},
        {"false", "=if(false(),1,2)", 2},
        // math
        {"abs", "=abs(-2.5)", 2.5},
        {"abs", "=abs(3)", 3},
        {"abs", "=abs(\"x\")", E::Value},
        {"acos", "=acos(1)", 0},
        {"acos", "=acos(0)", 1.5707963267948966},
        {"acos", "=acos(2)", E::Num},
        {"asin", "=asin(1)", 1.5707963267948966},
        {"asin", "=asin(0)", 0},
        {"asin", "=asin(-2)", E::Num},
        {"atan", "=atan(1)", 0.7853981633974483},
        {"atan", "=atan(0)", 0},
        {"atan", "=atan(-1)", -0.7853981633974483},
        {"atan2", "=atan2(1,1)", 0.7853981633974483},
        {"atan2", "=atan2(0,0)", E::Div0},
        {"atan2", "=atan2(-1,0)", kPi},
        {"atan2", "=atan2(0,1)", 1.5707963267948966},
        {"cos", "=cos(0)", 1},
        {"cos", "=cos(pi())", -1},
        {"cos", "=cos(1)", 0.5403023058681398},
        {"degrees", "=degrees(pi())", 180},
        {"degrees", "=degrees(1)", 57.29577951308232},
        {"degrees", "=degrees(0)", 0},
        {"even", "=even(1.5)", 2},
        {"even", "=even(3)", 4},
        {"even", "=even(-1)", -2},
        {"even", "=even(2)", 2},
        {"exp", "=exp(0)", 1},
        {"exp", "=exp(1)", 2.718281828459045},
        {"exp", "=exp(710)", E::Num},
        {"fact", "=fact(5)", 120},
        {"fact", "=fact(0)", 1},
        {"fact", "=fact(-1)", E::Num},
        {"fact", "=fact(5.9)", 120},
        {"int", "=int(8.9)", 8},
        {"int", "=int(-8.9)", -9},
        {"int", "=int(0)", 0},
        {"ln", "=ln(1)", 0},
        {"ln", "=ln(10)", 2.302585092994046},
        {"ln", "=ln(0)", E::Num},
        {"log", "=log(100)", 2},
        {"log", "=log(8,2)", 3},
        {"log", "=log(-1)", E::Num},
        {"log", "=log(10,1)", E::Div0},
        {"log10", "=log10(1000)", 3},
        {"log10", "=log10(1)", 0},
        {"log10", "=log10(0)", E::Num},
        {"mod", "=mod(3,2)", 1},
        {"mod", "=mod(-3,2)", 1},
        {"mod", "=mod(3,-2)", -1},
        {"mod", "=mod(3,0)", E::Div0},
        {"odd", "=odd(1.5)", 3},
        {"odd", "=odd(3)", 3},
        {"odd", "=odd(2)", 3},
        {"odd", "=odd(-1)", -1},
        {"odd", "=odd(0)", 1},
        {"pi", "=pi()", kPi},
        {"pi", "=pi()*2", 6.283185307179586},
        {"pi", "=round(pi(),2)", 3.14},
        {"power", "=power(2,3)", 8},
        {"power", "=power(4,0.5)", 2},
        {"power", "=power(0,-1)", E::Div0},
        {"power", "=power(-1,0.5)", E::Num},
        {"product", "=product(2,3,4)", 24},
        {"product", "=product(a1:a5)", 120},
        {"product", "=product(a1:a3,2)", 12},
        {"radians", "=radians(180)", kPi},
        {"radians", "=radians(0)", 0},
        {"radians", "=radians(90)", 1.5707963267948966},
        {"rand", "=and(rand()>=0,rand()<1)", true},
        {"rand", "=rand()*0", 0},
        {"rand", "=isnumber(rand())", true},
        {"round", "=round(2.5,0)", 3},
        {"round", "=round(-2.5,0)", -3},
        {"round", "=round(1.005,2)", 1.01},
        {"round", "=round(1234.567,-2)", 1200},
        {"round", "=round(2.15,1)", 2.2},
        {"sign", "=sign(-3)", -1},
        {"sign", "=sign(0)", 0},
        {"sign", "=sign(2)", 1},
        {"sin", "=sin(0)", 0},
        {"sin", "=sin(pi()/2)", 1},
        {"sin", "=sin(1)", 0.8414709848078965},
        {"sqrt", "=sqrt(16)", 4},
        {"sqrt", "=sqrt(2)", 1.4142135623730951},
        {"sqrt", "=sqrt(-1)", E::Num},
        {"sum", "=sum(1,2,3)", 6},
        {"sum", "=sum(a1:a5)", 15},
        {"sum", "=sum(b1:b5)", 0},
        {"sum", "=sum(\"3\",1)", 4},
        {"sum", "=sum(1,\"x\")", E::Value},
        {"sum", "=sum(1,TRUE)", 2},
        {"sumif", "=sumif(a1:a5,\">2\")", 12},
        {"sumif", "=sumif(a1:a5,3)", 3},
        {"sumif", "=sumif(a1:a5,\"<3\",f1:f5)", 6},
        {"sumif", "=sumif(b1:b3,\"b*\",a1:a3)", 2},
        {"tan", "=tan(0)", 0},
        {"tan", "=tan(pi()/4)", 1},
        {"tan", "=tan(1)", 1.5574077246549023},
        {"trunc", "=trunc(8.9)", 8},
        {"trunc", "=trunc(-8.9)", -8},
        {"trunc", "=trunc(3.14159,2)", 3.14},
        // statistical
        {"average", "=average(1,2,3,4)", 2.5},
        {"average", "=average(a1:a5)", 3},
        {"average", "=average(b1:b3)", E::Div0},
        {"count", "=count(a1:a5)", 5},
        {"count", "=count(b1:b5)", 0},
        {"count", "=count(1,\"x\",TRUE)", 2},
        {"count", "=count(a1:b5)", 5},
        {"counta", "=counta(a1:b5)", 9},
        {"counta", "=counta(1,\"x\")", 2},
        {"counta", "=counta(g1:g3)", 2},
        {"countblank", "=countblank(b1:b5)", 1},
        {"countblank", "=countblank(a1:a5)", 0},
        {"countblank", "=countblank(g1:g3)", 1},
        {"countif", "=countif(a1:a5,\">2\")", 3},
        {"countif", "=countif(b1:b3,\"a*\")", 1},
        {"countif", "=countif(b1:b5,\"\")", 1},
        {"countif", "=countif(a1:a5,\"3\")", 1},
        {"max", "=max(1,5,3)", 5},
        {"max", "=max(a1:a5)", 5},
        {"max", "=max(b1:b3)", 0},
        {"max", "=max(-1,-5)", -1},
        {"median", "=median(1,2,3,4)", 2.5},
        {"median", "=median(a1:a5)", 3},
        {"median", "=median(5,1,3)", 3},
        {"min", "=min(1,5,3)", 1},
        {"min", "=min(a1:a5)", 1},
        {"min", "=min(b1:b3)", 0},
        {"mode", "=mode(f1:f8)", 4},
        {"mode", "=mode(1,2,2,3)", 2},
        {"mode", "=mode(1,2,3)", E::NA},
        {"stdev", "=stdev(f1:f8)", 2.138089935299395},
        {"stdev", "=stdev(1)", E::Div0},
        {"stdev", "=stdev(1,3)", 1.4142135623730951},
        {"stdevp", "=stdevp(f1:f8)", 2},
        {"stdevp", "=stdevp(1,3)", 1},
        {"stdevp", "=stdevp(5)", 0},
        {"var", "=var(f1:f8)", 4.571428571428571},
        {"var", "=var(1,3)", 2},
        {"var", "=var(1)", E::Div0},
        {"varp", "=varp(f1:f8)", 4},
        {"varp", "=varp(1,3)", 1},
        {"varp", "=varp(5)", 0},
        // text
        {"concatenate", "=concatenate(\"a\",\"b\")", "ab"},
        {"concatenate", "=concatenate(\"x\",1)", "x1"},
        {"concatenate", "=concatenate(a1,\"-\",b1)", "1-apple"},
        {"exact", "=exact(\"a\",\"a\")", true},
        {"exact", "=exact(\"a\",\"A\")", false},
        {"exact", "=exact(1,\"1\")", true},
        {"find", "=find(\"b\",\"abc\")", 2},
        {"find", "=find(\"B\",\"abc\")", E::Value},
        {"find", "=find(\"a\",\"banana\",3)", 4},
        {"left", "=left(\"abc\",2)", "ab"},
        {"left", "=left(\"abc\")", "a"},
        {"left", "=left(\"abc\",-1)", E::Value},
        {"left", "=left(\"abc\",10)", "abc"},
        {"len", "=len(\"abc\")", 3},
        {"len", "=len(\"\")", 0},
        {"len", "=len(123)", 3},
        {"lower", "=lower(\"AbC\")", "abc"},
        {"lower", "=lower(1)", "1"},
        {"lower", "=lower(\"X1\")", "x1"},
        {"mid", "=mid(\"abcdef\",2,3)", "bcd"},
        {"mid", "=mid(\"abc\",5,1)", ""},
        {"mid", "=mid(\"abc\",0,1)", E::Value},
        {"proper", "=proper(\"hello world\")", "Hello World"},
        {"proper", "=proper(\"HELLO\")", "Hello"},
        {"proper", "=proper(\"a-b c\")", "A-B C"},
        {"replace", "=replace(\"abcdef\",2,3,\"X\")", "aXef"},
        {"replace", "=replace(\"abc\",1,0,\"Z\")", "Zabc"},
        {"replace", "=replace(\"abc\",4,1,\"d\")", "abcd"},
        {"rept", "=rept(\"ab\",3)", "ababab"},
        {"rept", "=rept(\"x\",0)", ""},
        {"rept", "=rept(\"x\",-1)", E::Value},
        {"right", "=right(\"abc\",2)", "bc"},
        {"right", "=right(\"abc\")", "c"},
        {"right", "=right(\"abc\",5)", "abc"},
        {"search", "=search(\"B\",\"abc\")", 2},
        {"search", "=search(\"a?c\",\"xabc\")", 2},
        {"search", "=search(\"z\",\"abc\")", E::Value},
        {"substitute", "=substitute(\"aaa\",\"a\",\"b\")", "bbb"},
        {"substitute", "=substitute(\"aaa\",\"a\",\"b\",2)", "aba"},
        {"substitute", "=substitute(\"abc\",\"x\",\"y\")", "abc"},
        {"t", "=t(\"abc\")", "abc"},
        {"t", "=t(1)", ""},
        {"t", "=t(TRUE)", ""},
        {"trim", "=trim(\"  a  b \")", "a b"},
        {"trim", "=trim(\"x\")", "x"},
        {"trim", "=trim(\"\")", ""},
        {"upper", "=upper(\"abc\")", "ABC"},
        {"upper", "=upper(\"a1\")", "A1"},
        {"upper", "=upper(TRUE)", "TRUE"},
        {"value", "=value(\"3.5\")", 3.5},
        {"value", "=value(\"abc\")", E::Value},
        {"value", "=value(\"1e2\")", 100},
        // date and time
        {"date", "=date(2011,4,21)", 40654},
        {"date", "=date(2000,1,1)", 36526},
        {"date", "=date(2011,13,1)", 40909},
        {"date", "=date(1900,3,1)", 61},
        {"day", "=day(40654)", 21},
        {"day", "=day(36526)", 1},
        {"day", "=day(-1)", E::Num},
        {"hour", "=hour(0.5)", 12},
        {"hour", "=hour(40654.75)", 18},
        {"hour", "=hour(0)", 0},
        {"minute", "=minute(0.5)", 0},
        {"minute", "=minute(time(1,30,0))", 30},
        {"minute", "=minute(0.75+1/1440)", 1},
        {"month", "=month(40654)", 4},
        {"month", "=month(36526)", 1},
        {"month", "=month(40909)", 1},
        {"now", "=now()", 40654},
        {"now", "=int(now())", 40654},
        {"now", "=now()>40000", true},
        {"second", "=second(time(1,2,3))", 3},
        {"second", "=second(0.5)", 0},
        {"second", "=second(1/86400)", 1},
        {"time", "=time(12,0,0)", 0.5},
        {"time", "=time(1,30,0)", 0.0625},
        {"time", "=time(24,0,0)", 0},
        {"today", "=today()", 40654},
        {"today", "=today()-date(2011,4,20)", 1},
        {"today", "=weekday(today())", 5},
        {"weekday", "=weekday(40654)", 5},
        {"weekday", "=weekday(40654,2)", 4},
        {"weekday", "=weekday(40654,3)", 3},
        {"year", "=year(40654)", 2011},
        {"year", "=year(36526)", 2000},
        {"year", "=year(61)", 1900},
        // lookup
        {"choose", "=choose(2,\"a\",\"b\",\"c\")", "b"},
        {"choose", "=choose(4,\"a\",\"b\")", E::Value},
        {"choose", "=choose(1,10,1/0)", 10},
        {"hlookup", "=hlookup(3,a10:d11,2,FALSE)", "three"},
        {"hlookup", "=hlookup(2.5,a10:d11,2,TRUE)", "two"},
        {"hlookup", "=hlookup(9,a10:d11,2,FALSE)", E::NA},
        {"index", "=index(d1:e4,2,2)", "two"},
        {"index", "=index(a1:a5,3)", 3},
        {"index", "=index(a1:a5,9)", E::Ref},
        {"match", "=match(3,a1:a5,0)", 3},
        {"match", "=match(3.5,a1:a5,1)", 3},
        {"match", "=match(\"banana\",b1:b3,0)", 2},
        {"match", "=match(9,a1:a5,0)", E::NA},
        {"vlookup", "=vlookup(3,d1:e4,2,FALSE)", "three"},
        {"vlookup", "=vlookup(2.5,d1:e4,2)", "two"},
        {"vlookup", "=vlookup(9,d1:e4,2,FALSE)", E::NA},
        // information
        {"isblank", "=isblank(b5)", true},
        {"isblank", "=isblank(a1)", false},
        {"isblank", "=isblank(\"\")", false},
        {"iserr", "=iserr(1/0)", true},
        {"iserr", "=iserr(na())", false},
        {"iserr", "=iserr(1)", false},
        {"iserror", "=iserror(1/0)", true},
        {"iserror", "=iserror(na())", true},
        {"iserror", "=iserror(1)", false},
        {"islogical", "=islogical(TRUE)", true},
        {"islogical", "=islogical(1)", false},
        {"islogical", "=islogical(b4)", true},
        {"isna", "=isna(na())", true},
        {"isna", "=isna(1/0)", false},
        {"isna", "=isna(1)", false},
        {"isnontext", "=isnontext(1)", true},
        {"isnontext", "=isnontext(\"a\")", false},
        {"isnontext", "=isnontext(b5)", true},
        {"isnumber", "=isnumber(1)", true},
        {"isnumber", "=isnumber(\"1\")", false},
        {"isnumber", "=isnumber(a1)", true},
        {"istext", "=istext(\"a\")", true},
        {"istext", "=istext(1)", false},
        {"istext", "=istext(b1)", true},
        {"n", "=n(5)", 5},
        {"n", "=n(\"a\")", 0},
        {"n", "=n(TRUE)", 1},
        {"na", "=na()", E::NA},
        {"na", "=isna(na())", true},
        {"na", "=na()+1", E::NA},
        // platform
        {"html.box.4x8", "=html.box.4x8(\"t\")", box("t")},
        {"html.box.4x8", "=html.box.4x8(\"t\",\"b\",\"f\")", box("t", "b", "f")},
        {"html.box.4x8", "=html.box.4x8(1/0)", E::Div0},
        {"html.menu", "=html.menu(\"home\")", Value(RenderDirective{MenuDirective{{{"home", {}}}}})},
        {"html.menu", "=html.menu(e1:e2)", Value(RenderDirective{MenuDirective{{{"one", {"two"}}}}})},
        {"html.menu", "=html.menu(\"a\",\"b\")", Value(RenderDirective{MenuDirective{{{"a", {}}, {"b", {}}}}})},
        {"form.input", "=form.input()", control(ControlKind::Text, {})},
        {"form.input", "=form.input(\"order\")", control(ControlKind::Text, {}, "order")},
        {"form.input", "=form.input(na())", E::NA},
        {"form.select", "=form.select(e1:e2)", control(ControlKind::Select, {"one", "two"})},
        {"form.select", "=form.select(\"yes\",\"t1\")", control(ControlKind::Select, {"yes"}, "t1")},
        {"form.select", "=form.select(b5)", E::Value},
        {"form.radio", "=form.radio(e1:e3)", control(ControlKind::Radio, {"one", "two", "three"})},
        {"form.radio", "=form.radio(\"a\",\"tx\")", control(ControlKind::Radio, {"a"}, "tx")},
        {"form.radio", "=form.radio(1/0)", E::Div0},
        {"create.button", "=create.button(\"Go\",\"./[blank,date,yyyy]/\")",
         Value(RenderDirective{CreateButtonDirective{"Go", "./[blank,date,yyyy]/"}})},
        {"create.button", "=create.button(\"Go\",\"not a spec\")", E::Value},
        {"create.button", "=create.button(\"Go\",1/0)", E::Div0},
    };
    return v;
}

/// Evaluates a vector on the fixture page with now = 2011-04-21 00:00.
inline Value run_vector(const Site& site, const Vector& vec) {
    EvalContext ctx{site, kFixture, CellAddr{26, 1000}, 40654.0, 1};
    return evaluate(parse(vec.formula), ctx);
}

inline bool vector_passes(const Value& got, const Value& expect) {
    if (expect.is_number()) return got.is_number() && near(got.number(), expect.number());
    return got == expect;
}

}  // namespace hn::test
