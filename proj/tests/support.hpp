#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hn/engine.hpp"
#include "hn/error.hpp"
#include "hn/recalc.hpp"
#include "hn/store.hpp"

namespace hn::test {

/// 2011-04-21T09:30:00Z
inline constexpr std::int64_t kApril21 = 1303378200000;

/// Deterministic clock: starts at `start` and ticks one second per read.
inline Workbook::Clock ticking_clock(std::int64_t start = kApril21) {
    auto t = std::make_shared<std::int64_t>(start);
    return [t] { return (*t += 1000); };
}

inline Workbook::Clock fixed_clock(std::int64_t ms) {
    return [ms] { return ms; };
}

inline Workbook make_workbook(std::int64_t start = kApril21) {
    Workbook wb;
    wb.set_clock(ticking_clock(start));
    return wb;
}

inline CellAddr A(std::string_view ref) {
    auto a = parse_a1(ref);
    if (!a) throw Error("bad ref in test: " + std::string(ref));
    return *a;
}

inline Path P(std::string_view p) { return Path::parse(p); }

inline void ensure_page(Workbook& wb, const Path& p) {
    if (!wb.site().has_page(p)) wb.create_page("system", p);
}

inline Event put(Workbook& wb, std::string_view page, std::string_view ref, const std::string& src) {
    ensure_page(wb, P(page));
    return wb.set_cells("system", P(page), {CellWrite{A(ref), src, std::nullopt, std::nullopt}});
}

inline Value val(const Workbook& wb, std::string_view page, std::string_view ref) {
    return wb.site().value(P(page), A(ref));
}

/// Evaluates a formula in a scratch cell of `base` without committing.
inline Value eval(const std::string& formula, const Site& site = Site(), const Path& base = Path(),
                  double now = 40654.0) {
    EvalContext ctx{site, base, CellAddr{1, 1000000}, now, 1};
    return evaluate(parse(formula), ctx);
}

inline bool near(double a, double b, double rel = 1e-12) {
    if (a == b) return true;
    double scale = std::max(std::fabs(a), std::fabs(b));
    return std::fabs(a - b) <= rel * scale;
}

/// Small hand-rolled generator over mt19937_64.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }
    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(range(0, static_cast<int>(v.size()) - 1))];
    }
    std::string segment() {
        static const std::vector<std::string> names = {"a", "b", "c", "x1", "y_2", "q-z"};
        return pick(names);
    }
};

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() / ("hn-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

}  // namespace hn::test
