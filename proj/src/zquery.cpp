#include "hn/zquery.hpp"

#include <map>

#include "hn/engine.hpp"
#include "hn/store.hpp"

namespace hn {

bool matches_skeleton(const ZPattern& pattern, const Path& page) {
    if (page.depth() != pattern.length()) return false;
    const auto& segs = page.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& p = pattern.segments[i];
        if (!p.predicate && p.name != segs[i]) return false;
    }
    return true;
}

std::vector<Path> match_pages(const ZPattern& pattern, const Site& site, double now, std::uint64_t seed) {
    std::vector<Path> out;
    // Predicate outcomes per (position, ancestor page); ancestors are shared
    // by many candidates at interior positions.
    std::map<std::pair<std::size_t, std::string>, bool> memo;
    site.for_each_under(pattern.literal_prefix(), [&](const Page& page) {
        if (!matches_skeleton(pattern, page.path)) return;
        for (std::size_t i = 0; i < pattern.length(); ++i) {
            const auto& seg = pattern.segments[i];
            if (!seg.predicate) continue;
            Path at = page.path.prefix(i + 1);
            auto key = std::pair{i, at.str()};
            auto it = memo.find(key);
            bool ok;
            if (it != memo.end()) {
                ok = it->second;
            } else {
                ok = evaluate_predicate(seg.predicate, at, site, now, seed);
                memo.emplace(std::move(key), ok);
            }
            if (!ok) return;
        }
        out.push_back(page.path);
    });
    return out;
}

std::vector<std::pair<Path, CellAddr>> resolve_zref(const ZPattern& pattern, const Rect& target, const Site& site,
                                                    double now, std::uint64_t seed) {
    std::vector<std::pair<Path, CellAddr>> out;
    for (const auto& page : match_pages(pattern, site, now, seed)) {
        for (int r = target.first.row; r <= target.last.row; ++r) {
            for (int c = target.first.col; c <= target.last.col; ++c) out.emplace_back(page, CellAddr{c, r});
        }
    }
    return out;
}

std::vector<Rect> zref_inputs_on(const ZPattern& pattern, const Rect& target, const Path& page) {
    std::vector<Rect> out;
    std::size_t d = page.depth();
    if (d == 0 || d > pattern.length()) return out;
    const auto& segs = page.segments();
    for (std::size_t i = 0; i < d; ++i) {
        const auto& p = pattern.segments[i];
        if (!p.predicate && p.name != segs[i]) return out;
    }
    if (d == pattern.length()) out.push_back(target);
    const auto& at = pattern.segments[d - 1];
    if (at.predicate) {
        for (const auto& r : predicate_refs(at.predicate)) out.push_back(r);
    }
    return out;
}

}  // namespace hn
