#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hn {

/// Canonical hierarchical page address: lowercase segments of `[a-z0-9_-]+`,
/// written `/seg1/seg2/`. The root is `/`.
class Path {
public:
    Path() : text_("/") {}

    /// Builds from already-validated segments; throws PathError on bad ones.
    static Path from_segments(std::vector<std::string> segments);

    /// Parses a canonical-or-foldable absolute path (`/A/b` and `/a/b/` both
    /// accepted). Throws PathError.
    static Path parse(std::string_view text);

    const std::string& str() const { return text_; }
    const std::vector<std::string>& segments() const { return segments_; }
    std::size_t depth() const { return segments_.size(); }
    bool is_root() const { return segments_.empty(); }

    /// Throws PathError at the root.
    Path parent() const;
    Path child(std::string_view segment) const;
    /// First `n` segments.
    Path prefix(std::size_t n) const;
    bool starts_with(const Path& ancestor) const;

    bool operator==(const Path& o) const { return text_ == o.text_; }
    std::strong_ordering operator<=>(const Path& o) const { return text_ <=> o.text_; }

private:
    std::vector<std::string> segments_;
    std::string text_;
};

bool valid_segment(std::string_view segment);

/// Resolves a path expression against `base`: a leading `/` starts at the
/// root, `./` at base, each `../` climbs one level. Segments are folded to
/// lowercase. Throws PathError on escape above the root or illegal characters.
Path canonicalize_path(std::string_view raw, const Path& base);

/// 1-based cell coordinate.
struct CellAddr {
    int col = 1;
    int row = 1;

    bool operator==(const CellAddr&) const = default;
    /// Row-major order (row, then column).
    std::strong_ordering operator<=>(const CellAddr& o) const {
        if (auto c = row <=> o.row; c != 0) return c;
        return col <=> o.col;
    }
};

inline constexpr int kMaxCol = 16384;
inline constexpr int kMaxRow = 1048576;

std::string column_name(int col);
std::optional<int> column_index(std::string_view letters);

/// Lowercase A1 form, e.g. `b7`.
std::string to_a1(CellAddr a);
/// Parses `b7` / `B7` (no `$`). Throws ParseError-free: returns nullopt.
std::optional<CellAddr> parse_a1(std::string_view text);

/// Inclusive rectangle of cells.
struct Rect {
    CellAddr first;
    CellAddr last;

    bool contains(CellAddr a) const {
        return a.col >= first.col && a.col <= last.col && a.row >= first.row && a.row <= last.row;
    }
    int rows() const { return last.row - first.row + 1; }
    int cols() const { return last.col - first.col + 1; }
    bool operator==(const Rect&) const = default;
};

/// A cell on a specific page.
struct CellKey {
    Path page;
    CellAddr addr;

    bool operator==(const CellKey&) const = default;
    std::strong_ordering operator<=>(const CellKey& o) const {
        if (auto c = page <=> o.page; c != 0) return c;
        return addr <=> o.addr;
    }
};

}  // namespace hn

template <>
struct std::hash<hn::Path> {
    std::size_t operator()(const hn::Path& p) const noexcept { return std::hash<std::string>{}(p.str()); }
};

template <>
struct std::hash<hn::CellAddr> {
    std::size_t operator()(const hn::CellAddr& a) const noexcept {
        return std::hash<long long>{}((static_cast<long long>(a.row) << 20) ^ a.col);
    }
};

template <>
struct std::hash<hn::CellKey> {
    std::size_t operator()(const hn::CellKey& k) const noexcept {
        return std::hash<hn::Path>{}(k.page) * 31u + std::hash<hn::CellAddr>{}(k.addr);
    }
};
