#include "hn/path.hpp"

#include <cctype>

#include "hn/error.hpp"
#include "hn/text.hpp"

namespace hn {

bool valid_segment(std::string_view segment) {
    if (segment.empty()) return false;
    for (char c : segment) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

Path Path::from_segments(std::vector<std::string> segments) {
    Path p;
    p.text_ = "/";
    for (auto& s : segments) {
        if (!valid_segment(s)) throw PathError("illegal path segment '" + s + "'");
        p.text_ += s;
        p.text_ += '/';
    }
    p.segments_ = std::move(segments);
    return p;
}

Path Path::parse(std::string_view text) {
    if (text.empty() || text.front() != '/') {
        throw PathError("path must start with '/': '" + std::string(text) + "'");
    }
    return canonicalize_path(text, Path());
}

Path Path::parent() const {
    if (is_root()) throw PathError("the root has no parent");
    return prefix(depth() - 1);
}

Path Path::child(std::string_view segment) const {
    auto segs = segments_;
    segs.push_back(to_lower(segment));
    return from_segments(std::move(segs));
}

Path Path::prefix(std::size_t n) const {
    if (n >= segments_.size()) return *this;
    return from_segments(std::vector<std::string>(segments_.begin(), segments_.begin() + static_cast<long>(n)));
}

bool Path::starts_with(const Path& ancestor) const { return text_.starts_with(ancestor.text_); }

Path canonicalize_path(std::string_view raw, const Path& base) {
    std::vector<std::string> segs;
    std::string_view rest = raw;
    if (rest.starts_with('/')) {
        rest.remove_prefix(1);
    } else {
        segs = base.segments();
    }

    bool first = true;
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        std::size_t slash = rest.find('/', pos);
        std::string_view part =
            rest.substr(pos, slash == std::string_view::npos ? std::string_view::npos : slash - pos);
        if (part.empty()) {
            // Only a trailing slash may produce an empty part.
            if (slash != std::string_view::npos) {
                throw PathError("empty path segment in '" + std::string(raw) + "'");
            }
        } else if (part == ".") {
            if (!first) throw PathError("'./' allowed only at the start of '" + std::string(raw) + "'");
        } else if (part == "..") {
            if (segs.empty()) throw PathError("path escapes above the root: '" + std::string(raw) + "'");
            segs.pop_back();
        } else {
            std::string seg = to_lower(part);
            if (!valid_segment(seg)) throw PathError("illegal path segment '" + std::string(part) + "'");
            segs.push_back(std::move(seg));
        }
        first = false;
        if (slash == std::string_view::npos) break;
        pos = slash + 1;
    }
    return Path::from_segments(std::move(segs));
}

std::string column_name(int col) {
    std::string out;
    while (col > 0) {
        int rem = (col - 1) % 26;
        out.insert(out.begin(), static_cast<char>('a' + rem));
        col = (col - 1) / 26;
    }
    return out;
}

std::optional<int> column_index(std::string_view letters) {
    if (letters.empty() || letters.size() > 3) return std::nullopt;
    int col = 0;
    for (char c : letters) {
        char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (l < 'a' || l > 'z') return std::nullopt;
        col = col * 26 + (l - 'a' + 1);
    }
    if (col > kMaxCol) return std::nullopt;
    return col;
}

std::string to_a1(CellAddr a) { return column_name(a.col) + std::to_string(a.row); }

std::optional<CellAddr> parse_a1(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
    if (i == 0 || i == text.size()) return std::nullopt;
    auto col = column_index(text.substr(0, i));
    if (!col) return std::nullopt;
    if (text[i] == '0') return std::nullopt;
    long row = 0;
    for (std::size_t j = i; j < text.size(); ++j) {
        if (!std::isdigit(static_cast<unsigned char>(text[j]))) return std::nullopt;
        row = row * 10 + (text[j] - '0');
        if (row > kMaxRow) return std::nullopt;
    }
    return CellAddr{*col, static_cast<int>(row)};
}

}  // namespace hn
