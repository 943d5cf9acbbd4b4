#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace docdiff {

// ---------------------------------------------------------------------------
// UTF-8 <-> code point helpers. Invalid byte sequences are decoded as the
// Latin-1 value of the offending byte so that dirty OCR output never throws.
// ---------------------------------------------------------------------------

inline std::vector<char32_t> decode_utf8(const std::string& s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    const auto n = s.size();
    while (i < n) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        int len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            len = 1;
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            out.push_back(b0);  // stray continuation byte
            ++i;
            continue;
        }
        if (i + len > n) {
            out.push_back(b0);
            ++i;
            continue;
        }
        bool ok = true;
        for (int k = 1; k < len; ++k) {
            const auto bk = static_cast<unsigned char>(s[i + k]);
            if ((bk & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (bk & 0x3F);
        }
        if (!ok) {
            out.push_back(b0);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string encode_utf8(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (auto cp : cps) append_utf8(out, cp);
    return out;
}

// ---------------------------------------------------------------------------
// Character classes used by the editorial comparison rules.
// ---------------------------------------------------------------------------

inline bool is_dash_like(char32_t c) {
    switch (c) {
        case U'-':
        case 0x2010:  // hyphen
        case 0x2011:  // non-breaking hyphen
        case 0x2012:  // figure dash
        case 0x2013:  // en dash
        case 0x2014:  // em dash
        case 0x2015:  // horizontal bar
        case 0x2212:  // minus sign
            return true;
        default:
            return false;
    }
}

inline bool is_quote_like(char32_t c) {
    switch (c) {
        case U'\'':
        case U'"':
        case U'`':
        case 0x00AB:  // «
        case 0x00BB:  // »
        case 0x2018:
        case 0x2019:
        case 0x201A:
        case 0x201B:
        case 0x201C:
        case 0x201D:
        case 0x201E:
        case 0x201F:
        case 0x2039:
        case 0x203A:
            return true;
        default:
            return false;
    }
}

/// Lowercase fold covering ASCII, Latin-1 and the Latin Extended-A range.
inline char32_t fold_lower(char32_t c) {
    if (c >= U'A' && c <= U'Z') return c + 32;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;  // À..Þ except ×
    if (c == 0x178) return 0xFF;                             // Ÿ -> ÿ
    if (c >= 0x100 && c <= 0x177 && (c % 2 == 0)) return c + 1;
    if (c >= 0x179 && c <= 0x17D && (c % 2 == 1)) return c + 1;
    return c;
}

inline bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

inline bool is_letter(char32_t c) {
    if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')) return true;
    if (c >= 0xC0 && c <= 0x17F && c != 0xD7 && c != 0xF7) return true;
    return c >= 0x180;  // treat higher-plane code points as letters
}

inline bool is_alnum(char32_t c) { return is_ascii_digit(c) || is_letter(c); }

/// Confusable class id for cost-free substitutions; 0 means "no class".
inline int confusable_class(char32_t c) {
    if (is_dash_like(c)) return 1;
    if (is_quote_like(c)) return 2;
    switch (c) {
        case U'O':
        case U'o':
        case U'0':
            return 3;
        case U'I':
        case U'l':
        case U'1':
        case U'|':
            return 4;
        default:
            return 0;
    }
}

inline int substitution_cost(char32_t a, char32_t b) {
    if (a == b) return 0;
    const int ca = confusable_class(a);
    return (ca != 0 && ca == confusable_class(b)) ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Kernel normalization
// ---------------------------------------------------------------------------

/// Reduce a recognized word to its comparison kernel: dash/quote variants are
/// canonicalized, O/0 and I/l/1/| are resolved by the token's digit majority,
/// everything is lowercased, and punctuation is dropped except -, /, ., ,
/// sitting between digits.
inline std::string normalize_kernel(const std::string& raw) {
    std::vector<char32_t> cps = decode_utf8(raw);

    for (auto& c : cps) {
        if (is_dash_like(c))
            c = U'-';
        else if (is_quote_like(c))
            c = U'\'';
    }

    int digits = 0;
    int letters = 0;
    for (auto c : cps) {
        if (is_ascii_digit(c))
            ++digits;
        else if (is_letter(c))
            ++letters;
    }
    const bool digit_majority = digits > letters;

    for (auto& c : cps) {
        if (digit_majority) {
            if (c == U'O' || c == U'o') c = U'0';
            if (c == U'I' || c == U'l' || c == U'|') c = U'1';
        } else {
            if (c == U'0') c = U'o';
            if (c == U'1' || c == U'|') c = U'l';
        }
    }

    for (auto& c : cps) c = fold_lower(c);

    std::size_t begin = 0;
    std::size_t end = cps.size();
    while (begin < end && !is_alnum(cps[begin])) ++begin;
    while (end > begin && !is_alnum(cps[end - 1])) --end;

    std::vector<char32_t> out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
        const char32_t c = cps[i];
        if (is_alnum(c)) {
            out.push_back(c);
            continue;
        }
        const bool keepable = (c == U'-' || c == U'/' || c == U'.' || c == U',');
        if (keepable && i > begin && i + 1 < end && is_ascii_digit(cps[i - 1]) &&
            is_ascii_digit(cps[i + 1])) {
            out.push_back(c);
        }
    }
    return encode_utf8(out);
}

}  // namespace docdiff
