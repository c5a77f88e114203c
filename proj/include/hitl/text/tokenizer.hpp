#pragma once

// Canonical tokenizer shared by every text metric.
//
// Input is decoded as UTF-8. Maximal runs of word characters (letters, digits,
// apostrophes) form one token; every other visible character is a token on
// its own; whitespace separates. Tokens are lowercased. Invalid byte
// sequences decode to U+FFFD, which counts as punctuation.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hitl {

using TokenSequence = std::vector<std::string>;

namespace utf8 {

/// Decodes one code point starting at `pos` and advances it.
inline char32_t decode(std::string_view s, std::size_t& pos) {
    constexpr char32_t kReplacement = 0xFFFD;
    auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
    unsigned char b0 = byte(pos);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int extra = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
        extra = 1; cp = b0 & 0x1F; min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2; cp = b0 & 0x0F; min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3; cp = b0 & 0x07; min = 0x10000;
    } else {
        ++pos;
        return kReplacement;
    }
    if (pos + static_cast<std::size_t>(extra) >= s.size()) {
        ++pos;
        return kReplacement;
    }
    for (int i = 1; i <= extra; ++i) {
        unsigned char b = byte(pos + i);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return kReplacement;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    pos += static_cast<std::size_t>(extra) + 1;
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return kReplacement;
    return cp;
}

inline void append(std::string& out, char32_t cp) {
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

} // namespace utf8

enum class CharClass { space, ignorable, word, punct };

inline CharClass classify(char32_t c) {
    if (c < 0x80) {
        if (c == ' ' || (c >= 0x09 && c <= 0x0D)) return CharClass::space;
        if (c < 0x20 || c == 0x7F) return CharClass::ignorable;
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '\'')
            return CharClass::word;
        return CharClass::punct;
    }
    if (c == 0x85 || c == 0xA0 || c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 ||
        c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000)
        return CharClass::space;
    if (c < 0xA0 || (c >= 0x200B && c <= 0x200F) || c == 0x00AD || c == 0xFEFF ||
        (c >= 0x202A && c <= 0x202E) || (c >= 0x2060 && c <= 0x2064))
        return CharClass::ignorable;
    if (c == 0x2019 || c == 0x02BC) return CharClass::word; // typographic apostrophes
    if (c == 0xAA || c == 0xB5 || c == 0xBA) return CharClass::word;
    if (c <= 0xBF || c == 0xD7 || c == 0xF7) return CharClass::punct;
    if ((c >= 0x2010 && c <= 0x206F) || (c >= 0x20A0 && c <= 0x20CF) ||
        (c >= 0x2100 && c <= 0x2BFF) || (c >= 0x2E00 && c <= 0x2E7F) ||
        (c >= 0x3001 && c <= 0x303F) || (c >= 0xE000 && c <= 0xF8FF) ||
        (c >= 0xFE10 && c <= 0xFE1F) || (c >= 0xFE30 && c <= 0xFE6F) ||
        (c >= 0xFF01 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) ||
        (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65) ||
        (c >= 0x1F000 && c <= 0x1FAFF) || c == 0xFFFD || c == 0x037E || c == 0x0387 ||
        (c >= 0x055A && c <= 0x055F) || c == 0x0589 || c == 0x05BE || c == 0x05C0 ||
        c == 0x05C3 || c == 0x05F3 || c == 0x05F4 || c == 0x060C || c == 0x061B ||
        c == 0x061F || (c >= 0x066A && c <= 0x066D) || c == 0x06D4)
        return CharClass::punct;
    return CharClass::word;
}

/// Simple case mapping for Latin, Greek, Cyrillic and Armenian; other scripts
/// pass through.
inline char32_t to_lower(char32_t c) {
    if (c >= 'A' && c <= 'Z') return c + 32;
    if (c < 0xC0) return c;
    if ((c >= 0xC0 && c <= 0xDE) && c != 0xD7) return c + 32;
    if (c >= 0x100 && c <= 0x137) return c | 1u;
    if (c >= 0x139 && c <= 0x148) return (c & 1u) ? c + 1 : c;
    if (c >= 0x14A && c <= 0x177) return c | 1u;
    if (c == 0x178) return 0xFF;
    if (c >= 0x179 && c <= 0x17E) return (c & 1u) ? c + 1 : c;
    if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 32;
    if (c >= 0x410 && c <= 0x42F) return c + 32;
    if (c >= 0x400 && c <= 0x40F) return c + 80;
    if (c >= 0x460 && c <= 0x481) return c | 1u;
    if (c >= 0x48A && c <= 0x4BF) return c | 1u;
    if (c >= 0x531 && c <= 0x556) return c + 48;
    if (c >= 0x1E00 && c <= 0x1E95) return c | 1u;
    if (c >= 0x1EA0 && c <= 0x1EFF) return c | 1u;
    return c;
}

inline TokenSequence tokenize(std::string_view text) {
    TokenSequence tokens;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            tokens.push_back(std::move(word));
            word.clear();
        }
    };
    std::size_t pos = 0;
    while (pos < text.size()) {
        char32_t c = utf8::decode(text, pos);
        switch (classify(c)) {
        case CharClass::word:
            utf8::append(word, to_lower(c));
            break;
        case CharClass::punct: {
            flush();
            std::string p;
            utf8::append(p, to_lower(c));
            tokens.push_back(std::move(p));
            break;
        }
        case CharClass::space:
            flush();
            break;
        case CharClass::ignorable:
            break;
        }
    }
    flush();
    return tokens;
}

/// True when the token contains at least one letter or digit, i.e. it is a
/// word rather than punctuation or a bare apostrophe.
inline bool is_word_token(std::string_view token) {
    std::size_t pos = 0;
    while (pos < token.size()) {
        char32_t c = utf8::decode(token, pos);
        if (c != '\'' && c != 0x2019 && c != 0x02BC && classify(c) == CharClass::word) return true;
    }
    return false;
}

} // namespace hitl
