#pragma once

// Line-oriented parsing helpers shared by the plain-text formats.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfctl/error.hpp"

namespace wfctl::text {

struct Line {
    std::size_t number;  // 1-based
    std::vector<std::string_view> words;
};

// Splits into non-empty lines of whitespace-separated words. A word starting
// with '#' opens a comment running to end of line; inside a word ('R1#2')
// the character is literal.
inline std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    while (!text.empty()) {
        ++number;
        const auto eol = text.find('\n');
        std::string_view raw = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            const std::size_t start = i;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            if (i > start && raw[start] == '#') break;
            if (i > start) line.words.push_back(raw.substr(start, i - start));
        }
        if (!line.words.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

[[noreturn]] inline void fail(std::size_t line, const std::string& message) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + message,
                static_cast<std::int64_t>(line));
}

template <typename Int>
std::optional<Int> to_int(std::string_view word) {
    Int value{};
    const auto* end = word.data() + word.size();
    const auto [ptr, ec] = std::from_chars(word.data(), end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

template <typename Int>
Int expect_int(const Line& line, std::size_t index, std::string_view what) {
    if (index >= line.words.size()) fail(line.number, "missing " + std::string(what));
    const auto value = to_int<Int>(line.words[index]);
    if (!value) {
        fail(line.number, "expected integer " + std::string(what) + ", got '" +
                              std::string(line.words[index]) + "'");
    }
    return *value;
}

inline std::optional<double> to_double(std::string_view word) {
    try {
        std::size_t used = 0;
        const std::string s(word);
        const double value = std::stod(s, &used);
        if (used != s.size()) return std::nullopt;
        return value;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

inline void expect_arity(const Line& line, std::size_t n) {
    if (line.words.size() != n) {
        fail(line.number, "'" + std::string(line.words[0]) + "' expects " + std::to_string(n - 1) +
                              " arguments, got " + std::to_string(line.words.size() - 1));
    }
}

inline bool is_word(std::string_view s) {
    if (s.empty()) return false;
    for (const char c : s) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == '#' ||
            static_cast<unsigned char>(c) > 0x7e || static_cast<unsigned char>(c) < 0x21) {
            return false;
        }
    }
    return true;
}

}  // namespace wfctl::text
