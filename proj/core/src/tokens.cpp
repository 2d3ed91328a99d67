#include "citerec/tokens.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>

#include "citerec/errors.hpp"

namespace citerec {

namespace {

bool is_ascii(unsigned char c) { return c < 0x80; }

// Decodes the code point starting at text[pos]; advances pos past it.
// Invalid sequences are consumed one byte at a time and returned verbatim.
char32_t decode_utf8(std::string_view text, std::size_t& pos) {
    unsigned char lead = static_cast<unsigned char>(text[pos]);
    std::size_t len = 1;
    char32_t cp = lead;
    if (lead >= 0xF0) {
        len = 4;
        cp = lead & 0x07U;
    } else if (lead >= 0xE0) {
        len = 3;
        cp = lead & 0x0FU;
    } else if (lead >= 0xC0) {
        len = 2;
        cp = lead & 0x1FU;
    }
    if (len == 1 || pos + len > text.size()) {
        ++pos;
        return lead;
    }
    for (std::size_t i = 1; i < len; ++i) {
        unsigned char cont = static_cast<unsigned char>(text[pos + i]);
        if ((cont & 0xC0U) != 0x80U) {
            ++pos;
            return lead;
        }
        cp = (cp << 6) | (cont & 0x3FU);
    }
    pos += len;
    return cp;
}

bool is_unicode_space(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_ascii_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Strip rule: leading/trailing ASCII non-alphanumerics go, everything else
// (including multi-byte sequences and internal punctuation) stays.
std::string_view strip_edges(std::string_view word) {
    while (!word.empty() && is_ascii(static_cast<unsigned char>(word.front())) &&
           !is_ascii_alnum(static_cast<unsigned char>(word.front()))) {
        word.remove_prefix(1);
    }
    while (!word.empty() && is_ascii(static_cast<unsigned char>(word.back())) &&
           !is_ascii_alnum(static_cast<unsigned char>(word.back()))) {
        word.remove_suffix(1);
    }
    return word;
}

void flush_word(std::string& pending, std::vector<Token>& out) {
    std::string_view stripped = strip_edges(pending);
    if (!stripped.empty()) {
        out.push_back(Token::word(std::string(stripped)));
    }
    pending.clear();
}

}  // namespace

std::string marker_wire(std::string_view id) {
    std::string wire;
    wire.reserve(kMarkerOpen.size() + id.size() + kMarkerClose.size());
    wire.append(kMarkerOpen);
    wire.append(id);
    wire.append(kMarkerClose);
    return wire;
}

std::optional<std::string_view> parse_marker_wire(std::string_view text) {
    if (text.size() <= kMarkerOpen.size() + kMarkerClose.size()) return std::nullopt;
    if (text.substr(0, kMarkerOpen.size()) != kMarkerOpen) return std::nullopt;
    if (text.substr(text.size() - kMarkerClose.size()) != kMarkerClose) return std::nullopt;
    std::string_view id =
        text.substr(kMarkerOpen.size(), text.size() - kMarkerOpen.size() - kMarkerClose.size());
    if (id.find(kMarkerClose) != std::string_view::npos) return std::nullopt;
    return id;
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::string pending;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::string_view rest = text.substr(pos);
        if (rest.starts_with(kMarkerOpen)) {
            std::size_t close = rest.find(kMarkerClose, kMarkerOpen.size());
            if (close != std::string_view::npos) {
                flush_word(pending, out);
                out.push_back(Token::marker(
                    std::string(rest.substr(kMarkerOpen.size(), close - kMarkerOpen.size()))));
                pos += close + kMarkerClose.size();
                continue;
            }
            // Unterminated wire form: fall through and treat as plain text.
        }
        std::size_t start = pos;
        char32_t cp = decode_utf8(text, pos);
        if (is_unicode_space(cp)) {
            flush_word(pending, out);
            continue;
        }
        for (std::size_t i = start; i < pos; ++i) {
            char c = text[i];
            if (is_ascii(static_cast<unsigned char>(c)) && c >= 'A' && c <= 'Z') {
                c = static_cast<char>(c - 'A' + 'a');
            }
            pending.push_back(c);
        }
    }
    flush_word(pending, out);
    return out;
}

std::vector<Token> remove_stopwords(std::vector<Token> tokens, const StopwordSet& stopwords) {
    std::erase_if(tokens, [&](const Token& t) { return stopwords.contains(t); });
    return tokens;
}

std::size_t content_word_count(const std::vector<Token>& tokens, const StopwordSet& stopwords) {
    return static_cast<std::size_t>(
        std::count_if(tokens.begin(), tokens.end(), [&](const Token& t) {
            return !t.is_marker() && !stopwords.contains(t);
        }));
}

namespace {

constexpr std::string_view kDefaultStopwords[] = {
    "a", "about", "above", "after", "again", "against", "all", "almost", "also", "although",
    "always", "am", "among", "an", "and", "another", "any", "are", "aren't", "as", "at", "be",
    "because", "been", "before", "being", "below", "between", "both", "but", "by", "can",
    "cannot", "can't", "could", "couldn't", "did", "didn't", "do", "does", "doesn't", "doing",
    "don't", "down", "during", "each", "either", "else", "etc", "ever", "every", "few", "for",
    "from", "further", "had", "hadn't", "has", "hasn't", "have", "haven't", "having", "he",
    "hence", "her", "here", "hers", "herself", "him", "himself", "his", "how", "however", "i",
    "if", "in", "into", "is", "isn't", "it", "its", "itself", "just", "least", "less", "let",
    "may", "me", "might", "more", "most", "much", "must", "mustn't", "my", "myself", "neither",
    "never", "no", "nor", "not", "now", "of", "off", "often", "on", "once", "only", "or",
    "other", "ought", "our", "ours", "ourselves", "out", "over", "own", "per", "rather", "said",
    "same", "shall", "she", "should", "shouldn't", "since", "so", "some", "such", "than",
    "that", "the", "their", "theirs", "them", "themselves", "then", "there", "therefore",
    "these", "they", "this", "those", "though", "through", "thus", "to", "too", "under",
    "until", "up", "upon", "us", "very", "was", "wasn't", "we", "were", "weren't", "what",
    "when", "where", "whether", "which", "while", "who", "whom", "whose", "why", "will",
    "with", "within", "without", "won't", "would", "wouldn't", "yet", "you", "your", "yours",
    "yourself", "yourselves"};

}  // namespace

const StopwordSet& default_stopwords() {
    static const StopwordSet set = [] {
        StopwordSet s;
        s.words.reserve(std::size(kDefaultStopwords));
        for (std::string_view w : kDefaultStopwords) s.words.emplace(w);
        return s;
    }();
    return set;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read stop-word list: " + path.string());
    }
    StopwordSet set;
    std::string line;
    while (std::getline(in, line)) {
        if (std::size_t hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        // Normalizing each entry keeps the set closed under the tokenizer.
        for (const Token& token : tokenize(line)) {
            if (!token.is_marker()) set.words.insert(token.text);
        }
    }
    return set;
}

}  // namespace citerec
