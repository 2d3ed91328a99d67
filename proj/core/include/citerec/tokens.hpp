#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace citerec {

enum class TokenKind { word, citation_marker };

// One normalized token. Word text is lowercase and whitespace-free; marker
// text is the cited document id, untouched by normalization.
struct Token {
    TokenKind kind = TokenKind::word;
    std::string text;

    static Token word(std::string text) { return {TokenKind::word, std::move(text)}; }
    static Token marker(std::string id) { return {TokenKind::citation_marker, std::move(id)}; }

    bool is_marker() const { return kind == TokenKind::citation_marker; }

    bool operator==(const Token&) const = default;
};

// Citation-marker wire form: "⟦CITE:" + id + "⟧". Ids may not contain "⟧".
inline constexpr std::string_view kMarkerOpen = "\xE2\x9F\xA6"
                                                "CITE:";
inline constexpr std::string_view kMarkerClose = "\xE2\x9F\xA7";

std::string marker_wire(std::string_view id);

// Parses a whole string as a marker wire form; returns the id on success.
std::optional<std::string_view> parse_marker_wire(std::string_view text);

// Lowercases ASCII, splits on Unicode whitespace, strips leading/trailing
// ASCII punctuation from each token, and emits marker tokens for embedded
// citation-marker wire forms. Total and deterministic.
std::vector<Token> tokenize(std::string_view text);

struct StopwordSet {
    std::unordered_set<std::string> words;

    bool contains(const Token& token) const {
        return !token.is_marker() && words.count(token.text) > 0;
    }
    bool contains(std::string_view word) const { return words.count(std::string(word)) > 0; }
    std::size_t size() const { return words.size(); }
};

// Built-in English list; identical to the data/stopwords.txt file shipped
// with the repository.
const StopwordSet& default_stopwords();

// One word per line, UTF-8, "#" starts a comment. Every entry is passed
// through the tokenizer so the set is closed under normalization.
StopwordSet load_stopwords(const std::filesystem::path& path);

// Drops stop words; markers are never removed; order is preserved.
std::vector<Token> remove_stopwords(std::vector<Token> tokens, const StopwordSet& stopwords);

// Number of non-stopword word tokens (markers do not count).
std::size_t content_word_count(const std::vector<Token>& tokens, const StopwordSet& stopwords);

}  // namespace citerec
