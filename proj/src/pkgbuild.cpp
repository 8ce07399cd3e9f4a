// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#include "capivara/pkgbuild.hpp"

#include <cctype>
#include <optional>

#include "capivara/model.hpp"
#include "json_util.hpp"

namespace capivara::pkgbuild {

namespace {

using nlohmann::json;
namespace ju = json_util;

// Per-character quoting context. Single-quoted and backslash-escaped characters
// are fully literal; double-quoted ones still take variable substitution but not
// brace expansion.
enum class Quote : std::uint8_t { kNone, kDouble, kLiteral };

struct Word {
    std::string text;
    std::vector<Quote> quote;

    void push(char c, Quote q) {
        text.push_back(c);
        quote.push_back(q);
    }
};

Word unquoted(std::string_view s) {
    Word w;
    for (char c : s) w.push(c, Quote::kNone);
    return w;
}

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

//! Position of the '}' closing the "${" that starts at `open`, or npos.
std::size_t parameter_end(const Word& w, std::size_t open) {
    for (std::size_t i = open + 2; i < w.text.size(); ++i) {
        if (w.text[i] == '}' && w.quote[i] != Quote::kLiteral) return i;
    }
    return std::string::npos;
}

std::vector<Word> expand_word_braces(const Word& w) {
    const auto brace_eligible = [&](std::size_t i) { return w.quote[i] == Quote::kNone; };

    std::optional<std::size_t> open;
    std::size_t close = 0;
    std::vector<std::size_t> commas;
    for (std::size_t i = 0; i < w.text.size(); ++i) {
        const char c = w.text[i];
        if (c == '$' && i + 1 < w.text.size() && w.text[i + 1] == '{' && w.quote[i] != Quote::kLiteral) {
            const std::size_t end = parameter_end(w, i);
            if (end == std::string::npos) throw ParseError("unterminated ${ in '" + w.text + "'");
            i = end;
            continue;
        }
        if (!brace_eligible(i)) continue;
        if (c == '{') {
            if (open && close == 0) throw ParseError("nested brace groups are not supported: '" + w.text + "'");
            if (open) throw ParseError("more than one brace group in '" + w.text + "'");
            open = i;
        } else if (c == '}') {
            if (!open || close != 0) throw ParseError("unbalanced '}' in '" + w.text + "'");
            close = i;
        } else if (c == ',' && open && close == 0) {
            commas.push_back(i);
        }
    }
    if (open && close == 0) throw ParseError("unbalanced '{' in '" + w.text + "'");
    if (!open || commas.empty()) return {w};

    auto slice = [&](std::size_t from, std::size_t to) {
        Word out;
        out.text = w.text.substr(from, to - from);
        out.quote.assign(w.quote.begin() + static_cast<std::ptrdiff_t>(from),
                         w.quote.begin() + static_cast<std::ptrdiff_t>(to));
        return out;
    };
    const Word prefix = slice(0, *open);
    const Word suffix = slice(close + 1, w.text.size());

    std::vector<Word> out;
    std::size_t start = *open + 1;
    commas.push_back(close);
    for (std::size_t stop : commas) {
        Word alt = prefix;
        Word mid = slice(start, stop);
        alt.text += mid.text;
        alt.quote.insert(alt.quote.end(), mid.quote.begin(), mid.quote.end());
        alt.text += suffix.text;
        alt.quote.insert(alt.quote.end(), suffix.quote.begin(), suffix.quote.end());
        out.push_back(std::move(alt));
        start = stop + 1;
    }
    return out;
}

std::string substitute_word(const Word& w, const std::map<std::string, std::string>& bindings) {
    std::string out;
    std::size_t i = 0;
    while (i < w.text.size()) {
        const char c = w.text[i];
        if (c != '$' || w.quote[i] == Quote::kLiteral || i + 1 >= w.text.size()) {
            out.push_back(c);
            ++i;
            continue;
        }
        if (w.text[i + 1] == '{') {
            const std::size_t end = parameter_end(w, i);
            if (end != std::string::npos) {
                const std::string name = w.text.substr(i + 2, end - i - 2);
                auto it = bindings.find(name);
                if (it != bindings.end()) {
                    out += it->second;
                } else {
                    out += w.text.substr(i, end - i + 1);
                }
                i = end + 1;
                continue;
            }
        } else if (is_name_start(w.text[i + 1])) {
            std::size_t end = i + 1;
            while (end < w.text.size() && is_name_char(w.text[end]) && w.quote[end] != Quote::kLiteral) ++end;
            const std::string name = w.text.substr(i + 1, end - i - 1);
            auto it = bindings.find(name);
            if (it != bindings.end()) {
                out += it->second;
            } else {
                out += w.text.substr(i, end - i);
            }
            i = end;
            continue;
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

// Reads the assignment subset of shell syntax. Anything that is not
// `name=value`, `name=(...)` or a function definition is skipped line by line.
class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_{text} {}

    struct Assignment {
        std::string name;
        std::vector<Word> words;
        bool is_array{false};
        bool append{false};
    };

    std::optional<Assignment> next() {
        while (true) {
            skip_blank();
            if (eof()) return std::nullopt;
            if (peek() == '#') {
                skip_line();
                continue;
            }
            if (!is_name_start(peek())) {
                skip_statement();
                continue;
            }
            const std::size_t start = pos_;
            while (!eof() && is_name_char(peek())) ++pos_;
            std::string name(text_.substr(start, pos_ - start));

            if (name == "function") {
                skip_function();
                continue;
            }
            if (!eof() && peek() == '=') {
                ++pos_;
                return read_assignment(std::move(name));
            }
            if (!eof() && peek() == '+' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
                pos_ += 2;
                auto a = read_assignment(std::move(name));
                a.append = true;
                return a;
            }
            std::size_t look = pos_;
            while (look < text_.size() && (text_[look] == ' ' || text_[look] == '\t')) ++look;
            if (look + 1 < text_.size() && text_[look] == '(') {
                skip_function();
                continue;
            }
            skip_statement();
        }
    }

  private:
    [[nodiscard]] bool eof() const { return pos_ >= text_.size(); }
    [[nodiscard]] char peek() const { return text_[pos_]; }

    void skip_blank() {
        while (!eof()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ';') {
                ++pos_;
            } else if (c == '\\' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') {
                pos_ += 2;
            } else {
                break;
            }
        }
    }

    void skip_line() {
        while (!eof() && peek() != '\n') ++pos_;
    }

    // Skips to the end of the line, honoring quotes so a quoted newline does not end it.
    void skip_statement() {
        while (!eof() && peek() != '\n') {
            const char c = peek();
            if (c == '\'' || c == '"') {
                skip_quoted(c);
            } else {
                ++pos_;
            }
        }
    }

    void skip_quoted(char q) {
        ++pos_;
        while (!eof() && peek() != q) {
            if (q == '"' && peek() == '\\') ++pos_;
            ++pos_;
        }
        if (!eof()) ++pos_;
    }

    // Skips `name() { ... }` or `function name { ... }` by brace counting.
    void skip_function() {
        while (!eof() && peek() != '{') ++pos_;
        int depth = 0;
        while (!eof()) {
            const char c = peek();
            if (c == '\'' || c == '"') {
                skip_quoted(c);
                continue;
            }
            if (c == '#' && (pos_ == 0 || std::isspace(static_cast<unsigned char>(text_[pos_ - 1])))) {
                skip_line();
                continue;
            }
            if (c == '\\') {
                pos_ += 2;
                continue;
            }
            ++pos_;
            if (c == '{') ++depth;
            if (c == '}' && --depth == 0) return;
        }
    }

    Assignment read_assignment(std::string name) {
        Assignment a;
        a.name = std::move(name);
        if (!eof() && peek() == '(') {
            ++pos_;
            a.is_array = true;
            while (true) {
                skip_blank();
                if (eof()) throw ParseError("unterminated array for '" + a.name + "'");
                if (peek() == ')') {
                    ++pos_;
                    break;
                }
                if (peek() == '#') {
                    skip_line();
                    continue;
                }
                a.words.push_back(read_word(true));
            }
        } else {
            Word w = read_word(false);
            a.words.push_back(std::move(w));
        }
        return a;
    }

    Word read_word(bool in_array) {
        Word w;
        while (!eof()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ';') break;
            if (in_array && c == ')') break;
            if (c == '\\') {
                if (pos_ + 1 < text_.size()) {
                    if (text_[pos_ + 1] != '\n') w.push(text_[pos_ + 1], Quote::kLiteral);
                    pos_ += 2;
                } else {
                    ++pos_;
                }
                continue;
            }
            if (c == '\'') {
                ++pos_;
                while (!eof() && peek() != '\'') w.push(text_[pos_++], Quote::kLiteral);
                if (eof()) throw ParseError("unterminated single quote");
                ++pos_;
                continue;
            }
            if (c == '"') {
                ++pos_;
                while (!eof() && peek() != '"') {
                    if (peek() == '\\' && pos_ + 1 < text_.size()) {
                        const char n = text_[pos_ + 1];
                        if (n == '$' || n == '`' || n == '"' || n == '\\') {
                            w.push(n, Quote::kLiteral);
                            pos_ += 2;
                            continue;
                        }
                        if (n == '\n') {
                            pos_ += 2;
                            continue;
                        }
                    }
                    w.push(text_[pos_++], Quote::kDouble);
                }
                if (eof()) throw ParseError("unterminated double quote");
                ++pos_;
                continue;
            }
            w.push(c, Quote::kNone);
            ++pos_;
        }
        return w;
    }

    std::string_view text_;
    std::size_t pos_{0};
};

std::vector<std::string> evaluate(const std::vector<Word>& words, const std::map<std::string, std::string>& bindings) {
    std::vector<std::string> out;
    for (const auto& w : words) {
        for (const auto& alt : expand_word_braces(w)) out.push_back(substitute_word(alt, bindings));
    }
    return out;
}

struct SchemeKey {
    ChecksumScheme scheme;
    std::string_view key;
};

// Preference order when a recipe carries more than one checksum array.
constexpr SchemeKey kSchemes[] = {
    {ChecksumScheme::kSha256, "sha256sums"},
    {ChecksumScheme::kSha512, "sha512sums"},
    {ChecksumScheme::kSha1, "sha1sums"},
    {ChecksumScheme::kMd5, "md5sums"},
};

}  // namespace

std::string_view checksum_key(ChecksumScheme scheme) {
    for (const auto& s : kSchemes) {
        if (s.scheme == scheme) return s.key;
    }
    return {};
}

void PackageRecipe::refresh_checksum() { checksum = hash_bytes(canonical_recipe_bytes(*this)); }

std::string substitute_vars(std::string_view value, const std::map<std::string, std::string>& bindings) {
    return substitute_word(unquoted(value), bindings);
}

std::vector<std::string> expand_braces(std::string_view token) {
    std::vector<std::string> out;
    for (const auto& w : expand_word_braces(unquoted(token))) out.push_back(w.text);
    return out;
}

PackageRecipe parse_pkgbuild(std::string_view text) {
    Lexer lexer{text};
    std::map<std::string, std::string> bindings;
    std::map<std::string, std::vector<std::string>> values;

    while (auto a = lexer.next()) {
        std::vector<std::string> evaluated = evaluate(a->words, bindings);
        if (a->append) {
            auto& existing = values[a->name];
            existing.insert(existing.end(), evaluated.begin(), evaluated.end());
            evaluated = existing;
        }
        if (!a->is_array) {
            bindings[a->name] = evaluated.empty() ? std::string{} : evaluated.front();
        } else if (!evaluated.empty()) {
            bindings[a->name] = evaluated.front();
        } else {
            bindings.erase(a->name);
        }
        values[a->name] = std::move(evaluated);
    }

    auto scalar = [&](const std::string& key) -> std::optional<std::string> {
        auto it = values.find(key);
        if (it == values.end() || it->second.empty()) return std::nullopt;
        return it->second.front();
    };
    auto list = [&](const std::string& key) {
        auto it = values.find(key);
        return it == values.end() ? std::vector<std::string>{} : it->second;
    };

    PackageRecipe r;
    auto name = scalar("pkgname");
    if (!name || name->empty()) throw ParseError("missing pkgname");
    auto version = scalar("pkgver");
    if (!version || version->empty()) throw ParseError("missing pkgver");
    r.name = *name;
    r.version = *version;

    if (auto rel = scalar("pkgrel")) {
        try {
            std::size_t used = 0;
            r.release = std::stoll(*rel, &used);
            if (used != rel->size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ParseError("pkgrel must be an integer, got '" + *rel + "'");
        }
    }
    r.description = scalar("pkgdesc").value_or("");
    r.url = scalar("url").value_or("");
    r.architectures = list("arch");
    r.licenses = list("license");
    r.depends = list("depends");
    r.makedepends = list("makedepends");
    r.optdepends = list("optdepends");
    r.sources = list("source");
    r.valid_pgp_keys = list("validpgpkeys");
    for (const auto& s : kSchemes) {
        if (values.contains(std::string(s.key))) {
            r.checksum_scheme = s.scheme;
            r.checksums = list(std::string(s.key));
            break;
        }
    }
    if (!r.sources.empty() && !r.checksums.empty() && r.sources.size() != r.checksums.size()) {
        throw ParseError("checksum count " + std::to_string(r.checksums.size()) + " does not match source count " +
                         std::to_string(r.sources.size()));
    }
    r.refresh_checksum();
    return r;
}

nlohmann::json to_json(const PackageRecipe& r) {
    json j{{"arch", r.architectures},
           {"depends", r.depends},
           {"license", r.licenses},
           {"makedepends", r.makedepends},
           {"name", r.name},
           {"optdepends", r.optdepends},
           {"parser", r.parser_version},
           {"pkgdesc", r.description},
           {"pkgrel", r.release},
           {"pkgver", r.version},
           {"source", r.sources},
           {"url", r.url},
           {"validpgpkeys", r.valid_pgp_keys}};
    if (r.checksum_scheme != ChecksumScheme::kNone) j[std::string(checksum_key(r.checksum_scheme))] = r.checksums;
    return j;
}

PackageRecipe recipe_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("recipe must be an object");
    PackageRecipe r;
    std::size_t expected_fields = 13;
    for (const auto& s : kSchemes) {
        if (j.contains(s.key)) {
            if (r.checksum_scheme != ChecksumScheme::kNone) throw ParseError("recipe carries two checksum arrays");
            r.checksum_scheme = s.scheme;
            r.checksums = ju::get_string_list<ParseError>(j, s.key);
            ++expected_fields;
        }
    }
    for (auto key : {"arch", "depends", "license", "makedepends", "name", "optdepends", "parser", "pkgdesc", "pkgrel",
                     "pkgver", "source", "url", "validpgpkeys"}) {
        if (!j.contains(key)) throw ParseError(std::string("recipe missing field '") + key + "'");
    }
    if (j.size() != expected_fields) throw ParseError("recipe has unknown fields");

    r.architectures = ju::get_string_list<ParseError>(j, "arch");
    r.depends = ju::get_string_list<ParseError>(j, "depends");
    r.licenses = ju::get_string_list<ParseError>(j, "license");
    r.makedepends = ju::get_string_list<ParseError>(j, "makedepends");
    r.name = ju::get_string<ParseError>(j, "name");
    r.optdepends = ju::get_string_list<ParseError>(j, "optdepends");
    r.parser_version = ju::get_string<ParseError>(j, "parser");
    r.description = ju::get_string<ParseError>(j, "pkgdesc");
    r.release = ju::get_int<ParseError>(j, "pkgrel");
    r.version = ju::get_string<ParseError>(j, "pkgver");
    r.sources = ju::get_string_list<ParseError>(j, "source");
    r.url = ju::get_string<ParseError>(j, "url");
    r.valid_pgp_keys = ju::get_string_list<ParseError>(j, "validpgpkeys");
    if (r.name.empty() || r.version.empty()) throw ParseError("recipe name and version must be non-empty");
    if (r.parser_version != kParserVersion) throw ParseError("unsupported parser version '" + r.parser_version + "'");
    r.refresh_checksum();
    return r;
}

std::string canonical_recipe_bytes(const PackageRecipe& recipe) { return canonical_dump(to_json(recipe)); }

}  // namespace capivara::pkgbuild
