#include "lexer.hpp"

#include <array>
#include <charconv>
#include <limits>

namespace modat::detail {

namespace {

constexpr std::array kKeywords = {
    "block",  "kind",    "component", "composite", "variant",    "of",     "part",
    "attr",   "function", "override", "lanes",     "node",       "call",   "set",
    "entry",  "exit",    "start",     "end",       "on",         "completion",
    "when",   "policy",  "resume",    "restart",   "continue",   "root",   "system",
    "input",  "output",  "internal",  "and",       "or",         "not",    "then",
    "invoke", "at",      "expect",    "forbid",    "maxcycles",  "BOOL",   "INT",
    "REAL",   "TIME",   "self",
};

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    Lexer(std::string_view text, std::string_view file) : text_(text), file_(file) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_trivia();
            Token t = next();
            bool done = t.kind == Tok::End;
            out.push_back(std::move(t));
            if (done) break;
        }
        return out;
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }
    bool at_end() const { return pos_ >= text_.size(); }

    void advance() {
        if (at_end()) return;
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_trivia() {
        while (!at_end()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token make(Tok kind, int line, int col, std::size_t start) {
        Token t;
        t.kind = kind;
        t.text = std::string(text_.substr(start, pos_ - start));
        t.span = SourceSpan{std::string(file_), line, col, line_, std::max(col_ - 1, col)};
        return t;
    }

    Token error(int line, int col, std::size_t start, std::string message) {
        Token t = make(Tok::Error, line, col, start);
        t.text = std::move(message);
        return t;
    }

    Token next() {
        const int line = line_;
        const int col = col_;
        const std::size_t start = pos_;
        if (at_end()) {
            Token t;
            t.kind = Tok::End;
            t.span = SourceSpan{std::string(file_), line, col, line, col};
            return t;
        }
        char c = peek();
        if ((c == 'T' && peek(1) == '#') || text_.substr(pos_, 5) == "TIME#") {
            return time_literal(line, col, start);
        }
        if (ident_start(c)) {
            while (ident_char(peek())) advance();
            Token t = make(Tok::Ident, line, col, start);
            if (t.text == "TRUE" || t.text == "FALSE") {
                t.kind = Tok::Bool;
                t.boolean = t.text == "TRUE";
            } else if (is_keyword(t.text)) {
                t.kind = Tok::Keyword;
            }
            return t;
        }
        if (digit(c)) return number(line, col, start);

        auto single = [&](Tok k) {
            advance();
            return make(k, line, col, start);
        };
        auto pair = [&](Tok k) {
            advance();
            advance();
            return make(k, line, col, start);
        };
        switch (c) {
            case '{': return single(Tok::LBrace);
            case '}': return single(Tok::RBrace);
            case '(': return single(Tok::LParen);
            case ')': return single(Tok::RParen);
            case ',': return single(Tok::Comma);
            case '.': return single(Tok::Dot);
            case '+': return single(Tok::Plus);
            case '*': return single(Tok::Star);
            case '-': return peek(1) == '>' ? pair(Tok::Arrow) : single(Tok::Minus);
            case ':': return peek(1) == '=' ? pair(Tok::Assign) : single(Tok::Colon);
            case '=': return peek(1) == '=' ? pair(Tok::EqEq) : single(Tok::Equals);
            case '!':
                if (peek(1) == '=') return pair(Tok::NotEq);
                advance();
                return error(line, col, start, "unexpected character '!'");
            case '<':
                if (peek(1) == '=') return pair(Tok::Le);
                if (peek(1) == '>') return pair(Tok::NotEq);
                return single(Tok::Lt);
            case '>': return peek(1) == '=' ? pair(Tok::Ge) : single(Tok::Gt);
            default: break;
        }
        advance();
        auto byte = static_cast<unsigned char>(c);
        if (byte >= 0x80 || byte < 0x20) {
            // Skip the rest of a multi-byte sequence so it yields one error.
            while (!at_end() && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80) advance();
            return error(line, col, start, "invalid character in source (identifiers are ASCII)");
        }
        return error(line, col, start, std::string("unexpected character '") + c + "'");
    }

    Token number(int line, int col, std::size_t start) {
        bool isReal = false;
        while (digit(peek())) advance();
        if (peek() == '.' && digit(peek(1))) {
            isReal = true;
            advance();
            while (digit(peek())) advance();
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && digit(peek(2))))) {
            isReal = true;
            advance();
            if (peek() == '+' || peek() == '-') advance();
            while (digit(peek())) advance();
        }
        if (ident_char(peek())) {
            while (ident_char(peek())) advance();
            return error(line, col, start, "malformed number");
        }
        Token t = make(isReal ? Tok::Real : Tok::Int, line, col, start);
        const char* b = t.text.data();
        const char* e = b + t.text.size();
        if (isReal) {
            auto [p, ec] = std::from_chars(b, e, t.real);
            if (ec != std::errc{} || p != e) return error(line, col, start, "real literal out of range");
        } else {
            auto [p, ec] = std::from_chars(b, e, t.integer);
            if (ec != std::errc{} || p != e) {
                return error(line, col, start, "integer literal out of range");
            }
        }
        return t;
    }

    Token time_literal(int line, int col, std::size_t start) {
        while (peek() != '#') advance();
        advance();
        std::int64_t total = 0;
        bool any = false;
        constexpr std::int64_t kLimit = std::numeric_limits<std::int64_t>::max() / 2;
        while (digit(peek())) {
            std::int64_t n = 0;
            while (digit(peek())) {
                if (n > kLimit / 10) return skip_bad_time(line, col, start);
                n = n * 10 + (peek() - '0');
                advance();
            }
            std::int64_t scale = 0;
            if (peek() == 'm' && peek(1) == 's') {
                scale = 1;
                advance();
                advance();
            } else if (peek() == 'm') {
                scale = 60'000;
                advance();
            } else if (peek() == 's') {
                scale = 1000;
                advance();
            } else if (peek() == 'h') {
                scale = 3'600'000;
                advance();
            } else if (peek() == 'd') {
                scale = 86'400'000;
                advance();
            } else {
                return skip_bad_time(line, col, start);
            }
            if (n > kLimit / scale || total > kLimit - n * scale) {
                return skip_bad_time(line, col, start);
            }
            total += n * scale;
            any = true;
        }
        if (!any || ident_char(peek())) return skip_bad_time(line, col, start);
        Token t = make(Tok::Time, line, col, start);
        t.integer = total;
        return t;
    }

    Token skip_bad_time(int line, int col, std::size_t start) {
        while (ident_char(peek())) advance();
        return error(line, col, start, "malformed duration literal (expected e.g. T#250ms)");
    }

    std::string_view text_;
    std::string_view file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

bool is_keyword(std::string_view word) {
    for (auto* k : kKeywords) {
        if (word == k) return true;
    }
    return false;
}

std::vector<Token> tokenize(std::string_view text, std::string_view file) {
    return Lexer(text, file).run();
}

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::End: return "end of input";
        case Tok::Ident: return "identifier '" + t.text + "'";
        case Tok::Keyword: return "keyword '" + t.text + "'";
        case Tok::Error: return "invalid token";
        default: return "'" + t.text + "'";
    }
}

}  // namespace modat::detail
