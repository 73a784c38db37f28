#include "dsp/token.hpp"

#include <cctype>
#include <charconv>

namespace dsp {

const char* token_name(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::IntLit: return "integer literal";
        case Tok::RealLit: return "real literal";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Comma: return "','";
        case Tok::Semi: return "';'";
        case Tok::Colon: return "':'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Caret: return "'^'";
        case Tok::Le: return "'=<'";
        case Tok::Ge: return "'>='";
        case Tok::Lt: return "'<'";
        case Tok::Gt: return "'>'";
        case Tok::Eq: return "'='";
        case Tok::Ne: return "'\\='";
        case Tok::Eof: return "end of input";
    }
    return "?";
}

namespace {

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_blank();
            if (at_end()) break;
            out.push_back(next_token());
        }
        Token eof;
        eof.kind = Tok::Eof;
        eof.pos = pos_;
        out.push_back(eof);
        return out;
    }

private:
    const std::string& src_;
    std::size_t i_ = 0;
    Position pos_;

    bool at_end() const { return i_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const {
        return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0';
    }
    char advance() {
        char c = src_[i_++];
        if (c == '\n') {
            pos_.line++;
            pos_.col = 1;
        } else {
            pos_.col++;
        }
        return c;
    }

    void skip_blank() {
        for (;;) {
            if (at_end()) return;
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '-' && peek(1) == '-') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                return;
            }
        }
    }

    Token make(Tok kind, Position start, std::string text) {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.pos = start;
        return t;
    }

    Token next_token() {
        Position start = pos_;
        char c = peek();
        if (std::isalpha(static_cast<unsigned char>(c))) return ident(start);
        if (std::isdigit(static_cast<unsigned char>(c))) return number(start);
        advance();
        switch (c) {
            case '(': return make(Tok::LParen, start, "(");
            case ')': return make(Tok::RParen, start, ")");
            case '{': return make(Tok::LBrace, start, "{");
            case '}': return make(Tok::RBrace, start, "}");
            case '[': return make(Tok::LBracket, start, "[");
            case ']': return make(Tok::RBracket, start, "]");
            case ',': return make(Tok::Comma, start, ",");
            case ';': return make(Tok::Semi, start, ";");
            case ':': return make(Tok::Colon, start, ":");
            case '+': return make(Tok::Plus, start, "+");
            case '-': return make(Tok::Minus, start, "-");
            case '*': return make(Tok::Star, start, "*");
            case '/': return make(Tok::Slash, start, "/");
            case '^': return make(Tok::Caret, start, "^");
            case '=':
                if (peek() == '<') {
                    advance();
                    return make(Tok::Le, start, "=<");
                }
                return make(Tok::Eq, start, "=");
            case '>':
                if (peek() == '=') {
                    advance();
                    return make(Tok::Ge, start, ">=");
                }
                return make(Tok::Gt, start, ">");
            case '<': return make(Tok::Lt, start, "<");
            case '\\':
                if (peek() == '=') {
                    advance();
                    return make(Tok::Ne, start, "\\=");
                }
                throw LexError("illegal character '\\'", start);
            default:
                throw LexError(std::string("illegal character '") + c + "'", start);
        }
    }

    Token ident(Position start) {
        std::string text;
        while (!at_end()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                text += advance();
            } else {
                break;
            }
        }
        return make(Tok::Ident, start, std::move(text));
    }

    Token number(Position start) {
        std::string text;
        bool real = false;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
            text += advance();
        if (!at_end() && peek() == '.') {
            // A '.' must introduce a fraction; "0..5" is malformed.
            text += advance();
            real = true;
            if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
                throw LexError("malformed number '" + text + "'", start);
            while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
                text += advance();
        }
        if (!at_end() && (peek() == 'e' || peek() == 'E')) {
            text += advance();
            real = true;
            if (peek() == '+' || peek() == '-') text += advance();
            if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
                throw LexError("malformed number '" + text + "'", start);
            while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
                text += advance();
        }
        Token t = make(real ? Tok::RealLit : Tok::IntLit, start, text);
        if (real) {
            t.real_val = std::stod(text);
        } else {
            auto res = std::from_chars(text.data(), text.data() + text.size(), t.int_val);
            if (res.ec != std::errc())
                throw LexError("integer literal out of range '" + text + "'", start);
        }
        return t;
    }
};

}  // namespace

std::vector<Token> tokenize(const std::string& source) {
    return Lexer(source).run();
}

}  // namespace dsp
