"""Tokenizer for the concrete surface syntax."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LexError

KEYWORDS = {
    "bool", "int", "bit", "error", "match_kind", "enum", "header", "record",
    "typedef", "const", "control", "table", "exit", "return", "if", "else",
    "switch", "case", "default", "union", "apply", "key", "actions",
    "true", "false",
}

# longest first so maximal munch works
PUNCT = [
    "<<", ">>", "++", "==", "!=", "<=", ">=", "&&", "||", ":=", "<:", ":>",
    "(", ")", "{", "}", "[", "]", "<", ">", ",", ";", ":", ".", "=",
    "+", "-", "*", "/", "%", "&", "|", "^", "!", "~",
]


@dataclass(frozen=True)
class Token:
    kind: str  # keyword/punct lexeme, or "ident", "int", "eof"
    lexeme: str
    value: object = None  # (value, width-or-None) for "int"
    pos: tuple = (0, 0)


def lex(text):
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        pos = (line, col)
        if c.isdigit():
            j = i
            if text.startswith("0x", i) or text.startswith("0X", i):
                j = i + 2
                while j < n and text[j] in "0123456789abcdefABCDEF":
                    j += 1
                if j == i + 2:
                    raise LexError(pos, "hex literal needs digits")
                value = int(text[i:j], 16)
            else:
                while j < n and text[j].isdigit():
                    j += 1
                value = int(text[i:j])
            width = None
            if j < n and text[j] == "w" and j + 1 < n and text[j + 1].isdigit():
                k = j + 1
                while k < n and text[k].isdigit():
                    k += 1
                width = int(text[j + 1:k])
                j = k
            tokens.append(Token("int", text[i:j], (value, width), pos))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_" or c == "$":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, None, pos))
            col += j - i
            i = j
            continue
        for p in PUNCT:
            if text.startswith(p, i):
                tokens.append(Token(p, p, None, pos))
                i += len(p)
                col += len(p)
                break
        else:
            raise LexError(pos, f"unexpected character {c!r}")
    tokens.append(Token("eof", "", None, (line, col)))
    return tokens
