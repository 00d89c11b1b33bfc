"""Tokeniser for Essence source text."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError

KEYWORDS = frozenset({
    "language", "find", "given", "letting", "be", "domain", "such", "that",
    "where", "minimising", "maximising", "branching", "on", "new", "type",
    "enum", "of", "size", "in", "function", "sequence", "relation", "partition",
    "matrix", "indexed", "by", "set", "mset", "tuple", "record", "variant",
    "from", "bool", "int", "true", "false", "forAll", "exists", "sum", "product",
    # named operators
    "toInt", "toSet", "toMSet", "toRelation", "defined", "range", "image",
    "imageSet", "preImage", "inverse", "restrict", "freq", "hist", "max", "min",
    "pred", "succ", "allDiff", "alldifferent_except", "flatten", "powerSet",
    "party", "parts", "participants", "apart", "together", "subsequence",
    "substring", "and", "or", "xor", "factorial", "intersect", "union",
    "subset", "subsetEq", "supset", "supsetEq",
})

# longest first so maximal munch falls out of a simple scan
OPERATORS = sorted([
    "-->", "<->", "<=lex", ">=lex", "<lex", ">lex",
    "->", "<=", ">=", "!=", "..", "**", "/\\", "\\/", "<-",
    "+", "-", "*", "/", "%", "=", "<", ">", "!", "|",
], key=len, reverse=True)

PUNCTUATION = frozenset("()[]{},:;.")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | ident | int | op | punct | eof
    text: str
    line: int
    column: int

    def __repr__(self) -> str:
        return f"<{self.kind} {self.text!r} @{self.line}:{self.column}>"


def _ident_char(c: str) -> bool:
    return c.isalnum() or c == "_"


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c.isspace():
            i, col = i + 1, col + 1
            continue
        if c == "$":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_col = col
        if c.isalpha() or c == "_":
            j = i
            while j < n and _ident_char(source[j]):
                j += 1
            word = source[i:j]
            tokens.append(Token("keyword" if word in KEYWORDS else "ident", word, line, start_col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("int", source[i:j], line, start_col))
            col += j - i
            i = j
            continue
        for op in OPERATORS:
            if source.startswith(op, i):
                # `<lex` must not swallow the start of an identifier like `<lexicon`
                if op.endswith("lex") and i + len(op) < n and _ident_char(source[i + len(op)]):
                    continue
                tokens.append(Token("op", op, line, start_col))
                i += len(op)
                col += len(op)
                break
        else:
            if c in PUNCTUATION:
                tokens.append(Token("punct", c, line, start_col))
                i, col = i + 1, col + 1
                continue
            raise ParseError(f"unexpected character {c!r}", line, start_col)
    tokens.append(Token("eof", "", line, col))
    return tokens
