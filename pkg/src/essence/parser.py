"""Recursive-descent parser for Essence models, parameters and solutions."""

from __future__ import annotations

from . import ast as A
from .errors import ParseError
from .lexer import Token, tokenize

CALL_NAMES = frozenset({
    "toInt", "toSet", "toMSet", "toRelation", "defined", "range", "image",
    "imageSet", "preImage", "inverse", "restrict", "freq", "hist", "max", "min",
    "pred", "succ", "allDiff", "alldifferent_except", "flatten", "powerSet",
    "party", "parts", "participants", "apart", "together", "subsequence",
    "substring", "sum", "product", "and", "or", "xor", "factorial",
})
SHARED_OPS = frozenset({
    "=", "!=", "<", "<=", ">", ">=", "<lex", "<=lex", ">lex", ">=lex",
    "/\\", "\\/", "->", "<->",
})
SHARED_WORDS = frozenset({"in", "subset", "subsetEq", "supset", "supsetEq",
                          "subsequence", "substring"})
STATEMENT_STARTS = frozenset({"language", "find", "given", "letting", "such", "where",
                              "minimising", "maximising", "branching"})
DOMAIN_STARTS = frozenset({"bool", "int", "matrix", "set", "mset", "sequence",
                           "relation", "partition", "function", "tuple", "record",
                           "variant"})


class Parser:
    def __init__(self, tokens: list[Token], enums: set[str] | None = None,
                 unnamed: set[str] | None = None) -> None:
        self.toks = tokens
        self.pos = 0
        self.enums = set(enums or ())
        self.unnamed = set(unnamed or ())

    # ------------------------------------------------------------ helpers

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok.text == text and tok.kind in ("keyword", "op", "punct")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def error(self, message: str, expected: list[str] | None = None) -> ParseError:
        tok = self.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"{message}, found {found}", tok.line, tok.column, expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}", [repr(text)])
        return self.next()

    def name(self) -> str:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.error("expected a name", ["name"])
        self.pos += 1
        return tok.text

    def names(self) -> tuple[str, ...]:
        out = [self.name()]
        while self.accept(","):
            out.append(self.name())
        return tuple(out)

    def comma_list(self, item, close: str) -> tuple:
        out = []
        if self.at(close):
            return ()
        out.append(item())
        while self.accept(","):
            out.append(item())
        return tuple(out)

    # ------------------------------------------------------------ statements

    def model(self) -> A.Model:
        language = None
        if self.at("language"):
            self.next()
            word = self.name()
            if word != "Essence":
                raise ParseError(f"unknown language {word}", self.peek().line, self.peek().column)
            major = self.integer()
            self.expect(".")
            minor = self.integer()
            language = (major, minor)
        stmts: list[A.Statement] = []
        seen_objective = seen_branching = False
        while self.peek().kind != "eof":
            tok = self.peek()
            for st in self.statement():
                if isinstance(st, A.Objective):
                    if seen_objective:
                        raise ParseError("a model has at most one objective", tok.line, tok.column)
                    seen_objective = True
                if isinstance(st, A.Branching):
                    if seen_branching:
                        raise ParseError("a model has at most one branching statement",
                                         tok.line, tok.column)
                    seen_branching = True
                stmts.append(st)
        return A.Model(tuple(stmts), language)

    def integer(self) -> int:
        tok = self.peek()
        if tok.kind != "int":
            raise self.error("expected an integer", ["integer"])
        self.pos += 1
        return int(tok.text)

    def statement(self) -> list[A.Statement]:
        tok = self.peek()
        match tok.text if tok.kind == "keyword" else None:
            case "find":
                self.next()
                names = self.names()
                self.expect(":")
                return [A.Find(names, self.domain())]
            case "given":
                self.next()
                names = self.names()
                if self.accept("new"):
                    self.expect("type")
                    self.expect("enum")
                    self.enums.update(names)
                    return [A.GivenEnum(n) for n in names]
                self.expect(":")
                return [A.Given(names, self.domain())]
            case "letting":
                self.next()
                return [self.letting()]
            case "such":
                self.next()
                self.expect("that")
                return [A.SuchThat(self.expr_list())]
            case "where":
                self.next()
                return [A.Where(self.expr_list())]
            case "minimising" | "maximising":
                self.next()
                return [A.Objective(tok.text, self.expr())]
            case "branching":
                self.next()
                self.expect("on")
                self.expect("[")
                items = self.comma_list(self.expr, "]")
                self.expect("]")
                return [A.Branching(items)]
        raise self.error("expected a statement", sorted(STATEMENT_STARTS - {"language"}))

    def letting(self) -> A.Statement:
        name = self.name()
        self.expect("be")
        if self.accept("domain"):
            return A.LettingDomain(name, self.domain())
        if self.at("new"):
            self.next()
            self.expect("type")
            if self.accept("enum"):
                self.expect("{")
                members = self.comma_list(self.name, "}")
                self.expect("}")
                if len(set(members)) != len(members):
                    raise self.error(f"enum {name} lists a member twice")
                self.enums.add(name)
                return A.LettingEnum(name, members)
            self.expect("of")
            self.expect("size")
            self.unnamed.add(name)
            return A.LettingUnnamed(name, self.expr())
        return A.LettingExpr(name, self.expr())

    def expr_list(self) -> tuple[A.Expr, ...]:
        out = [self.expr()]
        while self.accept(","):
            nxt = self.peek()
            if nxt.kind == "eof" or (nxt.kind == "keyword" and nxt.text in STATEMENT_STARTS):
                break  # tolerate a trailing comma before the next statement
            out.append(self.expr())
        return tuple(out)

    # ------------------------------------------------------------ domains

    def domain(self) -> A.Domain:
        tok = self.peek()
        if tok.kind == "ident":
            self.next()
            if self.at("("):
                return A.EnumDomain(tok.text, self.ranges())
            if tok.text in self.enums:
                return A.EnumDomain(tok.text, ())
            if tok.text in self.unnamed:
                return A.UnnamedDomain(tok.text)
            return A.DomainAlias(tok.text)
        if self.at("("):
            self.next()
            comps = [self.domain()]
            while self.accept(","):
                comps.append(self.domain())
            self.expect(")")
            return comps[0] if len(comps) == 1 else A.TupleDomain(tuple(comps))
        kw = tok.text if tok.kind == "keyword" else None
        match kw:
            case "bool":
                self.next()
                return A.BoolDomain()
            case "int":
                self.next()
                return self.int_domain()
            case "matrix":
                self.next()
                self.expect("indexed")
                self.expect("by")
                self.expect("[")
                indices = self.comma_list(self.domain, "]")
                if not indices:
                    raise self.error("a matrix needs at least one index domain")
                self.expect("]")
                self.expect("of")
                return A.MatrixDomain(indices, self.domain())
            case "set" | "mset" | "sequence":
                self.next()
                attrs = self.attributes(kw)
                self.expect("of")
                cls = {"set": A.SetDomain, "mset": A.MSetDomain, "sequence": A.SequenceDomain}[kw]
                return cls(attrs, self.domain())
            case "function":
                self.next()
                attrs = self.attributes("function")
                src = self.domain()
                self.expect("-->")
                return A.FunctionDomain(attrs, src, self.domain())
            case "relation":
                self.next()
                attrs = self.attributes("relation")
                self.expect("of")
                self.expect("(")
                comps = [self.domain()]
                while self.accept("*"):
                    comps.append(self.domain())
                self.expect(")")
                return A.RelationDomain(attrs, tuple(comps))
            case "partition":
                self.next()
                attrs = self.attributes("partition")
                self.expect("from")
                return A.PartitionDomain(attrs, self.domain())
            case "tuple":
                self.next()
                self.expect("(")
                comps = self.comma_list(self.domain, ")")
                self.expect(")")
                return A.TupleDomain(comps)
            case "record" | "variant":
                self.next()
                self.expect("{")
                fields = self.comma_list(self.field_domain, "}")
                self.expect("}")
                names = [n for n, _ in fields]
                if len(set(names)) != len(names):
                    raise self.error(f"{kw} field names must be distinct")
                return (A.RecordDomain if kw == "record" else A.VariantDomain)(fields)
        raise self.error("expected a domain", sorted(DOMAIN_STARTS) + ["name"])

    def field_domain(self) -> tuple[str, A.Domain]:
        n = self.name()
        self.expect(":")
        return (n, self.domain())

    def ranges(self) -> tuple[A.Range, ...]:
        self.expect("(")
        out = self.comma_list(self.range, ")")
        self.expect(")")
        return out

    def int_domain(self) -> A.Domain:
        if not self.at("("):
            return A.IntDomain(())
        rs = self.ranges()
        # `int(e)` with a lone non-literal expression may denote a set of integers
        if len(rs) == 1 and isinstance(rs[0], A.Single) and not _is_int_literal(rs[0].value):
            return A.IntFromSet(rs[0].value)
        return A.IntDomain(rs)

    def range(self) -> A.Range:
        if self.accept(".."):
            if self.at(",") or self.at(")"):
                return A.Open()
            return A.To(self.expr())
        lo = self.expr()
        if self.accept(".."):
            if self.at(",") or self.at(")"):
                return A.From(lo)
            return A.Bounded(lo, self.expr())
        return A.Single(lo)

    def attributes(self, kind: str) -> A.Attrs:
        known = A.ATTRS_FOR[kind]
        if not self.at("("):
            return ()
        # for functions a parenthesis may instead open a tuple domain
        if kind == "function" and self.peek(1).text not in known:
            return ()
        self.next()
        out: list[tuple[str, A.Expr | None]] = []
        while True:
            tok = self.peek()
            if tok.kind not in ("ident", "keyword") or tok.text not in known:
                raise self.error(f"unknown attribute for {kind}", sorted(known))
            self.next()
            if any(n == tok.text for n, _ in out):
                raise ParseError(f"attribute {tok.text} given twice", tok.line, tok.column)
            if tok.text in A.VALUED_ATTRS:
                if self.at(",") or self.at(")"):
                    raise self.error(f"attribute {tok.text} needs a value")
                out.append((tok.text, self.expr()))
            else:
                out.append((tok.text, None))
            if not self.accept(","):
                break
        self.expect(")")
        return tuple(out)

    # ------------------------------------------------------------ expressions

    def expr(self) -> A.Expr:
        left = self.setop()
        while True:
            tok = self.peek()
            if (tok.kind == "op" and tok.text in SHARED_OPS) or \
               (tok.kind == "keyword" and tok.text in SHARED_WORDS):
                self.next()
                left = A.BinaryOp(tok.text, left, self.setop())
            else:
                return left

    def setop(self) -> A.Expr:
        left = self.additive()
        while self.at("intersect") or self.at("union"):
            op = self.next().text
            left = A.BinaryOp(op, left, self.additive())
        return left

    def additive(self) -> A.Expr:
        left = self.multiplicative()
        while self.at("+") or self.at("-"):
            op = self.next().text
            left = A.BinaryOp(op, left, self.multiplicative())
        return left

    def multiplicative(self) -> A.Expr:
        left = self.unary()
        while self.at("*") or self.at("/") or self.at("%"):
            op = self.next().text
            left = A.BinaryOp(op, left, self.unary())
        return left

    def unary(self) -> A.Expr:
        if self.at("-") or self.at("!"):
            op = self.next().text
            return A.UnaryOp(op, self.unary())
        return self.power()

    def power(self) -> A.Expr:
        base = self.postfix()
        if self.accept("**"):
            return A.BinaryOp("**", base, self.unary())
        return base

    def postfix(self) -> A.Expr:
        e = self.primary()
        while True:
            if self.at("["):
                self.next()
                idx = self.comma_list(self.expr, "]")
                self.expect("]")
                e = A.Index(e, idx)
            elif self.at("("):
                self.next()
                args = self.comma_list(self.expr, ")")
                self.expect(")")
                e = A.Apply(e, args)
            elif self.at("!"):
                self.next()
                e = A.UnaryOp("factorial", e)
            else:
                return e

    def primary(self) -> A.Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return A.IntLit(int(tok.text))
        if tok.kind == "ident":
            self.next()
            return A.Ref(tok.text)
        if tok.kind == "keyword":
            return self.keyword_primary(tok)
        if self.at("("):
            self.next()
            first = self.expr()
            if self.accept(","):
                items = [first] + list(self.comma_list(self.expr, ")"))
                self.expect(")")
                return A.TupleLit(tuple(items))
            self.expect(")")
            return first
        if self.at("["):
            return self.matrix_or_comprehension()
        if self.at("{"):
            self.next()
            items = self.comma_list(self.expr, "}")
            self.expect("}")
            return A.SetLit(items)
        if self.at("|"):
            self.next()
            inner = self.expr()
            self.expect("|")
            return A.UnaryOp("||", inner)
        raise self.error("expected an expression", ["expression"])

    def keyword_primary(self, tok: Token) -> A.Expr:
        kw = tok.text
        if kw in ("true", "false"):
            self.next()
            return A.BoolLit(kw == "true")
        if kw in ("forAll", "exists") or (kw in ("sum", "product") and not self.at("(", 1)):
            return self.quantified()
        if kw in CALL_NAMES and self.at("(", 1):
            self.next()
            self.next()
            args = self.comma_list(self.expr, ")")
            self.expect(")")
            return A.Call(kw, args)
        if kw in ("mset", "sequence", "relation", "tuple") and self.at("(", 1):
            self.next()
            self.next()
            items = self.comma_list(self.expr, ")")
            self.expect(")")
            cls = {"mset": A.MSetLit, "sequence": A.SequenceLit,
                   "relation": A.RelationLit, "tuple": A.TupleLit}[kw]
            return cls(items)
        if kw == "function" and self.at("(", 1):
            self.next()
            self.next()
            pairs = self.comma_list(self.maplet, ")")
            self.expect(")")
            return A.FunctionLit(pairs)
        if kw == "partition" and self.at("(", 1):
            self.next()
            self.next()
            parts = self.comma_list(self.part, ")")
            self.expect(")")
            return A.PartitionLit(parts)
        if kw in ("record", "variant") and self.at("{", 1):
            self.next()
            self.next()
            fields = self.comma_list(self.field_value, "}")
            self.expect("}")
            if kw == "variant":
                if len(fields) != 1:
                    raise self.error("a variant literal sets exactly one field")
                return A.VariantLit(*fields[0])
            names = [n for n, _ in fields]
            if len(set(names)) != len(names):
                raise self.error("record field names must be distinct")
            return A.RecordLit(fields)
        if kw in DOMAIN_STARTS:
            return A.DomainExpr(self.domain())
        raise self.error("expected an expression", ["expression"])

    def maplet(self) -> tuple[A.Expr, A.Expr]:
        k = self.expr()
        self.expect("-->")
        return (k, self.expr())

    def part(self) -> tuple[A.Expr, ...]:
        self.expect("{")
        items = self.comma_list(self.expr, "}")
        self.expect("}")
        return items

    def field_value(self) -> tuple[str, A.Expr]:
        n = self.name()
        self.expect("=")
        # parse below the shared tier so `=` is not taken as a comparison
        return (n, self.setop())

    def pattern(self) -> A.Pattern:
        if self.accept("("):
            items = [self.pattern()]
            while self.accept(","):
                items.append(self.pattern())
            self.expect(")")
            return A.TuplePattern(tuple(items))
        return A.NamePattern(self.name())

    def quantified(self) -> A.Expr:
        kind = self.next().text
        binders = [self.binder()]
        while self.accept(","):
            binders.append(self.binder())
        self.expect(".")
        return A.Quantified(kind, tuple(binders), self.expr())

    def binder(self) -> A.Binder:
        pats = [self.pattern()]
        while self.accept(","):
            pats.append(self.pattern())
        if self.accept(":"):
            return A.Binder(tuple(pats), ":", self.domain())
        if self.accept("in"):
            return A.Binder(tuple(pats), "in", self.expr())
        raise self.error("expected ':' or 'in' in quantifier", ["':'", "'in'"])

    def matrix_or_comprehension(self) -> A.Expr:
        self.expect("[")
        if self.accept("]"):
            return A.MatrixLit(())
        first = self.expr()
        if self.accept("|"):
            clauses: list[A.Generator | A.Condition] = []
            while True:
                clauses.extend(self.clause())
                if not self.accept(","):
                    break
            self.expect("]")
            if not any(isinstance(c, A.Generator) for c in clauses):
                raise self.error("a comprehension needs a generator")
            return A.Comprehension(first, tuple(clauses))
        items = [first]
        while self.accept(","):
            items.append(self.expr())
        index = None
        if self.accept(";"):
            index = self.domain()
        self.expect("]")
        return A.MatrixLit(tuple(items), index)

    def clause(self) -> list[A.Generator | A.Condition]:
        # `a, b : D` declares several generators over one domain
        k = 0
        while self.peek(k).kind == "ident" and self.at(",", k + 1):
            k += 2
        if self.peek(k).kind == "ident" and k and self.at(":", k + 1):
            names = self.names()
            self.expect(":")
            d = self.domain()
            return [A.Generator(A.NamePattern(n), ":", d) for n in names]
        if self.peek().kind == "ident" and (self.at(":", 1) or self.at("<-", 1)):
            pat = A.NamePattern(self.name())
            return [self.generator_tail(pat)]
        if self.at("("):
            end = self.matching_paren(self.pos)
            if end is not None and (self.at(":", end - self.pos + 1) or self.at("<-", end - self.pos + 1)):
                return [self.generator_tail(self.pattern())]
        return [A.Condition(self.expr())]

    def generator_tail(self, pat: A.Pattern) -> A.Generator:
        if self.accept(":"):
            return A.Generator(pat, ":", self.domain())
        self.expect("<-")
        return A.Generator(pat, "<-", self.expr())

    def matching_paren(self, start: int) -> int | None:
        depth = 0
        for i in range(start, len(self.toks)):
            t = self.toks[i]
            if t.kind == "punct" and t.text in "([{":
                depth += 1
            elif t.kind == "punct" and t.text in ")]}":
                depth -= 1
                if depth == 0:
                    return i
            elif t.kind == "eof":
                return None
        return None


def _is_int_literal(e: A.Expr) -> bool:
    return isinstance(e, A.IntLit) or (
        isinstance(e, A.UnaryOp) and e.op == "-" and isinstance(e.operand, A.IntLit))


# ---------------------------------------------------------------- entry points

def parse_model(source: str | list[Token]) -> A.Model:
    toks = tokenize(source) if isinstance(source, str) else source
    return Parser(toks).model()


def parse_expression(source: str, enums: set[str] | None = None,
                     unnamed: set[str] | None = None) -> A.Expr:
    p = Parser(tokenize(source), enums, unnamed)
    e = p.expr()
    if p.peek().kind != "eof":
        raise p.error("unexpected trailing input", ["end of input"])
    return e


def parse_domain(source: str, enums: set[str] | None = None,
                 unnamed: set[str] | None = None) -> A.Domain:
    p = Parser(tokenize(source), enums, unnamed)
    d = p.domain()
    if p.peek().kind != "eof":
        raise p.error("unexpected trailing input", ["end of input"])
    return d


LETTING_KINDS = (A.LettingExpr, A.LettingDomain, A.LettingEnum, A.LettingUnnamed)


def parse_param(source: str, enums: set[str] | None = None,
                unnamed: set[str] | None = None) -> list[A.Statement]:
    """Parse a parameter or solution file: letting statements only."""
    p = Parser(tokenize(source), enums, unnamed)
    out: list[A.Statement] = []
    if p.at("language"):
        p.next()
        p.name()
        p.integer()
        p.expect(".")
        p.integer()
    while p.peek().kind != "eof":
        tok = p.peek()
        for st in p.statement():
            if not isinstance(st, LETTING_KINDS):
                raise ParseError("only letting statements may appear here", tok.line, tok.column)
            out.append(st)
    return out
