"""Tokenizer, parser and pretty-printer for the orient-rr script language.

A script is a sequence of ``;``-terminated statements::

    theory multiplicative;
    space P2 = proj 2;
    bundle L = roots(h)@P2;
    eval c1(tensor(L, L));

Parsing also resolves names: every identifier must be a declared space,
bundle or embedding, a generator of a declared space, a coefficient symbol
of the current theory, or a built-in function with the right arity.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from ..space import fresh_gen_name


class ScriptError(Exception):
    """Parse-time diagnostic with a machine-readable code and a position."""

    def __init__(self, code: str, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.code = code
        self.message = message
        self.line = line
        self.column = column

    def as_dict(self):
        return {"code": self.code, "message": self.message,
                "line": self.line, "column": self.column}


# tokens -------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+) | (?P<comment>\#[^\n]*) |
    (?P<num>\d+) | (?P<ident>[A-Za-z_][A-Za-z0-9_]*) |
    (?P<op>[;=(),@+\-*/^:])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str):
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ScriptError("syntax", f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind not in ("ws", "comment"):
            out.append(Token(kind, s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


# syntax tree --------------------------------------------------------------------

@dataclass
class Node:
    line: int = field(default=0, compare=False, repr=False)
    column: int = field(default=0, compare=False, repr=False)


@dataclass
class Num(Node):
    value: int = 0


@dataclass
class Name(Node):
    name: str = ""
    at: Optional[str] = None


@dataclass
class Call(Node):
    func: str = ""
    args: tuple = ()
    at: Optional[str] = None


@dataclass
class BinOp(Node):
    op: str = "+"
    left: Node = None
    right: Node = None


@dataclass
class Neg(Node):
    arg: Node = None


@dataclass
class Pow(Node):
    base: Node = None
    exp: int = 1


@dataclass
class Stmt:
    kind: str
    args: tuple
    line: int = field(default=0, compare=False, repr=False)
    column: int = field(default=0, compare=False, repr=False)
    text: str = field(default="", compare=False, repr=False)


@dataclass
class Script:
    statements: list


# built-in functions: name -> allowed arities (None: any)
FUNCTIONS = {
    "chern": (2,), "c1": (1,), "ctotal": (1,), "thom": (1,), "euler": (1,),
    "todd": (1, 2), "phi": (2,), "roots": None, "O": (1,), "trivial": (1,),
    "taut": (1,), "quotient": (1,), "tangent": (1,), "dual": (1,), "tensor": (2,),
    "pullback": (2,), "fdl": (1,), "push": (2,), "pull": (2,), "integrate": (2,),
    "excess": (2,),
}
SPACE_SUFFIXED = {"roots", "O", "trivial"}
SUITE_NAMES = ("fgl", "pbf", "thom", "whitney", "duality", "section", "projection",
               "functoriality", "excess", "closed", "rr-projection", "lci", "grr", "hrr", "all")


def coeff_names(theory: str):
    if theory == "multiplicative":
        return ("beta",)
    if theory.startswith("universal:"):
        try:
            k = int(theory.split(":", 1)[1])
        except ValueError:
            return ()
        return tuple(f"b{i}" for i in range(1, k + 1))
    return ()


class _Symbols:
    """Static view of the declarations, enough to resolve names."""

    def __init__(self, theory: str):
        self.theory = theory
        self.spaces: dict = {}      # name -> generator names
        self.bundles: dict = {}     # name -> base generator names
        self.embeddings: dict = {}  # name -> (source gens, target gens)
        self.gens: set = set()
        self.orientations = {"identity", "multiplicative", "universal"}

    def names(self, gens):
        return coeff_names(self.theory) + tuple(gens)

    def extend(self, gens, gen=None):
        g = gen or fresh_gen_name(self.names(gens), len(gens))
        out = tuple(gens) + (g,)
        self.gens.update(out)
        return out

    def declared(self, name):
        return name in self.spaces or name in self.bundles or name in self.embeddings


class Parser:
    def __init__(self, text: str, theory: str = "additive"):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.sym = _Symbols(theory)

    # token helpers ------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def _err(self, msg, tok=None, code="syntax"):
        tok = tok or self.tok
        return ScriptError(code, msg, tok.line, tok.column)

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def expect(self, text) -> Token:
        if not self.at(text):
            raise self._err(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def ident(self, what="identifier") -> Token:
        if self.tok.kind != "ident":
            raise self._err(f"expected {what}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def integer(self, allow_negative=True) -> int:
        sign = 1
        tok = self.tok
        if self.at("-"):
            self.next()
            sign = -1
        if self.tok.kind != "num":
            raise self._err(f"expected an integer, found {self.tok.text or 'end of input'!r}")
        v = sign * int(self.next().text)
        if v < 0 and not allow_negative:
            raise self._err(f"{v} is out of range (must be non-negative)", tok)
        return v

    # statements ---------------------------------------------------------
    def parse(self) -> Script:
        out = []
        while self.tok.kind != "eof":
            start = self.tok
            st = self.statement()
            end = self.expect(";")
            st.line, st.column = start.line, start.column
            st.text = _slice(self.text, start, end)
            out.append(st)
        return Script(out)

    def statement(self) -> Stmt:
        t = self.ident("a statement keyword")
        kw = t.text
        if kw == "theory":
            dt = self.ident("a theory name")
            d = dt.text
            if self.at(":"):
                self.next()
                d = f"{d}:{self.integer(False)}"
            if d not in ("additive", "multiplicative") and not re.fullmatch(r"universal:[1-9]\d*", d):
                raise self._err(f"unknown theory {d!r}", dt)
            self.sym.theory = d
            return Stmt("theory", (d,))
        if kw == "truncation":
            n = self.integer(False)
            if n < 1:
                raise self._err("truncation order must be positive", t)
            return Stmt("truncation", (n,))
        if kw == "orientation":
            return Stmt("orientation", (self.orientation_name(),))
        if kw == "use":
            self.expect("orientation")
            return Stmt("orientation", (self.orientation_name(),))
        if kw == "pair":
            a = self.orientation_name()
            b = self.orientation_name()
            return Stmt("pair", (a, b))
        if kw == "space":
            return self.space_decl()
        if kw == "bundle":
            name = self.new_name()
            self.expect("=")
            e = self.expr()
            base = self.bundle_base(e)
            self.sym.bundles[name] = base
            return Stmt("bundle", (name, e))
        if kw == "embedding":
            return self.embedding_decl()
        if kw == "eval":
            return Stmt("eval", (self.expr(),))
        if kw in ("push", "pull", "integrate"):
            f = self.ref(self.ident("a space or embedding name"),
                         ("embedding", "space") if kw != "integrate" else ("space",))
            return Stmt(kw, (f, self.expr()))
        if kw == "check":
            return self.check_stmt()
        raise self._err(f"unknown statement {kw!r}", t)

    def orientation_name(self) -> str:
        t = self.ident("an orientation name")
        if t.text not in self.sym.orientations:
            raise self._err(f"unknown orientation {t.text!r}", t, "unknown-identifier")
        return t.text

    def new_name(self) -> str:
        t = self.ident("a name")
        if self.sym.declared(t.text):
            raise self._err(f"{t.text!r} is already declared", t)
        if t.text in FUNCTIONS:
            raise self._err(f"{t.text!r} is a built-in function", t)
        return t.text

    def ref(self, t: Token, kinds) -> str:
        for k in kinds:
            if t.text in getattr(self.sym, k + "s"):
                return t.text
        raise self._err(f"unknown {' or '.join(kinds)} {t.text!r}", t, "unknown-identifier")

    def space_decl(self) -> Stmt:
        name = self.new_name()
        self.expect("=")
        t = self.ident("a space constructor")
        kind = t.text
        gen = None
        if kind == "proj":
            n = self.integer(False)
            base = None
            if self.at("over"):
                self.next()
                base = self.ref(self.ident(), ("space",))
            if self.at("gen"):
                self.next()
                gen = self.ident("a generator name").text
            base_gens = self.sym.spaces[base] if base else ()
            self.sym.spaces[name] = self.extend_checked(base_gens, gen, t)
            return Stmt("space", (name, "proj", n, base, gen))
        if kind in ("pbundle", "completion"):
            e = self.expr()
            base_gens = self.bundle_base(e)
            if self.at("gen"):
                self.next()
                gen = self.ident("a generator name").text
            self.sym.spaces[name] = self.extend_checked(base_gens, gen, t)
            return Stmt("space", (name, kind, e, None, gen))
        if kind == "square":
            p = self.ref(self.ident(), ("space",))
            gens = self.sym.spaces[p]
            if not gens:
                raise self._err("the fibre square needs a projective bundle", t)
            self.sym.spaces[name] = self.extend_checked(gens, gens[-1] + "_2", t)
            return Stmt("space", (name, "square", p, None, None))
        raise self._err(f"unknown space constructor {kind!r}", t)

    def extend_checked(self, gens, gen, tok):
        if gen is not None and (gen in gens or gen in coeff_names(self.sym.theory)):
            raise self._err(f"generator {gen!r} is already in use", tok)
        return self.sym.extend(gens, gen)

    def embedding_decl(self) -> Stmt:
        name = self.new_name()
        self.expect("=")
        t = self.ident("an embedding constructor")
        kind = t.text
        if kind == "zero_section":
            e = self.expr()
            base = self.bundle_base(e)
            self.sym.embeddings[name] = (base, self.sym.extend(base))
            return Stmt("embedding", (name, kind, (e,)))
        if kind == "linear":
            m = self.integer(False)
            n = self.integer(False)
            if m > n:
                raise self._err(f"no linear embedding of P^{m} into P^{n}", t)
            base = None
            if self.at("over"):
                self.next()
                base = self.ref(self.ident(), ("space",))
            bg = self.sym.spaces[base] if base else ()
            g = self.sym.extend(bg)
            self.sym.embeddings[name] = (g, g)
            return Stmt("embedding", (name, kind, (m, n, base)))
        if kind in ("diagonal", "identity"):
            p = self.ref(self.ident(), ("space",))
            gens = self.sym.spaces[p]
            if kind == "diagonal":
                if not gens:
                    raise self._err("the diagonal needs a projective bundle", t)
                self.sym.embeddings[name] = (gens, self.sym.extend(gens, gens[-1] + "_2"))
            else:
                self.sym.embeddings[name] = (gens, gens)
            return Stmt("embedding", (name, kind, (p,)))
        if kind == "compose":
            a = self.ref(self.ident(), ("embedding",))
            b = self.ref(self.ident(), ("embedding",))
            self.sym.embeddings[name] = (self.sym.embeddings[b][0], self.sym.embeddings[a][1])
            return Stmt("embedding", (name, kind, (a, b)))
        raise self._err(f"unknown embedding constructor {kind!r}", t)

    def check_stmt(self) -> Stmt:
        t = self.ident("a check name")
        kind = t.text
        if kind == "eq":
            self.expect("(")
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect(")")
            return Stmt("check", ("eq", a, b))
        if kind == "suite":
            s = self.tok
            name = self.ident("a suite name").text
            while self.at("-"):
                self.next()
                name += "-" + self.ident("a suite name").text
            if name not in SUITE_NAMES:
                raise self._err(f"unknown suite {name!r}", s, "unknown-identifier")
            dim = 3
            if self.at("dim"):
                self.next()
                dim = self.integer(False)
            return Stmt("check", ("suite", name, dim))
        if kind == "rr":
            which = self.ident("closed, projection or lci")
            if which.text not in ("closed", "projection", "lci"):
                raise self._err(f"unknown Riemann-Roch check {which.text!r}", which)
            kinds = ("space",) if which.text == "projection" else ("embedding",)
            f = self.ref(self.ident(), kinds)
            return Stmt("check", ("rr", which.text, f, self.expr()))
        if kind == "thom":
            return Stmt("check", ("thom", self.expr()))
        if kind == "selfint":
            return Stmt("check", ("selfint", self.ref(self.ident(), ("embedding",))))
        if kind == "excess":
            a = self.ref(self.ident(), ("embedding",))
            b = self.ref(self.ident(), ("embedding",))
            return Stmt("check", ("excess", a, b))
        raise self._err(f"unknown check {kind!r}", t)

    # static base of a bundle expression ------------------------------------
    def bundle_base(self, e: Node):
        base = self._base(e)
        if base is None:
            raise ScriptError("syntax", "expression does not denote a bundle", e.line, e.column)
        return base

    def _base(self, e):
        if isinstance(e, Name) and e.name in self.sym.bundles:
            return self.sym.bundles[e.name]
        if isinstance(e, Call):
            if e.func in SPACE_SUFFIXED and e.at:
                return self.sym.spaces[e.at]
            if e.func in ("taut", "quotient", "tangent") and isinstance(e.args[0], Name):
                return self.sym.spaces.get(e.args[0].name)
            if e.func == "pullback" and isinstance(e.args[1], Name):
                return self.sym.spaces.get(e.args[1].name)
            if e.func in ("dual", "tensor"):
                return self._base(e.args[0])
        if isinstance(e, BinOp) and e.op == "+":
            return self._base(e.left)
        return None

    # expressions -----------------------------------------------------------
    def expr(self) -> Node:
        node = self.term()
        while self.at("+") or self.at("-"):
            t = self.next()
            node = BinOp(t.line, t.column, t.text, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.at("*") or self.at("/"):
            t = self.next()
            node = BinOp(t.line, t.column, t.text, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.at("-"):
            t = self.next()
            return Neg(t.line, t.column, self.unary())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        if self.at("^"):
            t = self.next()
            node = Pow(t.line, t.column, node, self.integer())
        return node

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.next()
            return Num(t.line, t.column, int(t.text))
        if self.at("("):
            self.next()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind != "ident":
            raise self._err(f"unexpected {t.text or 'end of input'!r} in expression")
        self.next()
        if self.at("("):
            return self.call(t)
        at = self.suffix()
        self.resolve(t, at)
        return Name(t.line, t.column, t.text, at)

    def suffix(self):
        if self.at("@"):
            self.next()
            return self.ref(self.ident("a space name"), ("space",))
        return None

    def call(self, t: Token) -> Node:
        f = t.text
        if f not in FUNCTIONS:
            raise self._err(f"unknown function {f!r}", t, "unknown-identifier")
        self.expect("(")
        args = []
        if f == "phi":
            args = [Name(self.tok.line, self.tok.column, self.orientation_name())]
            self.expect(",")
            args.append(Name(self.tok.line, self.tok.column, self.orientation_name()))
        elif not self.at(")"):
            args.append(self.expr())
            while self.at(","):
                self.next()
                args.append(self.expr())
        self.expect(")")
        arities = FUNCTIONS[f]
        if arities is not None and len(args) not in arities:
            want = " or ".join(str(a) for a in arities)
            raise self._err(f"{f} takes {want} argument(s), got {len(args)}", t, "arity")
        at = self.suffix()
        if f in SPACE_SUFFIXED and at is None:
            raise self._err(f"{f}(...) needs an @space suffix", t)
        if f not in SPACE_SUFFIXED and at is not None:
            raise self._err(f"{f}(...) does not take an @space suffix", t)
        return Call(t.line, t.column, f, tuple(args), at)

    def resolve(self, t: Token, at):
        n = t.text
        if at is not None:
            if n not in self.sym.spaces[at] and n not in coeff_names(self.sym.theory):
                raise self._err(f"{n!r} is not a generator of {at}", t, "unknown-identifier")
            return
        if self.sym.declared(n) or n in coeff_names(self.sym.theory) or n in self.sym.gens:
            return
        if n == "phi":
            return
        raise self._err(f"unknown identifier {n!r}", t, "unknown-identifier")


def _slice(text, start: Token, end: Token) -> str:
    lines = text.split("\n")
    if start.line == end.line:
        s = lines[start.line - 1][start.column - 1:end.column]
    else:
        parts = [lines[start.line - 1][start.column - 1:]]
        parts += lines[start.line:end.line - 1]
        parts.append(lines[end.line - 1][:end.column])
        s = " ".join(p.strip() for p in parts)
    return " ".join(s.split())


def parse(text: str, theory: str = "additive") -> Script:
    return Parser(text, theory).parse()


# printing -----------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def format_expr(e: Node, prec: int = 0) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Name):
        return e.name + (f"@{e.at}" if e.at else "")
    if isinstance(e, Call):
        s = f"{e.func}({', '.join(format_expr(a) for a in e.args)})"
        return s + (f"@{e.at}" if e.at else "")
    if isinstance(e, Neg):
        s = "-" + format_expr(e.arg, 3)
        return f"({s})" if prec > 1 else s
    if isinstance(e, Pow):
        return f"{format_expr(e.base, 4)}^{e.exp}"
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        s = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p + 1)}"
        return f"({s})" if p < prec else s
    raise TypeError(type(e).__name__)


def format_stmt(st: Stmt) -> str:
    k, a = st.kind, st.args
    if k in ("theory", "truncation", "orientation"):
        return f"{k} {a[0]};"
    if k == "pair":
        return f"pair {a[0]} {a[1]};"
    if k == "space":
        name, kind, x, base, gen = a
        if kind == "proj":
            s = f"space {name} = proj {x}" + (f" over {base}" if base else "")
        elif kind == "square":
            s = f"space {name} = square {x}"
        else:
            s = f"space {name} = {kind} {format_expr(x)}"
        return s + (f" gen {gen}" if gen else "") + ";"
    if k == "bundle":
        return f"bundle {a[0]} = {format_expr(a[1])};"
    if k == "embedding":
        name, kind, xs = a
        if kind == "zero_section":
            return f"embedding {name} = zero_section {format_expr(xs[0])};"
        if kind == "linear":
            m, n, base = xs
            return f"embedding {name} = linear {m} {n}" + (f" over {base}" if base else "") + ";"
        return f"embedding {name} = {kind} {' '.join(xs)};"
    if k == "eval":
        return f"eval {format_expr(a[0])};"
    if k in ("push", "pull", "integrate"):
        return f"{k} {a[0]} {format_expr(a[1])};"
    if k == "check":
        c = a[0]
        if c == "eq":
            return f"check eq({format_expr(a[1])}, {format_expr(a[2])});"
        if c == "suite":
            return f"check suite {a[1]} dim {a[2]};"
        if c == "rr":
            return f"check rr {a[1]} {a[2]} {format_expr(a[3])};"
        if c == "thom":
            return f"check thom {format_expr(a[1])};"
        if c == "selfint":
            return f"check selfint {a[1]};"
        if c == "excess":
            return f"check excess {a[1]} {a[2]};"
    raise TypeError(k)


def format_script(script: Script) -> str:
    return "\n".join(format_stmt(s) for s in script.statements) + "\n"
