"""Execution of parsed scripts and rendering of results."""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .. import __version__
from ..algebra.ring import NUMBER, Element
from ..algebra.series import TruncatedSeries
from ..classes import (
    c1,
    chern,
    chern_total,
    context,
    euler,
    excess_class,
    thom,
    thom_quotient_check,
    todd,
)
from ..errors import EngineError, InternalInconsistencyError, PresentationError
from ..fgl import DEFAULT_ORDER, theory as make_theory
from ..gysin import (
    embed_diagonal,
    kunneth_square,
    pushforward_embedding,
    pushforward_projection,
    pushforward_to_point,
    self_intersection_check,
)
from ..rr import make_pair, verify_grr_lci, verify_rr_closed, verify_rr_projection
from ..space import (
    Bundle,
    Embedding,
    Space,
    VirtualBundle,
    bundle_dual,
    bundle_pullback,
    bundle_sum,
    bundle_tensor_line,
    completion,
    compose_embeddings,
    embed_linear,
    embed_zero_section,
    identity_embedding,
    proj_bundle,
    projective_space,
    relative_tangent,
    roots_bundle,
    tautological_sub,
    trivial,
    twisting_line,
    universal_quotient,
)
from ..suites import run_suite
from .parser import BinOp, Call, Name, Neg, Node, Num, Pow, Script

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


def worker_count() -> int:
    raw = os.environ.get("ORIENT_RR_THREADS", "").strip()
    if not raw:
        return 1
    n = int(raw)  # ValueError is reported as a usage error by main
    if n < 1:
        raise ValueError("ORIENT_RR_THREADS must be a positive integer")
    return n


def run_suites(names, th, max_dim):
    """Run suites, in parallel when a worker count is configured; results keep
    the order of ``names``."""
    n = worker_count()
    if n == 1 or len(names) == 1:
        return [run_suite(s, th, max_dim) for s in names]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda s: run_suite(s, th, max_dim), names))


# rendering --------------------------------------------------------------------------

def fmt_number(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def render(v):
    if isinstance(v, Element):
        return str(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, NUMBER):
        return fmt_number(v)
    if isinstance(v, Bundle):
        return f"{v.label} (rank {v.rank})"
    if isinstance(v, TruncatedSeries):
        return str(v)
    if isinstance(v, dict):
        return {k: render(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [render(x) for x in v]
    return str(v)


def render_value(v) -> dict:
    out = {"value": render(v)}
    if isinstance(v, Element):
        out["terms"] = v.term_list()
    elif isinstance(v, Bundle):
        out["rank"] = v.rank
        out["chern"] = [str(c) for c in v.chern_classes()]
    elif isinstance(v, VirtualBundle):
        out["rank"] = v.rank
    return out


def render_report(r: dict) -> dict:
    return {k: render(v) for k, v in r.items()}


# evaluation -------------------------------------------------------------------------

class ScriptRuntimeError(EngineError):
    code = "type"


class UndefinedError(EngineError):
    """A name whose declaration failed earlier in the run."""

    code = "undefined"


class Runner:
    def __init__(self, theory: str = "additive", truncation: int = DEFAULT_ORDER):
        self.theory_name = theory
        self.truncation = truncation
        self._th = None
        self.orientation = None
        self.pair_labels = None
        self.spaces: dict = {}
        self.bundles: dict = {}
        self.embeddings: dict = {}
        self.recent: list = []   # spaces in declaration order, for bare generators
        self.results: list = []
        self.internal = False
        self._where: list = []   # spaces expressions are being evaluated into

    # state ------------------------------------------------------------
    @property
    def th(self):
        if self._th is None:
            self._th = make_theory(self.theory_name, self.truncation)
        return self._th

    @property
    def ctx(self):
        return context(self.th, self.orientation)

    def pair(self, labels=None):
        labels = labels or self.pair_labels
        if labels is None:
            ls = self.th.orientation_labels
            labels = (ls[0], ls[-1])
        return make_pair(self.th, *labels)

    def _remember(self, *spaces):
        for s in spaces:
            self.recent.append(s)

    # statements -------------------------------------------------------
    def run(self, script: Script):
        for st in script.statements:
            try:
                entry = self.execute(st)
            except InternalInconsistencyError as exc:
                self.internal = True
                entry = {"status": "error", "code": exc.code, "message": str(exc)}
            except EngineError as exc:
                entry = {"status": "error", "code": exc.code, "message": str(exc)}
            except KeyError as exc:
                entry = {"status": "error", "code": "undefined",
                         "message": f"{exc.args[0]!r} was not created (its declaration failed)"}
            except ZeroDivisionError:
                entry = {"status": "error", "code": "not-invertible", "message": "division by zero"}
            if entry is not None:
                entry["command"] = st.text
                self.results.append(entry)
        return self.results

    def execute(self, st):
        k, a = st.kind, st.args
        if k == "theory":
            self.theory_name, self._th = a[0], None
            self.orientation = None
            self.pair_labels = None
            return None
        if k == "truncation":
            self.truncation, self._th = a[0], None
            return None
        if k == "orientation":
            self.th.orientation(a[0])
            self.orientation = a[0]
            return None
        if k == "pair":
            self.pair(a)
            self.pair_labels = a
            return None
        if k == "space":
            self.spaces[a[0]] = self.make_space(*a[1:])
            self._remember(self.spaces[a[0]])
            return None
        if k == "bundle":
            b = self.eval(a[1])
            if not isinstance(b, Bundle):
                raise ScriptRuntimeError(f"{a[0]} is not a bundle")
            self.bundles[a[0]] = b
            return None
        if k == "embedding":
            e = self.make_embedding(a[1], a[2])
            self.embeddings[a[0]] = e
            self._remember(e.source, e.target)
            return None
        if k == "eval":
            return {"status": "ok", **render_value(self.eval(a[0]))}
        if k in ("push", "pull", "integrate"):
            return {"status": "ok", **render_value(self.apply(k, a[0], a[1]))}
        if k == "check":
            return self.check(a)
        raise PresentationError(f"unknown statement {k}")

    def make_space(self, kind, x, base, gen) -> Space:
        if kind == "proj":
            b = self.spaces[base] if base else None
            return projective_space(x, self.th, base=b, name=gen)
        if kind == "pbundle":
            E = self.bundle(x)
            return proj_bundle(E.base, E, name=gen)
        if kind == "completion":
            E = self.bundle(x)
            return completion(E.base, E, name=gen)
        if kind == "square":
            return kunneth_square(self.spaces[x]).K
        raise PresentationError(kind)

    def make_embedding(self, kind, xs) -> Embedding:
        if kind == "zero_section":
            E = self.bundle(xs[0])
            return embed_zero_section(E.base, E)[1]
        if kind == "linear":
            m, n, base = xs
            return embed_linear(m, n, self.th, self.spaces[base] if base else None)
        if kind == "diagonal":
            return embed_diagonal(self.spaces[xs[0]])
        if kind == "identity":
            return identity_embedding(self.spaces[xs[0]])
        if kind == "compose":
            return compose_embeddings(self.embeddings[xs[0]], self.embeddings[xs[1]])
        raise PresentationError(kind)

    def apply(self, k, f, x):
        if k == "integrate":
            return pushforward_to_point(self.spaces[f], self.element(x, self.spaces[f]), self.ctx)
        if f in self.embeddings:
            e = self.embeddings[f]
            if k == "push":
                return pushforward_embedding(e, self.element(x, e.source), self.ctx)
            return e.restrict(self.element(x, e.target))
        P = self.spaces[f]
        if P.is_point:
            raise ScriptRuntimeError(f"{f} is a point")
        if k == "push":
            return pushforward_projection(P, self.element(x, P), self.ctx)
        return P.pull(self.element(x, P.base))

    def check(self, a):
        c = a[0]
        if c == "eq":
            lhs, rhs = self.eval(a[1]), self.eval(a[2])
            ok = lhs == rhs
            return {"status": "pass" if ok else "fail", "lhs": render(lhs), "rhs": render(rhs)}
        if c == "suite":
            groups = run_suites([a[1]], self.th, a[2])
            return self.suite_entry(groups[0])
        if c == "rr":
            which, f, x = a[1], a[2], a[3]
            pair = self.pair()
            if which == "closed":
                e = self.embeddings[f]
                r = verify_rr_closed(pair, e, self.element(x, e.source))
            elif which == "projection":
                P = self.spaces[f]
                r = verify_rr_projection(pair, P, self.element(x, P))
            else:
                e = self.embeddings[f]
                r = verify_grr_lci(pair, e, e.target, self.element(x, e.source))
            return self.report_entry(r)
        if c == "thom":
            return self.report_entry(thom_quotient_check(self.bundle(a[1]), self.ctx))
        if c == "selfint":
            return self.report_entry(self_intersection_check(self.embeddings[a[1]], self.ctx))
        if c == "excess":
            val = excess_class(self.embeddings[a[1]], self.embeddings[a[2]], self.ctx)
            return {"status": "ok", **render_value(val)}
        raise PresentationError(c)

    @staticmethod
    def report_entry(r):
        out = render_report(r)
        out.pop("input", None)
        return out

    @staticmethod
    def suite_entry(reports):
        failures = [render_report(r) for r in reports if r["status"] != "pass"]
        return {"status": "pass" if not failures else "fail", "total": len(reports),
                "passed": len(reports) - len(failures), "failed": len(failures),
                "failures": failures,
                "verdicts": [{"check": r["check"], "space": r["space"],
                              "orientation": r["orientation"], "status": r["status"]}
                             for r in reports]}

    # expressions ------------------------------------------------------
    def element(self, v, space: Space) -> Element:
        """``v`` as a class on ``space``; a syntax node is evaluated there,
        so bare generator names resolve in that space first."""
        if isinstance(v, Node):
            self._where.append(space)
            try:
                v = self.eval(v)
            finally:
                self._where.pop()
        if isinstance(v, Fraction):
            return space.ring.one * v
        if isinstance(v, (int,)) or isinstance(v, NUMBER):
            return space.ring.const(v)
        if isinstance(v, Element):
            if v.ring != space.ring and space.ring.is_prefix_of(v.ring):
                # a bare generator may resolve in a larger ring of the same tower
                return v.restrict_to(space.ring)
            return space.ring.coerce(v)
        raise ScriptRuntimeError(f"expected a class, got {type(v).__name__}")

    def bundle(self, node) -> Bundle:
        v = self.eval(node)
        if not isinstance(v, Bundle):
            raise ScriptRuntimeError("expected a bundle")
        return v

    def space_arg(self, node) -> Space:
        if isinstance(node, Name) and node.name in self.spaces:
            return self.spaces[node.name]
        raise ScriptRuntimeError("expected a space name")

    def embedding_arg(self, node) -> Embedding:
        if isinstance(node, Name) and node.name in self.embeddings:
            return self.embeddings[node.name]
        raise ScriptRuntimeError("expected an embedding name")

    def integer_arg(self, node) -> int:
        v = self.eval(node)
        if isinstance(v, Fraction) and v.denominator == 1:
            v = int(v)
        if not isinstance(v, int):
            raise ScriptRuntimeError("expected an integer")
        return v

    def symbol(self, name, at):
        if at is not None:
            return self.spaces[at].ring.gen(name)
        if name in self.bundles:
            return self.bundles[name]
        if name in self.spaces:
            return self.spaces[name]
        if name in self.embeddings:
            return self.embeddings[name]
        if name == "phi":
            return self.pair().Phi
        if self._where and name in self._where[-1].ring.names:
            return self._where[-1].ring.gen(name)
        if name in self.th.coeff.names:
            return self.th.coeff.gen(name)
        for sp in reversed(self.recent):
            if name in sp.ring.names:
                return sp.ring.gen(name)
        raise UndefinedError(f"{name!r} was not created (its declaration failed)")

    def eval(self, node):
        if isinstance(node, Num):
            return Fraction(node.value)
        if isinstance(node, Name):
            return self.symbol(node.name, node.at)
        if isinstance(node, Neg):
            v = self.eval(node.arg)
            if isinstance(v, Bundle):
                return VirtualBundle.negative(v)
            return -v
        if isinstance(node, Pow):
            v = self.eval(node.base)
            if isinstance(v, Fraction):
                return v ** node.exp
            if not isinstance(v, Element):
                raise ScriptRuntimeError("only classes can be raised to powers")
            return v ** node.exp
        if isinstance(node, BinOp):
            return self.binop(node.op, self.eval(node.left), self.eval(node.right))
        if isinstance(node, Call):
            return self.call(node)
        raise ScriptRuntimeError(type(node).__name__)

    def binop(self, op, x, y):
        bundles = (Bundle, VirtualBundle)
        if isinstance(x, bundles) or isinstance(y, bundles):
            if not (isinstance(x, bundles) and isinstance(y, bundles)) or op not in "+-":
                raise ScriptRuntimeError(f"cannot apply {op!r} to a bundle and a class")
            if op == "+" and isinstance(x, Bundle) and isinstance(y, Bundle):
                return bundle_sum(x, y)
            vx = VirtualBundle.of(x) if isinstance(x, Bundle) else x
            vy = VirtualBundle.of(y) if isinstance(y, Bundle) else y
            return vx + vy if op == "+" else vx - vy
        for v in (x, y):
            if not isinstance(v, (Element, Fraction)):
                raise ScriptRuntimeError(f"cannot apply {op!r} to {type(v).__name__}")
        if op == "+":
            return x + y
        if op == "-":
            return x - y
        if op == "*":
            return x * y
        if isinstance(x, Fraction) and isinstance(y, Element):
            return x * y.inverse()
        return x / y

    def call(self, node: Call):
        f, args = node.func, node.args
        ctx = self.ctx
        if f in ("roots", "O", "trivial"):
            S = self.spaces[node.at]
            if f == "roots":
                return roots_bundle(S, [self.element(x, S) for x in args],
                                    "roots")
            if f == "O":
                return twisting_line(S, self.integer_arg(args[0]))
            return trivial(S, self.integer_arg(args[0]))
        if f == "chern":
            return chern(self.integer_arg(args[0]), self.bundle(args[1]), ctx)
        if f == "c1":
            return c1(self.bundle(args[0]), ctx)
        if f == "ctotal":
            return chern_total(self.bundle(args[0]), ctx)
        if f == "thom":
            return thom(self.bundle(args[0]), ctx)
        if f == "euler":
            return euler(self.bundle(args[0]), ctx)
        if f == "phi":
            return self.pair((args[0].name, args[1].name)).Phi
        if f == "todd":
            if len(args) == 1:
                phi, v, ctx2 = self.pair().Phi, self.eval(args[0]), self.pair().ctx2
            else:
                if isinstance(args[0], Call) and args[0].func == "phi":
                    p = self.pair((args[0].args[0].name, args[0].args[1].name))
                elif isinstance(args[0], Name) and args[0].name == "phi":
                    p = self.pair()
                else:
                    raise ScriptRuntimeError("todd expects phi(a, b) or phi")
                phi, v, ctx2 = p.Phi, self.eval(args[1]), p.ctx2
            if not isinstance(v, (Bundle, VirtualBundle)):
                raise ScriptRuntimeError("todd needs a bundle or virtual bundle")
            return todd(phi, v, ctx2)
        if f in ("taut", "quotient", "tangent"):
            S = self.space_arg(args[0])
            return {"taut": tautological_sub, "quotient": universal_quotient,
                    "tangent": relative_tangent}[f](S)
        if f == "dual":
            return bundle_dual(self.bundle(args[0]))
        if f == "tensor":
            return bundle_tensor_line(self.bundle(args[0]), self.bundle(args[1]))
        if f == "pullback":
            return bundle_pullback(self.bundle(args[0]), self.space_arg(args[1]))
        if f == "fdl":
            return self.embedding_arg(args[0]).fdl(ctx)
        if f in ("push", "pull", "integrate"):
            target = args[0]
            if not isinstance(target, Name):
                raise ScriptRuntimeError(f"{f} expects a space or embedding name")
            if target.name not in self.spaces and target.name not in self.embeddings:
                raise ScriptRuntimeError(f"{target.name!r} is not a space or embedding")
            return self.apply(f, target.name, args[1])
        if f == "excess":
            return excess_class(self.embedding_arg(args[0]), self.embedding_arg(args[1]), ctx)
        raise ScriptRuntimeError(f"unknown function {f}")

    # output -----------------------------------------------------------
    def exit_code(self) -> int:
        if self.internal:
            return EXIT_INTERNAL
        if any(r["status"] in ("fail", "error") for r in self.results):
            return EXIT_FAIL
        return EXIT_OK

    def report(self) -> dict:
        try:
            labels = list(self.th.orientation_labels)
        except EngineError:
            labels = []
        return {"version": __version__, "theory": self.theory_name, "orientations": labels,
                "truncation": self.truncation, "results": self.results}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def text_lines(results) -> str:
    out = []
    for r in results:
        head = f"[{r['status']}] {r.get('command', r.get('check', ''))}"
        if "value" in r:
            head += f"  =>  {r['value']}"
        elif "lhs" in r:
            head += f"  lhs: {r['lhs']}  rhs: {r['rhs']}"
        elif "total" in r:
            head += f"  {r['passed']}/{r['total']} passed"
        if "code" in r:
            head += f"  ({r['code']}: {r['message']})"
        out.append(head)
        for fail in r.get("failures", []):
            out.append(f"    fail {fail['check']} {fail['space']} [{fail['orientation']}]"
                       f"  lhs: {fail['lhs']}  rhs: {fail['rhs']}")
    return "\n".join(out) + "\n"
