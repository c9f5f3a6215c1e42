"""Acceptance criteria 1-12.

Every criterion is checked exactly (tolerance zero) and prints one line
``criterion N ... PASS|FAIL`` with its runtime against the target.
"""
import contextlib
import io
import json
import pathlib
import time

import pytest

from orient_rr.cli.main import main
from orient_rr.fgl import theory
from orient_rr.rr import hrr_number, sweep_closed, sweep_grr, sweep_projection
from orient_rr.suites import (
    suite_duality,
    suite_excess,
    suite_fgl,
    suite_functoriality,
    suite_pbf,
    suite_projection_formula,
    suite_section,
    suite_thom,
    suite_whitney,
)

from oracles import binomial

THEORIES = ("additive", "multiplicative", "universal:3")
GOLDEN = pathlib.Path(__file__).parent / "golden"


@pytest.fixture
def verdict(capsys):
    def report(n, title, reports, elapsed, limit, extra=""):
        failed = [r for r in reports if r["status"] != "pass"]
        ok = bool(reports) and not failed and elapsed < limit
        line = (f"criterion {n:>2} {title}: {'PASS' if ok else 'FAIL'} "
                f"({len(reports) - len(failed)}/{len(reports)} exact, {elapsed:.2f}s < {limit}s)")
        if extra:
            line += f" {extra}"
        with capsys.disabled():
            print("\n" + line)
        assert reports, "nothing was checked"
        assert not failed, _describe(failed)
        assert elapsed < limit, f"took {elapsed:.2f}s, target {limit}s"
    return report


def _describe(failed, limit=5):
    out = [f"{len(failed)} failing instance(s); first {min(limit, len(failed))}:"]
    for r in failed[:limit]:
        out.append(f"  {r['check']} {r['space']} [{r['orientation']}] lhs={r['lhs']} rhs={r['rhs']}"
                   + (f" matrix={r['matrix']}" if "matrix" in r else ""))
    return "\n".join(out)


def _timed(fn):
    t0 = time.perf_counter()
    reports = fn()
    return reports, time.perf_counter() - t0


def _over_theories(*suites, order=10):
    def run():
        out = []
        for desc in THEORIES:
            th = theory(desc, order)
            for suite in suites:
                out.extend(suite(th, 3))
        return out
    return run


def test_criterion_01_fgl(verdict):
    reports, dt = _timed(_over_theories(suite_fgl))
    verdict(1, "formal group law residuals at order 10", reports, dt, 10)


def test_criterion_02_projective_bundle_theorem(verdict):
    reports, dt = _timed(_over_theories(suite_pbf))
    verdict(2, "projective bundle theorem bases", reports, dt, 1)


def test_criterion_03_thom_quotient(verdict):
    reports, dt = _timed(_over_theories(suite_thom))
    verdict(3, "thom(E) = c_rank(xi)", reports, dt, 10)


def test_criterion_04_whitney_todd(verdict):
    reports, dt = _timed(_over_theories(suite_whitney))
    n = sum(1 for r in reports if r["check"] == "whitney")
    verdict(4, "Whitney and Todd multiplicativity", reports, dt, 30, f"[{n} random instances]")


def test_criterion_05_duality_triangularity(verdict):
    reports, dt = _timed(_over_theories(suite_duality))
    verdict(5, "duality matrix unit triangular", reports, dt, 10)


def test_criterion_06_section_and_projection_formula(verdict):
    reports, dt = _timed(_over_theories(suite_section, suite_projection_formula))
    verdict(6, "p_* s_* = 1 and projection formula", reports, dt, 30)


def test_criterion_07_functoriality(verdict):
    reports, dt = _timed(_over_theories(suite_functoriality))
    verdict(7, "functoriality and factorization independence", reports, dt, 10)


def test_criterion_08_self_intersection(verdict):
    def run():
        return [r for r in _over_theories(suite_excess)() if r["check"] == "excess"]
    reports, dt = _timed(run)
    verdict(8, "restrict(push(1)) = euler(normal)", reports, dt, 5)


def test_criterion_09_rr_closed(verdict):
    reports, dt = _timed(_over_theories(sweep_closed))
    verdict(9, "Riemann-Roch for closed immersions", reports, dt, 60)


def test_criterion_10_rr_projection_and_lci(verdict):
    reports, dt = _timed(_over_theories(sweep_projection, sweep_grr))
    verdict(10, "Riemann-Roch for projections and lci maps", reports, dt, 120)


def test_criterion_11_hirzebruch(verdict):
    def run():
        out = []
        for n in range(4):
            for d in range(-n, 6):
                got = hrr_number(n, d)
                want = binomial(n + d, n) if n + d >= 0 else 0
                out.append({"check": "hrr", "space": f"P^{n}", "orientation": f"O({d})",
                            "status": "pass" if got == want else "fail", "lhs": got, "rhs": want})
        return out
    reports, dt = _timed(run)
    verdict(11, "chi(P^n, O(d)) against the binomial oracle", reports, dt, 10)


def test_criterion_12_cli_golden_files(verdict):
    codes = json.loads((GOLDEN / "exit_codes.json").read_text())

    def run():
        out = []
        for name, want in sorted(codes.items()):
            path = GOLDEN / name
            buf = io.StringIO()
            with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
                code = main(["run", "--json", str(path)])
            expected = path.with_suffix(".json").read_bytes()
            same = buf.getvalue().encode("utf-8") == expected and code == want
            out.append({"check": "golden", "space": name, "orientation": f"exit {code}",
                        "status": "pass" if same else "fail", "lhs": code, "rhs": want})
        return out
    reports, dt = _timed(run)
    assert len(reports) >= 10
    assert any(codes[n] == 1 for n in codes), "corpus needs a failing check"
    verdict(12, "golden-file byte equality", reports, dt, 5,
            f"[exit codes {sorted(set(codes.values()))}]")
