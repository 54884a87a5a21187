"""Golden corpus: recorded expected outputs and a runner that regenerates and compares them.

Each corpus file is a JSON object with ``name``, ``kind``, ``params`` and
``expected``.  The runner recomputes the artifact, renders both sides to
canonical JSON and compares the bytes.  Laurent data that only agrees after
t -> t^-1 is reported as ORIENTED rather than FAIL.
"""

from __future__ import annotations

import difflib
import json
from dataclasses import dataclass
from pathlib import Path

CORPUS_DIR = Path(__file__).with_name("golden")

PASS, ORIENTED, FAIL, SKIP = "PASS", "ORIENTED", "FAIL", "SKIP"


def canonical(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


@dataclass
class GoldenResult:
    name: str
    status: str
    diff: str = ""
    note: str = ""

    def line(self) -> str:
        s = f"{self.status:8s} {self.name}"
        return s + (f"  ({self.note})" if self.note else "")


# -- regenerators --------------------------------------------------------------------------


def _group(spec: str):
    from .builders import builtin

    return builtin(spec)


def _delta(params, expected):
    from .resolution import delta
    from .semidirect import GroupRingMatrix

    G = _group(params["group"])
    got = delta(G, tuple(params["tuple"]))
    exp = GroupRingMatrix.from_entries(G, expected)
    return [[str(x) for x in row] for row in got.entries()], [[str(x) for x in row] for row in exp.entries()], None


def _homology(params, expected):
    from .homology import homology
    from .resolution import trivial_complex

    G = _group(params["group"])
    h = homology(trivial_complex(G))
    return h.to_json(), expected, None


def _milnor_betti(params, expected):
    from .milnor import milnor_integral_homology

    h = milnor_integral_homology(params["l"])
    return {"betti": list(h.betti), "torsion_free": h.torsion_free}, expected, None


def _milnor_charpolys(params, expected):
    from .milnor import monodromy_char_polys

    return [str(p) for p in monodromy_char_polys(params["l"])], expected, None


def _flip_laurent(ring, x):
    return type(x)(ring, {tuple(-e for e in k): c for k, c in x.terms.items()})


def _rep_handle(params):
    from .magnus import homological_rep, make_rep

    h = make_rep(params["kind"], params["l"], params["q"], params["m"], params["k"], params.get("names"))
    return h, homological_rep


def _rep_charpoly(params, expected):
    """Characteristic polynomials of reduced generator matrices, compared as strings."""
    from .magnus import homology_char_poly
    from .rings import char_poly

    h, reduce = _rep_handle(params)
    if params.get("reduce") == "homology":
        r = reduce(h)
        polys = {f"s{k}": char_poly(m) for k, m in r.matrices.items()}
    else:
        polys = {f"s{k}": homology_char_poly(h, k) for k in h.matrices}
    ring = next(iter(polys.values())).ring
    got = {k: str(p) for k, p in polys.items()}
    alt = {k: str(p.map(lambda x: _flip_laurent(ring, x))) for k, p in polys.items()}
    exp = {}
    for k, e in expected.items():
        if isinstance(e, dict):  # reference matrix: compare characteristic polynomials
            exp[k] = str(char_poly(_matrix(ring, e["matrix"], params.get("entry_names"))))
        else:
            exp[k] = str(_poly(ring, e))
    return got, exp, alt


def _rep_matrices(params, expected):
    from .magnus import gassner_submodule, restrict

    h, _ = _rep_handle(params)
    if params.get("reduce") != "submodule:builtin":
        raise ValueError("matrix goldens need the shipped submodule")
    r = restrict(h, gassner_submodule(h.ring))
    ring = r.ring
    got = {f"A{a},{b}": [[ring.fmt(x) for x in row] for row in m.rows] for (a, b), m in r.matrices.items()}
    alt = {
        f"A{a},{b}": [[ring.fmt(_flip_laurent(ring, x)) for x in row] for row in m.rows]
        for (a, b), m in r.matrices.items()
    }
    exp = {k: [[ring.fmt(x) for x in row] for row in _matrix(ring, v, params.get("entry_names")).rows] for k, v in expected.items()}
    return got, exp, alt


def _kernel(params, expected):
    from .magnus import detect, make_rep

    h = make_rep(params["kind"], params["l"], params["q"], params["m"], params["k"])
    res = detect(h, params["word"])
    return {"identity": res.identity}, expected, None


def _matrix(ring, rows, names=None):
    """Parse reference entries, written in ``names``, into ``ring`` (variables matched by position)."""
    from .rings import RingMatrix

    src = type(ring)(ring.nvars, ring.rational, names) if names else ring
    def conv(text):
        y = src.parse(str(text))
        return type(y)(ring, dict(y.terms))

    return RingMatrix(ring, [[conv(x) for x in row] for row in rows])


def _poly(ring, coeffs):
    from .rings import Poly

    return Poly(ring, [ring.parse(str(c)) for c in coeffs])


KINDS = {
    "delta": _delta,
    "homology": _homology,
    "milnor_betti": _milnor_betti,
    "milnor_charpolys": _milnor_charpolys,
    "rep_charpoly": _rep_charpoly,
    "rep_matrices": _rep_matrices,
    "kernel": _kernel,
}


def run_case(data: dict) -> GoldenResult:
    name = data.get("name", "?")
    kind = data.get("kind")
    if kind not in KINDS:
        return GoldenResult(name, FAIL, note=f"unknown kind {kind!r}")
    try:
        got, exp, alt = KINDS[kind](data.get("params", {}), data["expected"])
    except Exception as exc:  # a crash is a failed golden, reported with its message
        return GoldenResult(name, FAIL, note=f"{type(exc).__name__}: {exc}")
    a, b = canonical(got), canonical(exp)
    if a == b:
        return GoldenResult(name, PASS)
    if alt is not None and canonical(alt) == b:
        return GoldenResult(name, ORIENTED, note="matches after t -> t^-1")
    diff = "".join(difflib.unified_diff(b.splitlines(True), a.splitlines(True), "expected", "computed"))
    return GoldenResult(name, FAIL, diff=diff)


def load_corpus(directory=None) -> list:
    d = Path(directory) if directory else CORPUS_DIR
    if not d.is_dir():
        raise FileNotFoundError(f"no corpus directory {d}")
    out = []
    for path in sorted(d.glob("*.json")):
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        data.setdefault("name", path.stem)
        out.append(data)
    return out


def run_corpus(directory=None, include_slow: bool = False, names=None) -> list:
    results = []
    for data in load_corpus(directory):
        if names and data["name"] not in names:
            continue
        if data.get("slow") and not include_slow:
            results.append(GoldenResult(data["name"], SKIP, note="slow; use --all"))
            continue
        results.append(run_case(data))
    return results


def summary(results: list) -> str:
    counts = {s: sum(r.status == s for r in results) for s in (PASS, ORIENTED, FAIL, SKIP)}
    return ", ".join(f"{v} {k.lower()}" for k, v in counts.items() if v) or "empty corpus"
