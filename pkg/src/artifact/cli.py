"""foxres: command-line front end.

Exit status is 0 on success, 1 when a computation fails or a check does not
hold, and 2 for usage errors.  Heavy results are cached under
$FOXRES_CACHE_DIR when it is set.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

log = logging.getLogger("foxres")


class UsageError(Exception):
    pass


# -- helpers -------------------------------------------------------------------------------


def load_group(spec: str):
    from .builders import builtin, load_group_file

    if spec.startswith("builtin:"):
        return builtin(spec[len("builtin:"):])
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"no group file {spec!r} (use builtin:<name>(<args>) for built-in groups)")
    return load_group_file(path)


def _parse_value(ring, text):
    if hasattr(ring, "parse"):
        return ring.parse(str(text))
    if ring.name == "Integers":
        return int(text)
    if ring.name == "Rationals":
        return Fraction(str(text))
    if hasattr(ring, "power"):
        # Cyclotomic(d) / CyclicAlgebra(N): "g^k" or an integer power k of the generator
        s = str(text).replace(" ", "")
        k = int(s.split("^", 1)[1]) if "^" in s else (1 if s == "g" else int(s))
        return ring.power(k)
    raise UsageError(f"cannot read values in {ring.name}")


_GEN_KEY = re.compile(r"x(\d+)_(\d+)$")


def load_character(path, structure):
    """JSON {"ring": ..., "names": [...], "images": {"x<i>_<q>": value}}; unlisted generators map to 1."""
    from .rings import character, ring_from_name

    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    ring = ring_from_name(data.get("ring", "Rationals"), data.get("names"))
    values = {}
    for key, v in data.get("images", {}).items():
        m = _GEN_KEY.match(key)
        if not m:
            raise UsageError(f"bad generator key {key!r} in {path}")
        g = (int(m.group(1)), int(m.group(2)))
        if g not in set(structure.generators()):
            raise UsageError(f"{key} is not a generator of the group")
        values[g] = _parse_value(ring, v)
    return character(structure, ring, values)


def laurent_character(spec: str, structure):
    """``all`` (every generator -> t) or ``x1_2=t,x2_2=t^-1,...`` over Q[t^±]."""
    from .rings import LaurentRat, character

    R = LaurentRat(1)
    gens = list(structure.generators())
    if spec in ("all", "t", ""):
        return character(structure, R, {g: R.var() for g in gens})
    values = {}
    for part in spec.split(","):
        key, _, val = part.partition("=")
        m = _GEN_KEY.match(key.strip())
        if not m or not val:
            raise UsageError(f"bad laurent assignment {part!r}")
        g = (int(m.group(1)), int(m.group(2)))
        if g not in gens:
            raise UsageError(f"{key} is not a generator of the group")
        values[g] = R.parse(val)
    return character(structure, R, values)


def cache_dir():
    d = os.environ.get("FOXRES_CACHE_DIR")
    if not d:
        return None
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


def cache_key(**parts) -> str:
    return hashlib.sha256(json.dumps(parts, sort_keys=True).encode()).hexdigest()


def cached(kind: str, key: str, compute):
    """JSON-serializable result of ``compute``, memoized on disk when a cache dir is configured."""
    d = cache_dir()
    if d is None:
        return compute()
    path = d / f"{kind}-{key[:32]}.json"
    if path.is_file():
        log.info("cache hit %s", path.name)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    value = compute()
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(value, fh, sort_keys=True)
    os.replace(tmp, path)
    return value


def emit(args, payload, text: str):
    out = json.dumps(payload, indent=1, sort_keys=True, ensure_ascii=False) + "\n" if args.format == "json" else text + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


# -- subcommands ---------------------------------------------------------------------------


def cmd_resolution(args) -> int:
    from .resolution import boundary, ranks, summands, verify_complex

    G = load_group(args.group)
    top = G.ell
    degrees = [args.degree] if args.degree is not None else list(range(1, top + 1))
    for k in degrees:
        if not 1 <= k <= top:
            raise UsageError(f"--degree must lie in 1..{top}")
    mats = []
    for k in degrees:
        D = boundary(G, k)
        mats.append({
            "degree": k,
            "ring": "ZG",
            "rows": D.nrows,
            "cols": D.ncols,
            "row_summands": [list(s) for s in summands(G, k)],
            "entries": [[str(x) for x in row] for row in D.entries()],
        })
    payload = {"group": G.description(), "ranks": ranks(G), "boundaries": mats}
    ok = True
    if args.verify:
        ok = verify_complex(G)
        payload["verified"] = ok
    lines = [f"ranks {ranks(G)}"]
    for m in mats:
        lines.append(f"d_{m['degree']}: {m['rows']} x {m['cols']}")
        lines.extend("  [" + ", ".join(r) + "]" for r in m["entries"])
    if args.verify:
        lines.append("d d = 0: " + ("ok" if ok else "FAILED"))
    emit(args, payload, "\n".join(lines))
    return 0 if ok else 1


def cmd_homology(args) -> int:
    from .homology import homology
    from .resolution import specialized_complex, trivial_complex

    G = load_group(args.group)
    coeffs = args.coeffs
    if coeffs == "trivial":
        C = trivial_complex(G)
    elif coeffs.startswith("laurent:"):
        C = specialized_complex(G, laurent_character(coeffs[len("laurent:"):], G))
    elif coeffs.startswith("character:"):
        C = specialized_complex(G, load_character(coeffs[len("character:"):], G))
    else:
        raise UsageError("--coeffs must be trivial, laurent:<spec> or character:<file>")
    if args.degree is not None and not 0 <= args.degree <= G.ell:
        raise UsageError(f"--degree must lie in 0..{G.ell}")
    h = homology(C)
    data = h.to_json()
    if args.degree is not None:
        payload = data[args.degree]
        text = str(h).splitlines()[args.degree]
    else:
        payload, text = data, str(h)
    emit(args, payload, text)
    return 0


def _submodule_generators(spec: str, handle):
    from .magnus import gassner_submodule
    from .rings import RingMatrix

    if spec == "builtin":
        if handle.label != "theta^1_(3,2,2)":
            raise UsageError("the built-in submodule belongs to --kind gassner --l 3 --q 2 --m 1 --k 2")
        return gassner_submodule(handle.ring)
    with open(spec, encoding="utf-8") as fh:
        data = json.load(fh)
    ring = handle.ring
    src = type(ring)(ring.nvars, ring.rational, data["names"]) if data.get("names") else ring
    rows = []
    for row in data["generators"]:
        vals = []
        for x in row:
            y = src.parse(str(x))
            vals.append(type(y)(ring, dict(y.terms)))
        rows.append(vals)
    return RingMatrix(ring, rows)


def _rep_key(args) -> dict:
    sub = None
    if args.reduce and args.reduce.startswith("submodule:") and args.reduce != "submodule:builtin":
        sub = hashlib.sha256(Path(args.reduce[len("submodule:"):]).read_bytes()).hexdigest()
    from .builders import pnl

    group = pnl(args.l + args.q, args.l).description()
    return dict(group=group, kind=args.kind, l=args.l, q=args.q, m=args.m, k=args.k, reduce=args.reduce, sub=sub)


def build_handle(args):
    from .magnus import homological_rep, make_rep

    h = make_rep(args.kind, args.l, args.q, args.m, args.k)
    if args.reduce in (None, "none"):
        return h
    if args.reduce == "homology":
        return homological_rep(h)
    if args.reduce.startswith("submodule:"):
        return homological_rep(h, "submodule", _submodule_generators(args.reduce[len("submodule:"):], h))
    raise UsageError("--reduce must be homology or submodule:<file>")


def _key_from_name(name: str):
    if name.startswith("s"):
        return int(name[1:])
    a, b = name[1:].split(",")
    return (int(a), int(b))


def rep_handle(args):
    """Handle for the requested representation, with generator matrices served from the cache."""
    from .magnus import (
        RepresentationHandle, _key_name, braid_action, burau_tau, eta_tau, gassner_tau, pure_action,
    )
    from .rings import matrix_from_json

    if cache_dir() is None:
        return build_handle(args)
    kind = "pure" if args.kind == "gassner" else "braid"

    def compute():
        h = build_handle(args)
        return {
            "names": list(h.ring.names),
            "basis": h.basis,
            "label": h.label,
            "degree": h.degree,
            "generators": {_key_name(k, kind): m.to_json() for k, m in h.matrices.items()},
            "inverses": {_key_name(k, kind): m.to_json() for k, m in h.inverses.items()},
            "basis_rows": h.basis_rows.to_json() if h.basis_rows is not None else None,
        }

    data = cached("rep", cache_key(**_rep_key(args)), compute)
    names = data["names"]
    mats = {_key_from_name(k): matrix_from_json(v, names) for k, v in data["generators"].items()}
    invs = {_key_from_name(k): matrix_from_json(v, names) for k, v in data["inverses"].items()}
    n = args.l + args.q
    action = pure_action(n, args.l) if kind == "pure" else braid_action(n, args.l)
    tau = {"burau": burau_tau, "eta": eta_tau, "gassner": gassner_tau}[args.kind](n, args.l, args.m)
    ring = next(iter(mats.values())).ring
    rows = matrix_from_json(data["basis_rows"], names) if data.get("basis_rows") else None
    return RepresentationHandle(action, tau, data["degree"], ring, mats, invs, data["basis"], rows, data["label"])


def cmd_rep(args) -> int:
    from .magnus import detect, hecke_test

    for name in ("l", "q", "m", "k"):
        if getattr(args, name) < 1:
            raise UsageError(f"--{name} must be positive")
    if args.kind != "burau" and args.l < 2:
        raise UsageError("--l must be at least 2")
    if not (args.m <= args.q and args.k <= args.q):
        raise UsageError("need 1 <= m <= q and 1 <= k <= q")
    if args.action in ("eval", "detect") and not args.word:
        raise UsageError(f"rep {args.action} needs --word")
    if args.action == "detect":
        from .magnus import make_rep

        h = make_rep(args.kind, args.l, args.q, args.m, args.k)
        if args.reduce not in (None, "none", "homology"):
            raise UsageError("rep detect works on the homology of the chain-level representation")
        res = detect(h, args.word, exact=True if args.exact else None)
        emit(args, {"identity": res.identity, "method": res.method, "detail": res.detail}, str(res))
        return 0
    h = rep_handle(args)
    if args.action == "eval":
        M = h.evaluate(args.word)
        fmt = h.ring.fmt
        payload = {"word": args.word, "ring": h.ring.name, "matrix": [[fmt(x) for x in r] for r in M.rows], "identity": M.is_identity()}
        emit(args, payload, str(M) + ("\n(identity)" if M.is_identity() else ""))
        return 0
    payload = h.to_json()
    lines = [f"{h.label}: {h.size} x {h.size} over {h.ring.name}, basis {h.basis}"]
    for name, rows in payload["generators"].items():
        lines.append(f"{name} ->")
        lines.extend("  [" + ", ".join(r) + "]" for r in rows)
    if args.hecke:
        rep = hecke_test(h)
        payload["hecke"] = rep.degrees
        lines.append(str(rep))
    emit(args, payload, "\n".join(lines))
    return 0


def cmd_milnor(args) -> int:
    from .milnor import MAX_ELL, milnor_report

    if args.l < 2:
        raise UsageError("--l must be at least 2")
    if args.l > MAX_ELL and not args.force:
        raise UsageError(f"l > {MAX_ELL} is out of reach without --force")
    eig = args.eigenspaces or not (args.eigenspaces or args.zeta)
    zeta = args.zeta or not (args.eigenspaces or args.zeta)

    def compute():
        r = milnor_report(args.l, eigenspaces=eig, with_zeta=zeta, force=args.force)
        return {"json": r.to_json(), "table": r.table()}

    from .milnor import projective_group

    group = projective_group(args.l).description()
    data = cached("milnor", cache_key(group=group, l=args.l, eig=eig, zeta=zeta), compute)
    emit(args, data["json"], data["table"])
    return 0


def cmd_vanish(args) -> int:
    from .builders import pnl
    from .milnor import vanishing_verify

    if not 1 <= args.l < args.n:
        raise UsageError("need 1 <= l < n")
    if args.q < 0:
        raise UsageError("--q must be nonnegative")
    nu = load_character(args.character, pnl(args.n, args.l)) if args.character else None
    rep = vanishing_verify(args.n, args.l, args.q, nu)
    emit(args, rep.to_json(), str(rep))
    return 0 if rep.ok else 1


def cmd_validate(args) -> int:
    from .semidirect import validate

    G = load_group(args.group)
    rep = validate(G)
    emit(args, {"valid": rep.valid, "violations": rep.violations}, "valid" if rep.valid else str(rep))
    return 0 if rep.valid else 1


def cmd_golden(args) -> int:
    from .golden import FAIL, load_corpus, run_corpus, summary

    corpus = load_corpus(args.corpus)
    if not corpus:
        log.warning("empty corpus: nothing to compare")
        emit(args, {"results": [], "summary": "empty corpus"}, "warning: empty corpus (vacuous pass)")
        return 0
    results = run_corpus(args.corpus, include_slow=args.all, names=args.only)
    lines = [r.line() for r in results]
    for r in results:
        if r.diff:
            lines.append(r.diff.rstrip())
    lines.append(summary(results))
    payload = {"results": [{"name": r.name, "status": r.status, "note": r.note, "diff": r.diff} for r in results], "summary": summary(results)}
    emit(args, payload, "\n".join(lines))
    return 1 if any(r.status == FAIL for r in results) else 0


# -- argument parsing ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="foxres", description="Fox-calculus resolutions, twisted homology and Magnus-type representations.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("resolution", parents=[common], help="boundary matrices of C_*(G)")
    s.add_argument("--group", required=True, help="group file or builtin:<name>(<args>)")
    s.add_argument("--degree", type=int)
    s.add_argument("--verify", action="store_true", help="check d d = 0 over ZG")
    s.set_defaults(func=cmd_resolution)

    s = sub.add_parser("homology", parents=[common], help="homology with trivial or twisted coefficients")
    s.add_argument("--group", required=True)
    s.add_argument("--coeffs", default="trivial", help="trivial | laurent:<all|x1_2=t,...> | character:<file>")
    s.add_argument("--degree", type=int)
    s.set_defaults(func=cmd_homology)

    s = sub.add_parser("rep", parents=[common], help="generalized Burau/Gassner representations")
    s.add_argument("action", nargs="?", choices=("show", "eval", "detect"), default="show")
    s.add_argument("--kind", choices=("burau", "eta", "gassner"), required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--q", type=int, default=1)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--reduce", help="homology | submodule:<file> | submodule:builtin")
    s.add_argument("--word", help='e.g. "s1 s2^-1", "A1,2 A2,3^-1" or @longpaton-xi')
    s.add_argument("--exact", action="store_true", help="detect: skip the modular certificate")
    s.add_argument("--hecke", action="store_true", help="show: report minimal polynomial degrees")
    s.set_defaults(func=cmd_rep)

    s = sub.add_parser("milnor", parents=[common], help="Milnor fiber homology of the braid arrangement")
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--eigenspaces", action="store_true")
    s.add_argument("--zeta", action="store_true")
    s.add_argument("--force", action="store_true", help="allow l beyond the tested range")
    s.set_defaults(func=cmd_milnor)

    s = sub.add_parser("vanish", parents=[common], help="vanishing check for a local system on P_{n,l}")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--character", help="JSON character file (default: generic rational values)")
    s.set_defaults(func=cmd_vanish)

    s = sub.add_parser("validate", parents=[common], help="check that the actions define an iterated semidirect product")
    s.add_argument("--group", required=True)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("golden", parents=[common], help="regenerate and compare the golden corpus")
    s.add_argument("--corpus", help="corpus directory (default: the shipped corpus)")
    s.add_argument("--all", action="store_true", help="include slow cases")
    s.add_argument("--only", nargs="*", help="restrict to these case names")
    s.set_defaults(func=cmd_golden)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"foxres: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, ValueError, KeyError, OSError) as exc:
        print(f"foxres: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
