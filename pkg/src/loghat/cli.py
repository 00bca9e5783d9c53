"""File-driven command line interface: parse pairing/motive documents, run
analyses, and emit structured reports.

Document format (JSON): {"version": "1", "q": <prime power>, "k": <arity>,
"objects": [...]} where each object is either

    {"name": ..., "kind": "pairing",
     "M": {"rank": n, "frob": [[...]]}, "N": {"rank": n, "frob": [[...]]},
     "X": [[[...]], ...]}

or

    {"name": ..., "kind": "motive",
     "Y": {"rank": n, "frob": [[...]]}, "X": {"rank": n, "frob": [[...]]},
     "pairing": [[[...]], ...], "abelian_poly": [c0, c1, ...],
     "classical_torsion": false}

Exit codes: 0 success, 2 validation error, 3 an `unknown` verdict was
encountered under --strict.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction

from .classify import (
    ClassifyError,
    UnknownVerdict,
    classify_rank1,
    classify_rank_a,
    classify_simple_k1,
    endomorphism_ring,
    is_simple_class,
)
from .corealg import IntPoly, imat, imat_identity
from .cyclotomic import CycloElem
from .gammamod import (
    GammaModule,
    GammaModuleError,
    LatticeMap,
    ZERO_MODULE,
    cyclotomic_multiplicities,
    is_simple,
    validate,
)
from .motive import (
    MotiveError,
    SymbolicLogOneMotive,
    WeilPoly1,
    decompose,
    frobenius_charpoly_motive,
    torus_charpoly,
    weight_spectrum,
)
from .pairing import (
    LatticePairing,
    PairingError,
    PairingMorphism,
    is_isogeny,
    is_pointwise_polarizable,
    normal_form,
    validate_pairing,
)

COMMANDS = (
    "analyze",
    "classify",
    "isogeny",
    "polarize",
    "decompose",
    "simple",
    "charpoly",
    "normalform",
)


class DocumentError(ValueError):
    pass


@dataclass(frozen=True)
class ObjectEntry:
    name: str
    kind: str  # "pairing" | "motive"
    raw: dict


@dataclass(frozen=True)
class InputDocument:
    version: str
    q: int
    k: int
    objects: tuple[ObjectEntry, ...]


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _expect(cond: bool, where: str, msg: str) -> None:
    if not cond:
        raise DocumentError(f"{where}: {msg}")


def _parse_module(data, where: str) -> GammaModule:
    _expect(isinstance(data, dict), where, "expected an object with rank and frob")
    _expect("rank" in data, where, "missing field 'rank'")
    _expect("frob" in data, where, "missing field 'frob'")
    rank = data["rank"]
    _expect(isinstance(rank, int) and rank >= 0, where, "'rank' must be a non-negative integer")
    frob = data["frob"]
    if rank == 0:
        _expect(frob in ([], ()), where, "rank 0 needs an empty frob")
        return ZERO_MODULE
    _expect(
        isinstance(frob, list) and len(frob) == rank
        and all(isinstance(r, list) and len(r) == rank for r in frob)
        and all(isinstance(v, int) for r in frob for v in r),
        where,
        f"'frob' must be a {rank}x{rank} integer matrix",
    )
    try:
        return validate(frob)
    except GammaModuleError as exc:
        raise DocumentError(f"{where}: {exc}") from exc


def _parse_matrices(data, k: int, rows: int, cols: int, where: str) -> list:
    _expect(isinstance(data, list) and len(data) == k, where, f"expected a list of {k} matrices")
    out = []
    for i, mat in enumerate(data):
        if rows == 0 or cols == 0:
            _expect(mat in ([], ()), f"{where}[{i}]", "expected an empty matrix")
            out.append(())
            continue
        _expect(
            isinstance(mat, list) and len(mat) == rows
            and all(isinstance(r, list) and len(r) == cols for r in mat)
            and all(isinstance(v, int) for r in mat for v in r),
            f"{where}[{i}]",
            f"expected a {rows}x{cols} integer matrix",
        )
        out.append(mat)
    return out


def parse_document(data) -> InputDocument:
    _expect(isinstance(data, dict), "document", "top level must be an object")
    for field in ("version", "q", "k", "objects"):
        _expect(field in data, "document", f"missing field '{field}'")
    _expect(data["version"] == "1", "document.version", "only version \"1\" is supported")
    q, k = data["q"], data["k"]
    from .motive import is_prime_power

    _expect(isinstance(q, int) and is_prime_power(q), "document.q", "must be a prime power")
    _expect(isinstance(k, int) and k >= 1, "document.k", "must be a positive integer")
    _expect(isinstance(data["objects"], list), "document.objects", "must be a list")
    entries = []
    seen = set()
    for idx, obj in enumerate(data["objects"]):
        where = f"objects[{idx}]"
        _expect(isinstance(obj, dict), where, "must be an object")
        name = obj.get("name", f"object-{idx}")
        _expect(isinstance(name, str), f"{where}.name", "must be a string")
        _expect(name not in seen, f"{where}.name", f"duplicate name {name!r}")
        seen.add(name)
        kind = obj.get("kind")
        _expect(kind in ("pairing", "motive"), f"{where}.kind", "must be 'pairing' or 'motive'")
        entries.append(ObjectEntry(name, kind, obj))
    return InputDocument("1", q, k, tuple(entries))


def build_pairing(entry: ObjectEntry, doc: InputDocument) -> LatticePairing:
    where = f"object {entry.name!r}"
    for field in ("M", "N", "X"):
        _expect(field in entry.raw, where, f"missing field '{field}'")
    m = _parse_module(entry.raw["M"], f"{where}.M")
    n = _parse_module(entry.raw["N"], f"{where}.N")
    xs = _parse_matrices(entry.raw["X"], doc.k, n.rank, m.rank, f"{where}.X")
    try:
        return validate_pairing(m, n, doc.k, xs)
    except PairingError as exc:
        raise DocumentError(f"{where}: {exc}") from exc


def build_motive(entry: ObjectEntry, doc: InputDocument) -> SymbolicLogOneMotive:
    where = f"object {entry.name!r}"
    for field in ("Y", "X", "pairing", "abelian_poly", "classical_torsion"):
        _expect(field in entry.raw, where, f"missing field '{field}'")
    y = _parse_module(entry.raw["Y"], f"{where}.Y")
    x = _parse_module(entry.raw["X"], f"{where}.X")
    mats = _parse_matrices(entry.raw["pairing"], doc.k, x.rank, y.rank, f"{where}.pairing")
    coeffs = entry.raw["abelian_poly"]
    _expect(
        isinstance(coeffs, list) and coeffs and all(isinstance(c, int) for c in coeffs),
        f"{where}.abelian_poly",
        "must be a non-empty list of integers (lowest degree first)",
    )
    flag = entry.raw["classical_torsion"]
    _expect(isinstance(flag, bool), f"{where}.classical_torsion", "must be a boolean")
    try:
        pairing = validate_pairing(y, x, doc.k, mats)
        abelian = WeilPoly1(doc.q, IntPoly(coeffs))
        return SymbolicLogOneMotive(doc.q, doc.k, y, x, pairing, abelian, flag)
    except (PairingError, MotiveError) as exc:
        raise DocumentError(f"{where}: {exc}") from exc


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------

def emit_fixture(name: str) -> dict:
    """Built-in example documents, bit-identical across runs."""
    if name == "paper-k2-remark":
        return {
            "version": "1",
            "q": 2,
            "k": 2,
            "objects": [
                {
                    "name": "paper-k2-remark",
                    "kind": "pairing",
                    "M": {"rank": 2, "frob": [[1, 0], [0, 1]]},
                    "N": {"rank": 2, "frob": [[1, 0], [0, 1]]},
                    "X": [[[1, 0], [0, 1]], [[1, 1], [1, 2]]],
                }
            ],
        }
    if name == "standard-logpoint-r4-q2":
        return {
            "version": "1",
            "q": 2,
            "k": 1,
            "objects": [
                {
                    "name": "standard-logpoint-r4-q2",
                    "kind": "pairing",
                    "M": {"rank": 2, "frob": [[0, -1], [1, 0]]},
                    "N": {"rank": 2, "frob": [[0, -1], [1, 0]]},
                    "X": [[[1, 0], [0, 1]]],
                }
            ],
        }
    if name == "mixed-motive-q2":
        return {
            "version": "1",
            "q": 2,
            "k": 1,
            "objects": [
                {
                    "name": "mixed-motive-q2",
                    "kind": "motive",
                    "Y": {"rank": 1, "frob": [[1]]},
                    "X": {"rank": 1, "frob": [[1]]},
                    "pairing": [[[1]]],
                    "abelian_poly": [2, -1, 1],
                    "classical_torsion": True,
                }
            ],
        }
    raise DocumentError(f"unknown fixture {name!r}")


FIXTURES = ("paper-k2-remark", "standard-logpoint-r4-q2", "mixed-motive-q2")


# ---------------------------------------------------------------------------
# report building
# ---------------------------------------------------------------------------

def _frac_str(x: Fraction) -> str:
    return str(x)


def _cyclo_json(x: CycloElem) -> dict:
    return {"r": x.r, "coeffs": [_frac_str(c) for c in x.coeffs]}


def _qmatrix_json(m) -> list:
    return [[_frac_str(x) for x in row] for row in m.entries]


def _poly_json(p: IntPoly) -> dict:
    return {"coeffs": list(p.coeffs), "pretty": str(p)}


def _verdict_json(v) -> dict:
    out = {"status": v.status, "tier": v.tier}
    if v.certificate is not None:
        out["certificate"] = _qmatrix_json(v.certificate)
    if v.reason:
        out["reason"] = v.reason
    return out


def _classification_json(p: LatticePairing, q: int, rng) -> dict:
    """Classification invariant of a ppol pairing, chosen by shape."""
    nf = normal_form(p, rng)
    blocks = list(nf.blocks)
    out = {"normal_form_blocks": [[r, a] for r, a in blocks]}
    if len(blocks) > 1:
        out["kind"] = "non-simple"
        out["detail"] = "splits into Hom-orthogonal isotypic blocks"
        return out
    r, a = blocks[0]
    if p.k == 1:
        cls, f, g = classify_simple_k1(nf.pairing, q, rng) if a == 1 else (None, None, None)
        if cls is not None:
            out["kind"] = "weil-pair"
            out["r"] = cls.r
            out["q"] = cls.q
            out["weight0_poly"] = _poly_json(f)
            out["weight2_poly"] = _poly_json(g)
            return out
    if a == 1:
        pt = classify_rank1(nf.pairing, rng)
        out["kind"] = "tuple"
        out["r"] = pt.r
        out["t"] = [_cyclo_json(t) for t in pt.t]
        return out
    cls = classify_rank_a(nf.pairing, rng)
    out["kind"] = "matrix-class"
    out["r"] = cls.r
    out["a"] = cls.a
    out["representatives"] = [
        [[_cyclo_json(x) for x in row] for row in mat.entries] for mat in cls.xbar
    ]
    return out


def _simplicity_json(p: LatticePairing, rng) -> dict:
    nf = normal_form(p, rng)
    if len(nf.blocks) > 1:
        return {
            "simple": False,
            "reason": "splits into Hom-orthogonal isotypic blocks",
            "blocks": [[r, a] for r, a in nf.blocks],
        }
    try:
        simple = is_simple_class(nf.pairing, rng)
    except UnknownVerdict as exc:
        return {"simple": "unknown", "reason": str(exc)}
    return {"simple": simple, "blocks": [[r, a] for r, a in nf.blocks]}


def _pairing_report(p: LatticePairing, q: int, command: str, rng) -> dict:
    report: dict = {"validation": "ok", "kind": "pairing"}
    if command in ("analyze", "charpoly"):
        report["charpoly_M"] = _poly_json(p.M.charpoly() if p.M.rank else IntPoly([1]))
        report["charpoly_N"] = _poly_json(p.N.charpoly() if p.N.rank else IntPoly([1]))
        report["torus_charpoly"] = _poly_json(torus_charpoly(p.N, q))
        report["product"] = _poly_json(
            (p.M.charpoly() if p.M.rank else IntPoly([1])) * torus_charpoly(p.N, q)
        )
    if command in ("analyze", "polarize", "classify", "simple", "normalform"):
        verdict = is_pointwise_polarizable(p, rng)
        report["pointwise_polarizable"] = _verdict_json(verdict)
        if not verdict.is_yes:
            return report
    if command in ("analyze", "normalform"):
        nf = normal_form(p, rng)
        ok, orders = is_isogeny(nf.morphism)
        report["normal_form"] = {
            "blocks": [[r, a] for r, a in nf.blocks],
            "index": nf.index,
            "isogeny_cokernel_orders": list(orders) if ok else None,
        }
        report["endomorphism_ring"] = [
            [r, a] for r, a in endomorphism_ring(nf.pairing).blocks
        ]
    if command in ("analyze", "classify"):
        report["classification"] = _classification_json(p, q, rng)
    if command in ("analyze", "simple"):
        report["simplicity"] = _simplicity_json(p, rng)
    return report


def _motive_report(m: SymbolicLogOneMotive, command: str, rng) -> dict:
    report: dict = {"validation": "ok", "kind": "motive"}
    if command in ("analyze", "charpoly"):
        report["charpoly"] = _poly_json(frobenius_charpoly_motive(m))
        report["charpoly_Y"] = _poly_json(m.Y.charpoly() if m.Y.rank else IntPoly([1]))
        report["abelian_poly"] = _poly_json(m.abelian.poly)
        report["torus_charpoly"] = _poly_json(torus_charpoly(m.X, m.q))
    if command in ("analyze", "classify"):
        report["weight_spectrum"] = [
            {"weight": w, "key": list(key) if isinstance(key, tuple) else key}
            for w, key in weight_spectrum(m)
        ]
    if command in ("analyze", "decompose", "classify", "polarize", "simple", "normalform"):
        verdict = is_pointwise_polarizable(m.pairing, rng)
        report["pointwise_polarizable"] = _verdict_json(verdict)
        if verdict.is_yes and command in ("analyze", "decompose"):
            pairing, abelian, cleared = decompose(m, rng)
            report["decomposition"] = {
                "lattice_rank": pairing.M.rank,
                "torus_rank": pairing.N.rank,
                "abelian_poly": _poly_json(abelian.poly),
                "classical_torsion_cleared": m.classical_torsion,
            }
        if verdict.is_yes and m.pairing.M.rank and command in ("analyze", "classify", "simple"):
            report["pairing_part"] = _pairing_report(m.pairing, m.q, command, rng)
    return report


def _contains_unknown(obj) -> bool:
    if isinstance(obj, dict):
        return any(_contains_unknown(v) for v in obj.values())
    if isinstance(obj, list):
        return any(_contains_unknown(v) for v in obj)
    return obj == "unknown"


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _render_text(report: dict, indent: int = 0) -> list[str]:
    lines = []
    pad = "  " * indent
    for key, value in report.items():
        if isinstance(value, dict):
            if set(value) == {"coeffs", "pretty"}:
                lines.append(f"{pad}{key}: {value['pretty']}")
            else:
                lines.append(f"{pad}{key}:")
                lines.extend(_render_text(value, indent + 1))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}:")
            for item in value:
                lines.extend(_render_text(item, indent + 1))
        else:
            lines.append(f"{pad}{key}: {value}")
    return lines


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2)
    return "\n".join(_render_text(report))


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

def _load_document(path: str) -> InputDocument:
    if path.startswith("fixture:"):
        return parse_document(emit_fixture(path[len("fixture:"):]))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_document(data)


def run(command: str, paths: list[str], *, fmt: str = "text", strict: bool = False,
        seed: int = 0, isogeny_args: tuple | None = None, out=None) -> int:
    """Run a command over input documents; returns the exit code."""
    out = out or sys.stdout
    if command not in COMMANDS:
        print(f"error: unknown command {command!r}", file=sys.stderr)
        return 2
    try:
        docs = [(path, _load_document(path)) for path in paths]
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    full: dict = {}
    try:
        for path, doc in docs:
            if command == "isogeny":
                full[path] = _run_isogeny(doc, isogeny_args, seed)
                continue
            doc_report = {}
            for entry in doc.objects:
                rng = random.Random(seed)
                if entry.kind == "pairing":
                    obj = build_pairing(entry, doc)
                    doc_report[entry.name] = _pairing_report(obj, doc.q, command, rng)
                else:
                    obj = build_motive(entry, doc)
                    doc_report[entry.name] = _motive_report(obj, command, rng)
            full[path] = doc_report
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ClassifyError, MotiveError, PairingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UnknownVerdict as exc:
        print(f"error: undecided: {exc}", file=sys.stderr)
        return 3 if strict else 0
    print(render(full if len(full) > 1 else next(iter(full.values())), fmt), file=out)
    if strict and _contains_unknown(full):
        return 3
    return 0


def _run_isogeny(doc: InputDocument, args, seed: int) -> dict:
    if not args or len(args) != 4:
        raise DocumentError(
            "isogeny needs SRC DST --psi1 '[[..]]' --psi2 '[[..]]'"
        )
    src_name, dst_name, psi1_raw, psi2_raw = args
    by_name = {e.name: e for e in doc.objects}
    for name in (src_name, dst_name):
        if name not in by_name:
            raise DocumentError(f"no object named {name!r} in the document")
        if by_name[name].kind != "pairing":
            raise DocumentError(f"object {name!r} is not a pairing")
    src = build_pairing(by_name[src_name], doc)
    dst = build_pairing(by_name[dst_name], doc)
    try:
        psi1 = imat(json.loads(psi1_raw))
        psi2 = imat(json.loads(psi2_raw))
    except (json.JSONDecodeError, ValueError) as exc:
        raise DocumentError(f"bad morphism matrix: {exc}") from exc
    try:
        phi = PairingMorphism(
            src, dst,
            LatticeMap(src.M, dst.M, psi1),
            LatticeMap(dst.N, src.N, psi2),
        )
    except (PairingError, GammaModuleError) as exc:
        raise DocumentError(f"invalid morphism: {exc}") from exc
    ok, orders = is_isogeny(phi)
    out = {"source": src_name, "target": dst_name, "is_isogeny": ok}
    if ok:
        out["cokernel_orders"] = list(orders)
    return out


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="loghat",
        description=(
            "Exact Honda-Tate classification data for log abelian varieties "
            "over finite log points."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "isogeny":
            p.add_argument("file")
            p.add_argument("source")
            p.add_argument("target")
            p.add_argument("--psi1", required=True, help="JSON matrix for M_src -> M_dst")
            p.add_argument("--psi2", required=True, help="JSON matrix for N_dst -> N_src")
        else:
            p.add_argument(
                "files", nargs="+",
                help="input documents (paths or fixture:NAME)",
            )
        p.add_argument("--format", choices=("json", "text"), default="text")
        p.add_argument("--strict", action="store_true",
                       help="exit 3 when an unknown verdict is encountered")
        p.add_argument("--seed", type=int, default=0)
    fx = sub.add_parser("fixture", help="print a built-in example document")
    fx.add_argument("name", choices=FIXTURES)
    args = parser.parse_args(argv)
    if args.command == "fixture":
        print(json.dumps(emit_fixture(args.name), indent=2))
        return 0
    if args.command == "isogeny":
        return run(
            "isogeny", [args.file], fmt=args.format, strict=args.strict,
            seed=args.seed,
            isogeny_args=(args.source, args.target, args.psi1, args.psi2),
        )
    return run(args.command, args.files, fmt=args.format, strict=args.strict,
               seed=args.seed)


if __name__ == "__main__":
    sys.exit(main())
