"""Command-line entry point.

Reports are JSON (stable key order) on stdout or ``--out``; a one-line
summary goes to stderr. Exit status: 0 ok, 1 a verification exceeded its
tolerance, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Tuple

import numpy as np

from .boundary_measure import (
    PSMeasure,
    conformality_residual,
    conformality_sweep,
    exponent_witness,
    mass_deviation,
)
from .classify import build_conjugacy, fingerprint, survey
from .covering_tree import CoveringTree, enumerate_words
from .errors import GraphQSMError
from .ktheory import edge_ck_strict_iso, k0_vertex_ck, theorem1_oracle
from .multigraph import isomorphic, load_multigraph
from .nonbacktracking import bass_hashimoto, ihara_zeta_recip, perron_root
from .qsm import CrossedProduct, kms_residual, kms_witness_pair

CONFORMAL_TOL = 1e-10
MASS_TOL = 1e-12
KMS_TOL = 1e-9
WITNESS_MIN = 1e-3
WITNESS_OFFSETS = (-0.5, -0.1, 0.1, 0.5)


class UsageError(Exception):
    pass


def _load(path: str):
    try:
        return load_multigraph(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _check_bounds(args) -> None:
    if not 1 <= args.depth <= 8:
        raise UsageError("--depth must be in 1..8")
    if not 1 <= args.wordlen <= 6:
        raise UsageError("--wordlen must be in 1..6")
    if not 1 <= args.L <= 6:
        raise UsageError("--L must be in 1..6")
    if args.trials < 1:
        raise UsageError("--trials must be positive")


def cmd_invariants(args) -> Tuple[dict, bool, str]:
    g = _load(args.graph)
    fp = fingerprint(g, args.L)
    orientation = {e.id: e.ends for e in g.edges}
    report = {
        "command": "invariants",
        "graph": args.graph,
        "n_vertices": g.n_vertices,
        "n_edges": g.n_edges,
        "fingerprint": fp.to_dict(),
        "k0": str(fp.k0),
        "delta": perron_root(bass_hashimoto(g)).delta,
        "vertex_ck_k0_file_orientation": str(k0_vertex_ck(g, orientation)),
    }
    return report, True, f"g={fp.g} K0={fp.k0} delta={report['delta']:.12g}"


def cmd_zeta(args) -> Tuple[dict, bool, str]:
    g = _load(args.graph)
    g.require_admissible(min_betti=2)
    z = ihara_zeta_recip(g)
    report = {
        "command": "zeta",
        "graph": args.graph,
        "zeta_recip": z,
        "degree": len(z) - 1,
        "cross_check": "edge operator and vertex determinant agree",
    }
    return report, True, f"degree {len(z) - 1}, cross-check ok"


def cmd_compare(args) -> Tuple[dict, bool, str]:
    gx, gy = _load(args.graph_a), _load(args.graph_b)
    fx, fy = fingerprint(gx, args.L), fingerprint(gy, args.L)
    t1 = theorem1_oracle(gx, gy)
    stable, strict = edge_ck_strict_iso(gx, gy)
    iso = isomorphic(gx, gy)
    report = {
        "command": "compare",
        "graphs": [args.graph_a, args.graph_b],
        "theorem1": t1.to_dict(),
        "edge_ck": {"stable": stable, "strict": strict},
        "fingerprint_diff": fx.diff(fy),
        "fingerprints_equal": fx == fy,
        "isomorphic": iso is not None,
        "isomorphism": None if iso is None else {
            "vertex_map": dict(iso.vertex_map), "edge_map": dict(iso.edge_map),
        },
    }
    ok = True
    if args.conjugacy:
        if t1.verdict:
            _, rep = build_conjugacy(gx, gy, max_depth=args.depth)
            report["conjugacy"] = rep
            ok = rep["ok"]
        else:
            report["conjugacy"] = {"ok": None, "reason": "Betti numbers differ; no conjugacy exists"}
    summary = (f"theorem1={t1.verdict} isomorphic={iso is not None} "
               f"zeta_equal={report['fingerprint_diff']['zeta_equal']}")
    return report, ok, summary


def cmd_verify_conformal(args) -> Tuple[dict, bool, str]:
    g = _load(args.graph)
    tree = CoveringTree(g)
    m = PSMeasure(tree)
    words = enumerate_words(tree.rank, args.wordlen, min_length=1)
    sweep = conformality_sweep(m, words, args.depth)
    masses = {str(k): mass_deviation(m, k) for k in range(1, 9)}
    word, cyl = exponent_witness(m)
    witness = {
        f"{off:+g}": conformality_residual(m, word, cyl, beta=m.delta + off)
        for off in WITNESS_OFFSETS
    }
    ok_conf = sweep.max_residual <= CONFORMAL_TOL
    ok_mass = max(masses.values()) <= MASS_TOL
    ok_wit = min(witness.values()) > WITNESS_MIN
    report = {
        "command": "verify-conformal",
        "graph": args.graph,
        "lambda": m.lam,
        "delta": m.delta,
        "conformality": {**sweep.to_dict(), "tolerance": CONFORMAL_TOL, "ok": ok_conf},
        "mass_deviation": {"by_depth": masses, "tolerance": MASS_TOL, "ok": ok_mass},
        "exponent_witness": {
            "word": list(word),
            "cylinder": tree.path_to_json(cyl),
            "residual_by_beta_offset": witness,
            "minimum_required": WITNESS_MIN,
            "ok": ok_wit,
        },
    }
    ok = ok_conf and ok_mass and ok_wit
    return report, ok, f"max conformality residual {sweep.max_residual:.3e} over {sweep.n_checked} checks"


def cmd_verify_kms(args) -> Tuple[dict, bool, str]:
    g = _load(args.graph)
    tree = CoveringTree(g)
    alg = CrossedProduct(tree)
    m = PSMeasure(tree, perron=alg.perron)
    if args.beta == "auto":
        beta = alg.delta
    else:
        try:
            beta = float(args.beta)
        except ValueError as exc:
            raise UsageError("--beta must be 'auto' or a number") from exc
    rng = np.random.default_rng(args.seed)
    residuals = []
    for _ in range(args.trials):
        a = alg.random_element(rng)
        b = alg.random_element(rng)
        residuals.append(kms_residual(a, b, beta, m))
    wa, wb = kms_witness_pair(alg)
    witness_here = kms_residual(wa, wb, beta, m)
    worst = max(residuals + [witness_here])
    ok = worst <= KMS_TOL
    report = {
        "command": "verify-kms",
        "graph": args.graph,
        "delta": alg.delta,
        "beta": beta,
        "seed": args.seed,
        "trials": args.trials,
        "max_random_residual": max(residuals),
        "witness_pair": {"a": [1], "b": [-1], "residual": witness_here},
        "witness_off_critical": {
            f"{off:+g}": kms_residual(wa, wb, alg.delta + off, m) for off in WITNESS_OFFSETS
        },
        "tolerance": KMS_TOL,
        "ok": ok,
    }
    return report, ok, f"beta={beta:.12g} max KMS residual {worst:.3e}"


def cmd_survey(args) -> Tuple[dict, bool, str]:
    if not (1 <= args.max_v <= 5 and 1 <= args.max_e <= 10):
        raise UsageError("survey bounds: --max-v <= 5, --max-e <= 10")
    report = {"command": "survey", **survey(args.max_v, args.max_e, args.L)}
    s = report["summary"]
    ok = s["theorem1_classes_by_betti"]
    return report, ok, (f"{s['n_graphs']} graphs, {s['n_theorem1_classes']} boundary-algebra classes, "
                        f"{s['n_collisions']} fingerprint collisions")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=6, help="cylinder depth (default 6)")
    common.add_argument("--wordlen", type=int, default=4, help="max word length (default 4)")
    common.add_argument("--L", type=int, default=5, help="length-spectrum bound (default 5)")
    common.add_argument("--trials", type=int, default=100, help="random pairs (default 100)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--out", help="write the JSON report here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="graphqsm", description="Boundary-algebra and KMS invariants of finite multigraphs."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", parents=[common], help="fingerprint, K0, delta, zeta")
    p.add_argument("graph")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("compare", parents=[common], help="compare two graphs")
    p.add_argument("graph_a")
    p.add_argument("graph_b")
    p.add_argument("--conjugacy", action="store_true", help="build and check the boundary conjugacy")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify-conformal", parents=[common], help="Patterson-Sullivan conformality")
    p.add_argument("graph")
    p.set_defaults(func=cmd_verify_conformal)

    p = sub.add_parser("verify-kms", parents=[common], help="KMS condition on random pairs")
    p.add_argument("graph")
    p.add_argument("--beta", default="auto", help="inverse temperature, or 'auto' for delta")
    p.set_defaults(func=cmd_verify_kms)

    p = sub.add_parser("survey", parents=[common], help="pairwise survey of enumerated graphs")
    p.add_argument("--max-v", type=int, default=3)
    p.add_argument("--max-e", type=int, default=6)
    p.set_defaults(func=cmd_survey)

    p = sub.add_parser("zeta", parents=[common], help="reciprocal Ihara zeta, cross-checked")
    p.add_argument("graph")
    p.set_defaults(func=cmd_zeta)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _check_bounds(args)
        report, ok, summary = args.func(args)
    except (UsageError, GraphQSMError, ValueError) as exc:
        print(f"graphqsm: error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{args.command}: {'ok' if ok else 'FAILED'}: {summary}", file=sys.stderr)
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
