"""``pick-lab`` command line.

Exit status: 0 on success, 2 when the report carries a refutation or a
violation (still a successful run), 1 on errors.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import os
import sys

import numpy as np

from . import __version__
from .coeff import (
    CoeffFunction,
    CoeffFunctional,
    SpaceWeights,
    check_sequence_properties,
    gkz_weight,
    isometry_check_mz2,
    multiplicativity_defect,
    mz_unbounded_witness,
    space_norm_sq,
)
from .errors import PickLabError
from .gkz import DEFAULT_DEGREE, DEFAULT_TRIALS, gkz_dichotomy_search, point_eval_witness
from .kernels import FAMILIES, PSD_TOL, KernelSpec, gram, is_psd, kernel_matrix, min_eigenvalue
from .pick import (
    complete_pick_verdict,
    feature_map,
    multiplier_norm_lower_bound,
    normalize,
    pick_problem,
)
from .serialize import (
    coeff_from_json,
    cx,
    dumps,
    finding_to_json,
    functional_from_json,
    load_json,
    points_from_json,
    values_from_json,
)

EXIT_OK, EXIT_ERROR, EXIT_REFUTED = 0, 1, 2

_DOMAINS = {
    "szego": "unit disc, K = 1/(1 - z conj(w))",
    "bergman": "unit disc, K = 1/(1 - z conj(w))^2",
    "drury_arveson": "unit ball of C^d, K = 1/(1 - <z, w>); spell as drury_arveson:d",
    "diagonal": "unit disc, K = sum a_n (z conj(w))^n; spell as diagonal:gkz, diagonal:ones "
                "or diagonal:a0,a1,...",
    "segal_bargmann_hardy": "C x unit disc, K = exp(z1 conj(w1)) / (1 - z2 conj(w2))",
}


def parse_kernel(text: str) -> KernelSpec:
    name, _, arg = text.replace("(", ":").rstrip(")").partition(":")
    name = name.strip().lower().replace("-", "_")
    if name in ("szego", "hardy"):
        return KernelSpec.szego()
    if name == "bergman":
        return KernelSpec.bergman()
    if name in ("drury_arveson", "da"):
        return KernelSpec.drury_arveson(int(arg or 1))
    if name in ("segal_bargmann_hardy", "sb_hardy"):
        return KernelSpec.segal_bargmann_hardy()
    if name == "diagonal":
        if arg in ("", "ones"):
            return KernelSpec.diagonal(lambda n: 1.0, label="ones")
        if arg == "gkz":
            return KernelSpec.diagonal(gkz_weight, label="gkz")
        return KernelSpec.diagonal([float(a) for a in arg.split(",")], label="custom")
    raise ValueError(f"unknown kernel {text!r}; choose from {', '.join(FAMILIES)}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_ERROR)


def _default_tol() -> float:
    env = os.environ.get("PICKLAB_TOL")
    return float(env) if env else PSD_TOL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="PSD / search tolerance (default 1e-9 or $PICKLAB_TOL)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-o", "--output", help="write the JSON report here instead of stdout")

    p = _Parser(prog="pick-lab", description="Finite-sample complete Pick and GKZ checks.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    k = sub.add_parser("kernels", parents=[common], help="list kernel families")
    k.add_argument("action", choices=["list"])

    def with_points(name, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.add_argument("--kernel", required=True)
        sp.add_argument("--points", required=True, help="point-set JSON file")
        return sp

    with_points("gram", "Gram matrix and its PSD verdict")
    for name in ("cnp", "feature-map"):
        sp = with_points(name, "complete Pick defect test" if name == "cnp" else "feature map of the defect")
        sp.add_argument("--x0-index", type=int, default=None)
        sp.add_argument("--x0", default=None, help="explicit base point, comma-separated complex coordinates")
    sp = with_points("cnp-basepoints", "complete Pick verdict across base points")
    sp.add_argument("--candidates", required=True, help="point-set JSON file of base points")
    sp = with_points("pick-solve", "Pick interpolation feasibility")
    sp.add_argument("--targets", required=True, help="JSON list of complex targets")
    sp = with_points("mult-norm", "multiplier norm lower bound")
    sp.add_argument("--values", required=True, help="JSON list of complex multiplier values")

    ce = sub.add_parser("counterexample", parents=[common], help="reproduce the constructions")
    ce.add_argument("which", choices=["sb-hardy", "gkz-weights", "mz-witness"])
    ce.add_argument("--horizon", type=int, default=120)
    ce.add_argument("--blocks", type=int, default=50)

    gs = sub.add_parser("gkz-search", parents=[common], help="search for a dichotomy witness")
    gs.add_argument("--functional", required=True)
    gs.add_argument("--degree", type=int, default=DEFAULT_DEGREE)
    gs.add_argument("--trials", type=int, default=DEFAULT_TRIALS)

    pw = sub.add_parser("point-eval-witness", parents=[common], help="find a grid point matching a functional")
    pw.add_argument("--functional", required=True)
    pw.add_argument("--points", required=True, help="grid as point-set JSON")
    pw.add_argument("--tests", help="JSON list of coefficient functions (default: 1, coordinates, degree 2)")

    sq = sub.add_parser("seq-check", parents=[common], help="check the k!-block weight sequence")
    sq.add_argument("--horizon", type=int, required=True)
    return p


def _matrix(M) -> list:
    return [[cx(v) for v in row] for row in np.asarray(M)]


def _base_index(args, pts):
    if args.x0 is not None:
        if args.x0_index is not None:
            raise ValueError("give either --x0 or --x0-index, not both")
        return np.array([complex(c.replace(" ", "")) for c in args.x0.split(",")])
    if args.x0_index is not None:
        return args.x0_index
    if pts.base_index is not None:
        return pts.base_index
    raise ValueError("give --x0, --x0-index or a base_index in the point-set file")


def _cmd_kernels(args, tol):
    return {"families": [{"family": f, "domain": _DOMAINS[f]} for f in FAMILIES]}, False


def _cmd_gram(args, tol):
    spec = parse_kernel(args.kernel)
    pts = points_from_json(load_json(args.points))
    K = gram(spec, pts)
    ok = is_psd(K, tol)
    return {"kernel": spec.name, "n_points": len(pts), "gram": _matrix(K),
            "min_eig": min_eigenvalue(K), "psd": ok, "tol": tol}, not ok


def _cmd_cnp(args, tol):
    spec = parse_kernel(args.kernel)
    pts = points_from_json(load_json(args.points))
    v = complete_pick_verdict(spec, pts, _base_index(args, pts), tol)
    return v.report(spec.name), not v.psd


def _cmd_cnp_basepoints(args, tol):
    spec = parse_kernel(args.kernel)
    pts = points_from_json(load_json(args.points))
    cands = points_from_json(load_json(args.candidates))
    verdicts = []
    for x0 in cands:
        v = complete_pick_verdict(spec, pts, x0, tol)
        verdicts.append({"x0": [cx(c) for c in x0], "min_eig": v.min_eig, "psd": v.psd, "claim": v.claim})
    flags = {v["psd"] for v in verdicts}
    return {"kernel": spec.name, "n_points": len(pts), "verdicts": verdicts,
            "invariant": len(flags) <= 1, "tol": tol}, not all(flags)


def _cmd_feature_map(args, tol):
    spec = parse_kernel(args.kernel)
    pts = points_from_json(load_json(args.points))
    x0 = _base_index(args, pts)
    v = complete_pick_verdict(spec, pts, x0, tol)
    out = v.report(spec.name)
    if not v.psd:
        return out, True
    fm = feature_map(v.defect, tol)
    Kn = normalize(spec, pts, x0).gram(pts).entries
    err = np.abs(fm.kernel().entries - Kn) / np.abs(Kn)
    out.update({"rank": fm.rank, "rows": _matrix(fm.rows),
                "row_norm_sq": [float(np.vdot(r, r).real) for r in fm.rows],
                "max_rel_reconstruction_error": float(err.max()) if err.size else 0.0})
    return out, False


def _cmd_pick_solve(args, tol):
    spec = parse_kernel(args.kernel)
    pts = points_from_json(load_json(args.points))
    targets = values_from_json(load_json(args.targets))
    r = pick_problem(spec, pts, targets, tol)
    return r.report(spec.name, len(pts)), not r.feasible


def _cmd_mult_norm(args, tol):
    spec = parse_kernel(args.kernel)
    pts = points_from_json(load_json(args.points))
    h = values_from_json(load_json(args.values))
    c = multiplier_norm_lower_bound(spec, pts, h)
    return {"kernel": spec.name, "n_points": len(pts), "bound": c,
            "sup_abs": float(np.max(np.abs(h))) if h else 0.0}, False


def sb_hardy_report() -> dict:
    spec = KernelSpec.segal_bargmann_hardy()
    L = CoeffFunctional.basis_sum([(0, 0), (0, 1)])
    one = CoeffFunction.constant(1.0, 2)
    h = CoeffFunction.monomial((0, 1))
    samples = np.array([[0.0, 0.0], [1.5 - 2j, 0.3j], [-3.0, -0.7], [0.2 + 0.4j, 0.5 + 0.1j]])
    k_at_origin = kernel_matrix(spec, samples, np.zeros((1, 2)))[:, 0]
    probes = [one, CoeffFunction.monomial((1, 0)), CoeffFunction(2, {(2, 3): 1 - 1j, (0, 0): 2})]
    return {
        "kernel": spec.name,
        "lambda_one": cx(L(one)),
        "lambda_h": cx(L(h)),
        "lambda_h_sq": cx(L(h * h)),
        "defect": multiplicativity_defect(L, h, h),
        "normalized_at_origin": bool(np.all(k_at_origin == 1.0)),
        "isometry_residuals": [isometry_check_mz2(f) for f in probes],
    }


def _cmd_counterexample(args, tol):
    if args.which == "sb-hardy":
        rep = sb_hardy_report()
        return rep, rep["defect"] > tol
    if args.which == "gkz-weights":
        rep = check_sequence_properties(args.horizon).report()
        w = SpaceWeights.gkz()
        n_show = min(args.horizon, 30)
        rep["weights"] = [gkz_weight(n) for n in range(n_show + 1)]
        rep["monomial_norm_sq"] = [space_norm_sq(CoeffFunction.monomial(n), w) for n in range(n_show + 1)]
        return rep, False
    return mz_unbounded_witness(args.blocks).report(), False


def _cmd_gkz_search(args, tol):
    L = functional_from_json(load_json(args.functional))
    f = gkz_dichotomy_search(L, args.degree, args.trials, args.seed, tol)
    return finding_to_json(f), f.is_refutation


def _cmd_point_eval(args, tol):
    L = functional_from_json(load_json(args.functional))
    grid = points_from_json(load_json(args.points))
    tests = None
    if args.tests:
        tests = [coeff_from_json(t) for t in load_json(args.tests)]
    x = point_eval_witness(L, grid, tests, tol)
    return {"found": x is not None, "point": None if x is None else [cx(c) for c in x],
            "n_grid": len(grid), "tol": tol}, False


def _cmd_seq_check(args, tol):
    return check_sequence_properties(args.horizon).report(), False


_COMMANDS = {
    "kernels": _cmd_kernels,
    "gram": _cmd_gram,
    "cnp": _cmd_cnp,
    "cnp-basepoints": _cmd_cnp_basepoints,
    "feature-map": _cmd_feature_map,
    "pick-solve": _cmd_pick_solve,
    "mult-norm": _cmd_mult_norm,
    "counterexample": _cmd_counterexample,
    "gkz-search": _cmd_gkz_search,
    "point-eval-witness": _cmd_point_eval,
    "seq-check": _cmd_seq_check,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tol = args.tol if args.tol is not None else _default_tol()
    try:
        if not tol > 0:
            raise ValueError("tolerance must be positive")
        result, refuted = _COMMANDS[args.command](args, tol)
    except (PickLabError, ValueError, KeyError, TypeError, IndexError) as exc:
        print(f"pick-lab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = {
        "command": args.command,
        "seed": args.seed,
        "refutation": bool(refuted),
        "result": result,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    text = dumps(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_REFUTED if refuted else EXIT_OK


def main():
    sys.exit(run())
