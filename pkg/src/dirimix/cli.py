"""Command-line front end.

Exit codes: 0 equal or verified, 1 not equal or refuted, 2 inconclusive,
3 usage or input error, 4 feasibility error. Errors are printed as a JSON
object ``{"error": {"type": ..., "message": ...}}``.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels as K
from .equivalence import (
    EQUAL,
    INCONCLUSIVE,
    RANK_TOL,
    certify,
    decide_equality,
    gram_matrix,
    gram_spectrum,
    numerical_null_space,
)
from .errors import AmbiguityError, FeasibilityError
from .exactpoly import (
    DEFAULT_EPS_INT,
    lattice,
    null_relation_basis,
    relation_from_vector,
    shift_relation,
    sign_counts,
)
from .numeric_core import as_exact, compositions, format_rational
from .series import h_series_coeff, h_series_eval
from .transports import (
    alr_density,
    alr_inverse,
    alr_transform,
    chart_inverse,
    chart_transform,
    transported_log_density,
)
from .witnesses import (
    MixingMeasure,
    WitnessPair,
    context_from_json,
    dm_shift_residual,
    dm_witness,
    embed_witness,
    lda_shift_residual,
    lda_witness,
    measure_from_json,
    shift_witness,
)

EXIT_OK, EXIT_NO, EXIT_UNSURE, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3, 4
MODE_ENV = "DIRIMIX_MODE"
MODES = ("exact", "float")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int
    mode: str
    tol_int: float
    tol_rank: float
    output: str | None
    mode_explicit: bool

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        if self.mode not in MODES:
            raise UsageError(f"mode must be one of {MODES}, got {self.mode!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------


def _scalar(text: str, exact: bool):
    v = as_exact(text.strip())
    return v if exact else float(v)


def _vector(text: str, exact: bool) -> tuple:
    try:
        return tuple(_scalar(t, exact) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise UsageError(f"malformed vector {text!r}") from exc


def _matrix(text: str, exact: bool) -> tuple:
    return tuple(_vector(row, exact) for row in text.split(";") if row.strip())


def _ints(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise UsageError(f"malformed integer list {text!r}") from exc


def _num(v):
    return format_rational(v) if isinstance(v, Fraction) else float(v)


def _load_json(path: str | None):
    try:
        if path is None or path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path or 'stdin'}: {exc}") from exc
    except OSError as exc:
        raise UsageError(str(exc)) from exc


def _exact_flag(cfg: RunConfig):
    return cfg.exact if cfg.mode_explicit else None


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _verify_witness(pair: WitnessPair, cfg: RunConfig) -> dict:
    if pair.family == K.DIRICHLET_MULTINOMIAL and pair.G0.exact:
        alpha = pair.G0.params[0]
        n = pair.context["n"]
        worst = max(abs(dm_shift_residual(n, alpha, x)) for x in compositions(n, len(alpha)))
        return {"verdict": EQUAL if worst == 0 else "not_equal", "method": "residual", "residual": _num(worst)}
    if pair.family == K.LDA_MARGINAL and pair.G0.exact and pair.context.get("document"):
        alpha = pair.G0.params[0]
        r = abs(lda_shift_residual(alpha, pair.context["beta"], pair.context["document"]))
        return {"verdict": EQUAL if r == 0 else "not_equal", "method": "residual", "residual": _num(r)}
    cert = decide_equality(pair.G0, pair.G1, context=pair.context, seed=cfg.seed)
    return cert.to_json()


def cmd_witness(args, cfg: RunConfig):
    alpha = _vector(args.alpha, cfg.exact)
    if args.kind == "shift":
        pair = shift_witness(alpha, args.family)
    elif args.kind == "dm":
        if args.n is None:
            raise UsageError("witness dm needs --n")
        pair = dm_witness(alpha, args.n)
    elif args.kind == "lda":
        if args.beta is None:
            raise UsageError("witness lda needs --beta")
        doc = _ints(args.document) if args.document else ()
        pair = lda_witness(alpha, _matrix(args.beta, cfg.exact), doc)
    else:
        pair = embed_witness(alpha, args.target)
    out = pair.to_json()
    out["verification"] = _verify_witness(pair, cfg)
    return out, _verdict_code(out["verification"]["verdict"])


def _verdict_code(verdict: str) -> int:
    if verdict == EQUAL:
        return EXIT_OK
    if verdict == INCONCLUSIVE:
        return EXIT_UNSURE
    return EXIT_NO


def _read_pair(args, cfg: RunConfig):
    exact = _exact_flag(cfg)
    if len(args.measures) == 2:
        G0 = measure_from_json(_load_json(args.measures[0]), exact=exact)
        G1 = measure_from_json(_load_json(args.measures[1]), exact=exact)
        context = {}
        if args.context:
            context = context_from_json(_load_json(args.context), exact=exact)
        return G0, G1, context
    if len(args.measures) > 2:
        raise UsageError("equal takes two measure files or one witness file")
    obj = _load_json(args.measures[0] if args.measures else None)
    if "G0" not in obj or "G1" not in obj:
        raise UsageError("expected a witness pair with G0 and G1")
    pair = WitnessPair.from_json(obj, exact=exact)
    return pair.G0, pair.G1, pair.context


def _grid_points(J: int, size: int) -> np.ndarray:
    if J == 2:
        t = np.arange(1, size) / size
        return np.stack([t, 1 - t], axis=1)
    pts = [np.asarray(c, dtype=float) / size for c in compositions(size, J) if min(c) > 0]
    return np.asarray(pts)


def _write_grid(path: str, G0: MixingMeasure, G1: MixingMeasure, size: int):
    if G0.family in K.DISCRETE_FAMILIES:
        raise UsageError("density grids apply to continuous families only")
    x = _grid_points(G0.J, size)
    pts = x[:, :-1] / x[:, -1:] if G0.family in K.ORTHANT_FAMILIES else x
    m0 = np.exp(K.mixture_log_density(G0, None, pts))
    m1 = np.exp(K.mixture_log_density(G1, None, pts))
    names = [f"y{j + 1}" for j in range(pts.shape[1])] if G0.family in K.ORTHANT_FAMILIES else [
        f"x{j + 1}" for j in range(pts.shape[1])
    ]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names + ["m_G", "m_G_prime", "abs_diff"])
        for p, a, b in zip(pts, np.atleast_1d(m0), np.atleast_1d(m1)):
            w.writerow([repr(float(v)) for v in p] + [repr(float(a)), repr(float(b)), repr(abs(float(a) - float(b)))])


def cmd_equal(args, cfg: RunConfig):
    G0, G1, context = _read_pair(args, cfg)
    cert = decide_equality(
        G0,
        G1,
        context=context,
        method=args.method,
        seed=cfg.seed,
        n_samples=args.samples,
        eps_int=cfg.tol_int,
    )
    if args.grid:
        _write_grid(args.grid, G0, G1, args.grid_size)
    return cert.to_json(), _verdict_code(cert.verdict)


def cmd_certify(args, cfg: RunConfig):
    exact = _exact_flag(cfg)
    measures = [measure_from_json(_load_json(p), exact=exact) for p in (args.measures or ["-"])]
    if len(measures) > 2:
        raise UsageError("certify takes one or two measure files")
    certs = certify(*measures)
    out = {"certificates": [c.to_json() for c in certs]}
    return out, EXIT_OK if certs else EXIT_UNSURE


def cmd_relations(args, cfg: RunConfig):
    J, deg = args.J, args.max_degree
    if J < 2 or deg < 0:
        raise UsageError("need --J >= 2 and --max-degree >= 0")
    exps = lattice(J, deg)
    basis = null_relation_basis(exps, J)
    vectors = []
    ok = True
    for vec in basis:
        rel = relation_from_vector(exps, vec, J)
        sc = sign_counts(rel)
        ok = ok and sc.bound_check and max(sc.positives, sc.negatives) >= J
        vectors.append(
            {
                "terms": [
                    {"exponent": list(e), "coefficient": format_rational(c)} for e, c in rel.terms
                ],
                "positives": sc.positives,
                "negatives": sc.negatives,
                "bound_check": sc.bound_check,
            }
        )
    shift = sign_counts(shift_relation(J))
    out = {
        "J": J,
        "max_degree": deg,
        "monomials": len(exps),
        "dimension": len(basis),
        "basis": vectors,
        "all_satisfy_bound": ok,
        "shift_sign_counts": [shift.positives, shift.negatives],
    }
    return out, EXIT_OK if ok else EXIT_NO


def _read_params(args, cfg: RunConfig) -> list:
    if args.params:
        return [_vector(row, cfg.exact) for row in args.params.split(";") if row.strip()]
    obj = _load_json(args.file)
    if isinstance(obj, dict) and "atoms" in obj:
        return measure_from_json(obj, exact=_exact_flag(cfg)).params
    return [tuple(_scalar(str(v), cfg.exact) for v in row) for row in obj]


def cmd_gram(args, cfg: RunConfig):
    params = _read_params(args, cfg)
    M = gram_matrix(params)
    eig, cond = gram_spectrum(M)
    null = numerical_null_space(M, cfg.tol_rank)
    out = {
        "params": [[_num(v) for v in p] for p in params],
        "gram": M.tolist(),
        "eigenvalues": eig.tolist(),
        "condition": cond if np.isfinite(cond) else None,
        "tol_rank": cfg.tol_rank,
        "null_space": [v.tolist() for v in null],
    }
    return out, EXIT_OK


def cmd_transport(args, cfg: RunConfig):
    point = np.asarray(_vector(args.point, False), dtype=float)
    out: dict = {"direction": args.direction}
    if args.direction == "alr":
        t = alr_transform(point).t
        out["t"] = t.tolist()
        if args.alpha:
            out["density"] = alr_density(_vector(args.alpha, False), t)
    elif args.direction == "alr-inverse":
        out["x"] = alr_inverse(point).x.tolist()
        if args.alpha:
            out["density"] = alr_density(_vector(args.alpha, False), point)
    elif args.direction == "chart":
        x = chart_transform(point).x
        out["x"] = x.tolist()
        if args.alpha:
            out["density"] = float(np.exp(transported_log_density(_vector(args.alpha, False), point)))
    else:
        y = chart_inverse(point).y
        out["y"] = y.tolist()
        if args.alpha:
            out["density"] = float(np.exp(transported_log_density(_vector(args.alpha, False), y)))
    return out, EXIT_OK


def cmd_series(args, cfg: RunConfig):
    alpha = _vector(args.alpha, False)
    if args.action == "coeff":
        if args.m is None:
            raise UsageError("series coeff needs --m")
        coef, u = h_series_coeff(alpha, _ints(args.m))
        return {"coefficient": coef, "u": list(u)}, EXIT_OK
    if args.y is None:
        raise UsageError("series eval needs --y")
    y = _vector(args.y, False)
    value, tail = h_series_eval(alpha, y, args.order)
    exact = float(np.exp(transported_log_density(alpha, y)))
    out = {"value": value, "tail_bound": tail, "order": args.order, "h": exact, "abs_error": abs(value - exact)}
    return out, EXIT_OK if abs(value - exact) <= tail else EXIT_NO


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for stochastic steps (default 0)")
    common.add_argument("--mode", choices=MODES, default=None, help=f"number mode (default ${MODE_ENV} or exact)")
    common.add_argument("--tol-int", type=float, default=DEFAULT_EPS_INT, help="integer-congruence tolerance")
    common.add_argument("--tol-rank", type=float, default=RANK_TOL, help="relative eigenvalue cutoff")
    common.add_argument("--output", "-o", default=None, help="write JSON here instead of stdout")

    parser = _Parser(prog="dirimix", description="Identifiability tools for Dirichlet mixtures.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    w = sub.add_parser("witness", parents=[common], help="emit a non-identifiability witness")
    w.add_argument("kind", choices=["shift", "dm", "lda", "embed"])
    w.add_argument("--alpha", required=True, help="comma-separated parameter, e.g. 1,1 or 1/2,3/2")
    w.add_argument("--family", default=K.DIRICHLET, help="dirichlet or inverted_dirichlet (shift)")
    w.add_argument("--n", type=int, help="number of draws (dm)")
    w.add_argument("--beta", help="topic matrix rows separated by ';' (lda)")
    w.add_argument("--document", help="comma-separated 1-based word ids (lda)")
    w.add_argument("--target", default="gd", help="target family for embed: gd, bl, ibl")
    w.set_defaults(func=cmd_witness)

    e = sub.add_parser("equal", parents=[common], help="decide whether two measures give equal mixtures")
    e.add_argument("measures", nargs="*", help="two measure files, or one witness file (default stdin)")
    e.add_argument("--context", help="JSON context for discrete families")
    e.add_argument("--method", choices=["exact_polynomial", "closed_form_l2", "monte_carlo", "enumeration"])
    e.add_argument("--samples", type=int, default=100_000, help="Monte Carlo sample size")
    e.add_argument("--grid", help="write a CSV density grid to this path")
    e.add_argument("--grid-size", type=int, default=20)
    e.set_defaults(func=cmd_equal)

    c = sub.add_parser("certify", parents=[common], help="list identifiable regimes")
    c.add_argument("measures", nargs="*", help="one or two measure files (default stdin)")
    c.set_defaults(func=cmd_certify)

    r = sub.add_parser("relations", parents=[common], help="exact null relations over a lattice")
    r.add_argument("--J", type=int, required=True)
    r.add_argument("--max-degree", type=int, required=True)
    r.set_defaults(func=cmd_relations)

    g = sub.add_parser("gram", parents=[common], help="Gram matrix and numerical null space")
    g.add_argument("file", nargs="?", help="JSON list of parameters or a measure (default stdin)")
    g.add_argument("--params", help="parameters separated by ';', e.g. '2,2,2;3,2,2'")
    g.set_defaults(func=cmd_gram)

    t = sub.add_parser("transport", parents=[common], help="log-ratio and orthant charts")
    t.add_argument("direction", choices=["alr", "alr-inverse", "chart", "chart-inverse"])
    t.add_argument("--point", required=True)
    t.add_argument("--alpha", help="also report the transported density")
    t.set_defaults(func=cmd_transport)

    s = sub.add_parser("series", parents=[common], help="series coefficients and evaluation")
    s.add_argument("action", choices=["coeff", "eval"])
    s.add_argument("--alpha", required=True)
    s.add_argument("--m", help="multi-index for coeff")
    s.add_argument("--y", help="orthant point for eval")
    s.add_argument("--order", type=int, default=40)
    s.set_defaults(func=cmd_series)
    return parser


def _config(args) -> RunConfig:
    env = os.environ.get(MODE_ENV)
    if env is not None and env not in MODES:
        raise UsageError(f"{MODE_ENV} must be one of {MODES}, got {env!r}")
    mode = args.mode or env or "exact"
    return RunConfig(args.seed, mode, args.tol_int, args.tol_rank, args.output, bool(args.mode or env))


def _emit(obj: dict, path: str | None):
    text = json.dumps(obj, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(kind: str, message: str) -> dict:
    return {"error": {"type": kind, "message": message}}


def main(argv=None) -> int:
    output = None
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args)
        output = cfg.output
        obj, code = args.func(args, cfg)
    except UsageError as exc:
        _emit(_error("usage", str(exc)), None)
        return EXIT_USAGE
    except FeasibilityError as exc:
        _emit(_error("feasibility", str(exc)), None)
        return EXIT_INFEASIBLE
    except AmbiguityError as exc:
        _emit(_error("ambiguity", str(exc)), None)
        return EXIT_USAGE
    except (ValueError, TypeError, KeyError) as exc:
        _emit(_error("input", str(exc)), None)
        return EXIT_USAGE
    _emit(obj, output)
    return code


if __name__ == "__main__":
    sys.exit(main())
