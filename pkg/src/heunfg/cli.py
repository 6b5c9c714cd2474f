"""Command line front end: compute, verify, and export spectral data.

Subcommands
-----------
spaces    finite invariant spaces with dimensions and characteristic polynomials
spectral  spectral polynomial, curve, commuting operator, and the identity suite
partners  operators sharing the spectral polynomial, with verified witnesses
darboux   one intertwining operator and its residual status
generic   numeric root-distinctness report at given or seeded nome values

Every JSON payload carries ``"schema": 1``; polynomials are emitted
low-degree-first with coefficients in canonical string form, so output is
byte-identical for a fixed command line and seed.  Exit status is 0 exactly
when every requested verification passed, 1 when some check failed, and 2
for usage errors (the error object then carries a machine-readable code).

Symbolic work grows quickly with the coupling sum, so requests above a cap
are refused up front; set HEUN_WORK_LIMIT to raise (or lower) the cap.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from heunfg.coeff import DegeneratePointError, numeric_from_nome, scalar_str
from heunfg.darboux import (
    AlphaTuple,
    InvalidAlphaError,
    canonical_couplings,
    darboux_operator,
    intertwine_residual,
)
from heunfg.efield import MixedParityError
from heunfg.epoly import EPoly
from heunfg.numerics import distinctness_report, sample_nomes
from heunfg.partners import Witness, family, verify_member
from heunfg.quasi import (
    MixedCouplingError,
    ParamTuple,
    genus,
    invariant_space_tuples,
    preserved_basis,
    preserved_dimension,
    selected_char_poly,
)
from heunfg.spectral import spectral_data, verify_finite_gap

SCHEMA = 1
DEFAULT_SUM_LIMIT = Fraction(12)
DEFAULT_MAX_GENUS_SQUARE = 2
DEFAULT_SAMPLE_COUNT = 3


class WorkLimitError(RuntimeError):
    """Raised when a request exceeds the configured symbolic work cap."""


@dataclass(frozen=True)
class RunConfig:
    """One resolved invocation; construction does not start any work."""

    command: str
    couplings: ParamTuple
    alpha: AlphaTuple | None = None
    nome: float | None = None
    checks: str = "all"
    max_genus: int = DEFAULT_MAX_GENUS_SQUARE
    fmt: str = "json"
    seed: int = 0
    sum_limit: Fraction = DEFAULT_SUM_LIMIT


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------


def _tuple_strings(values) -> list[str]:
    return [str(Fraction(v)) for v in values]


def _poly_strings(poly: EPoly) -> list[str]:
    """Coefficients by ascending power, in canonical scalar form."""
    if not poly:
        return ["0"]
    return [scalar_str(poly[k]) for k in range(poly.degree + 1)]


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _finite_or_none(x: float) -> float | None:
    return x if math.isfinite(x) else None


def _witness_json(witness: Witness) -> dict:
    if witness.kind == "darboux":
        return {"kind": "darboux", "alpha": _tuple_strings(witness.alpha)}
    if witness.kind == "shift":
        return {"kind": "shift", "shift": witness.shift}
    return {"kind": "identity"}


def _require_within_limit(l: ParamTuple, limit: Fraction) -> None:
    total = sum(Fraction(v) for v in l)
    if total > limit:
        raise WorkLimitError(
            f"coupling sum {total} exceeds the work limit {limit}; "
            "set HEUN_WORK_LIMIT to override"
        )


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _run_spaces(config: RunConfig) -> tuple[int, dict]:
    l = config.couplings
    _require_within_limit(l, config.sum_limit)
    records = []
    for alpha in invariant_space_tuples(l):
        dim = preserved_dimension(alpha)
        parity = None
        if dim:
            try:
                parity = list(preserved_basis(alpha)[0].parity())
            except MixedParityError:
                parity = None  # quarter-period twists carry no +-1 pair
        records.append(
            {
                "alpha": _tuple_strings(alpha),
                "dim": dim,
                "parity": parity,
                "charpoly": _poly_strings(selected_char_poly(alpha)),
            }
        )
    payload = {
        "schema": SCHEMA,
        "l": _tuple_strings(l),
        "parity_class": l.parity,
    }
    if l.parity == "integer":
        payload["genus"] = genus(l)
    payload["spaces"] = records
    if not records:
        payload["note"] = "no invariant spaces: shifted couplings have odd sum"
    return 0, payload


def _run_spectral(config: RunConfig) -> tuple[int, dict]:
    l = config.couplings
    _require_within_limit(l, config.sum_limit)
    data = spectral_data(l)
    if config.checks == "fast":
        gate_commutator, gate_square = -1, -1
    else:
        gate_commutator = max(3, config.max_genus)
        gate_square = config.max_genus
    report = verify_finite_gap(l, gate_commutator, gate_square, data=data)
    xi = data.xi
    payload = {
        "schema": SCHEMA,
        "l": _tuple_strings(l),
        "g": data.genus,
        "P": _poly_strings(data.char_poly),
        "Q": _poly_strings(data.curve),
        "Xi": {
            "c0": _poly_strings(xi.c0),
            "b": {
                str(i): [_poly_strings(p) for p in site]
                for i, site in enumerate(xi.site_coeffs)
            },
        },
        "A": data.direct.text(),
        "checks": {
            "commute": report.commutes,
            "matches_direct": report.composed_matches_direct,
            "annihilates": report.annihilates_invariant_spaces,
            "kernel_dimension": report.kernel_dimension,
            "spectral_match": report.spectral_match,
            "square": report.square_is_curve,
            "recursion": report.recursion_holds,
        },
    }
    return (0 if report.passed else 1), payload


def _run_partners(config: RunConfig) -> tuple[int, dict]:
    l = config.couplings
    _require_within_limit(l, config.sum_limit)
    fam = family(l)
    members = []
    all_verified = True
    for member, witness in fam.members:
        verified = verify_member(fam.source, member, witness)
        all_verified = all_verified and verified
        members.append(
            {
                "l": _tuple_strings(member),
                "witness": _witness_json(witness),
                "verified": verified,
            }
        )
    payload = {
        "schema": SCHEMA,
        "l": _tuple_strings(l),
        "self_dual": fam.self_dual,
        "members": members,
    }
    if fam.note is not None:
        payload["note"] = fam.note
    return (0 if all_verified else 1), payload


def _run_darboux(config: RunConfig) -> tuple[int, dict]:
    l = config.couplings
    alpha = config.alpha
    _require_within_limit(l, config.sum_limit)
    if alpha.d > config.sum_limit:
        raise WorkLimitError(
            f"operator order {alpha.d + 1} exceeds the work limit "
            f"{config.sum_limit}; set HEUN_WORK_LIMIT to override"
        )
    operator = darboux_operator(alpha)
    residual_zero = intertwine_residual(l, alpha).is_zero
    payload = {
        "schema": SCHEMA,
        "l": _tuple_strings(l),
        "alpha": _tuple_strings(alpha),
        "order": alpha.d + 1,
        "operator": operator.text(),
        "target": _tuple_strings(canonical_couplings(a + alpha.d for a in alpha)),
        "admissible": alpha.is_admissible_for(l),
        "residual_zero": residual_zero,
    }
    return (0 if residual_zero else 1), payload


def _run_generic(config: RunConfig) -> tuple[int, dict]:
    l = config.couplings
    _require_within_limit(l, config.sum_limit)
    if config.nome is not None:
        nomes = [config.nome]
    else:
        nomes = sample_nomes(DEFAULT_SAMPLE_COUNT, config.seed)
    points = []
    all_distinct = True
    for p in nomes:
        if not 0.0 <= p < 1.0:
            raise ValueError(f"nome {p} lies outside [0, 1)")
        report = distinctness_report(l, numeric_from_nome(p))
        all_distinct = all_distinct and report.distinct
        points.append(
            {
                "p": p,
                "distinct": report.distinct,
                "spread": report.spread,
                "threshold": report.threshold,
                "min_separation": _finite_or_none(report.min_separation),
                "roots": [_complex_pair(z) for z in report.roots],
                "collisions": [
                    [_complex_pair(a), _complex_pair(b)]
                    for a, b in report.collisions
                ],
                "spaces": [
                    {
                        "alpha": _tuple_strings(space.alpha),
                        "roots": [_complex_pair(z) for z in space.roots],
                        "min_separation": _finite_or_none(space.min_separation),
                    }
                    for space in report.spaces
                ],
            }
        )
    payload = {
        "schema": SCHEMA,
        "l": _tuple_strings(l),
        "points": points,
        "distinct": all_distinct,
    }
    return (0 if all_distinct else 1), payload


_HANDLERS = {
    "spaces": _run_spaces,
    "spectral": _run_spectral,
    "partners": _run_partners,
    "darboux": _run_darboux,
    "generic": _run_generic,
}


def run(config: RunConfig) -> tuple[int, dict]:
    """Dispatch one invocation; returns (exit status, report payload)."""
    if config.max_genus < 0:
        raise ValueError("--max-g must be nonnegative")
    if config.sum_limit <= 0:
        raise ValueError("work limit must be positive")
    return _HANDLERS[config.command](config)


# ---------------------------------------------------------------------------
# text rendering
# ---------------------------------------------------------------------------


def _flag(value) -> str:
    if value is None:
        return "skipped"
    return "ok" if value else "FAIL"


def _text_spaces(payload: dict) -> list[str]:
    lines = [f"l = ({', '.join(payload['l'])})  [{payload['parity_class']}]"]
    if "genus" in payload:
        lines[0] += f"  genus {payload['genus']}"
    for rec in payload["spaces"]:
        parity = rec["parity"]
        parity_text = (
            f"({parity[0]:+d}, {parity[1]:+d})" if parity is not None else "n/a"
        )
        lines.append(
            f"alpha = ({', '.join(rec['alpha'])})  dim {rec['dim']}  "
            f"parity {parity_text}  charpoly [{', '.join(rec['charpoly'])}]"
        )
    if "note" in payload:
        lines.append(payload["note"])
    return lines


def _text_spectral(payload: dict) -> list[str]:
    lines = [
        f"l = ({', '.join(payload['l'])})  genus {payload['g']}",
        f"P = [{', '.join(payload['P'])}]",
        f"Q = [{', '.join(payload['Q'])}]",
        f"Xi.c0 = [{', '.join(payload['Xi']['c0'])}]",
    ]
    for site, blocks in payload["Xi"]["b"].items():
        for j, block in enumerate(blocks):
            lines.append(f"Xi.b[{site}][{j}] = [{', '.join(block)}]")
    lines.append(f"A = {payload['A']}")
    checks = payload["checks"]
    lines.append(
        "checks: "
        + "  ".join(
            [
                f"commute {_flag(checks['commute'])}",
                f"matches_direct {_flag(checks['matches_direct'])}",
                f"annihilates {_flag(checks['annihilates'])}",
                f"kernel {checks['kernel_dimension']}",
                f"spectral_match {_flag(checks['spectral_match'])}",
                f"square {_flag(checks['square'])}",
                f"recursion {_flag(checks['recursion'])}",
            ]
        )
    )
    return lines


def _text_partners(payload: dict) -> list[str]:
    self_dual = "yes" if payload["self_dual"] else "no"
    lines = [f"source = ({', '.join(payload['l'])})  self-dual: {self_dual}"]
    for member in payload["members"]:
        witness = member["witness"]
        if witness["kind"] == "darboux":
            via = f"darboux alpha=({', '.join(witness['alpha'])})"
        elif witness["kind"] == "shift":
            via = f"shift by half-period {witness['shift']}"
        else:
            via = "identity"
        lines.append(
            f"({', '.join(member['l'])})  via {via}  {_flag(member['verified'])}"
        )
    if "note" in payload:
        lines.append(payload["note"])
    return lines


def _text_darboux(payload: dict) -> list[str]:
    return [
        f"l = ({', '.join(payload['l'])})  alpha = ({', '.join(payload['alpha'])})"
        f"  order {payload['order']}",
        f"L = {payload['operator']}",
        f"target l = ({', '.join(payload['target'])})",
        f"admissible: {'yes' if payload['admissible'] else 'no'}",
        f"residual: {'zero' if payload['residual_zero'] else 'NONZERO'}",
    ]


def _text_generic(payload: dict) -> list[str]:
    lines = [f"l = ({', '.join(payload['l'])})"]
    for point in payload["points"]:
        lines.append(
            f"p = {point['p']!r}  roots {len(point['roots'])}  "
            f"min separation {point['min_separation']!r}  "
            f"threshold {point['threshold']!r}  "
            f"{'distinct' if point['distinct'] else 'COLLISION'}"
        )
    lines.append(f"overall: {'distinct' if payload['distinct'] else 'COLLISION'}")
    return lines


_TEXT_RENDERERS = {
    "spaces": _text_spaces,
    "spectral": _text_spectral,
    "partners": _text_partners,
    "darboux": _text_darboux,
    "generic": _text_generic,
}


def _emit(command: str, payload: dict, fmt: str) -> None:
    if fmt == "json" or "error" in payload:
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(_TEXT_RENDERERS[command](payload)))


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _parse_rationals(text: str, flag: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(part.strip()) for part in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"{flag} expects comma-separated rationals, got {text!r}")


def _couplings_from_args(args: argparse.Namespace) -> ParamTuple:
    if args.n is not None:
        counts = _parse_rationals(args.n, "--n")
        if any(v.denominator != 1 or v < 0 for v in counts):
            raise ValueError(f"--n expects nonnegative integers, got {args.n!r}")
        return ParamTuple(tuple(v - Fraction(1, 2) for v in counts))
    return ParamTuple(_parse_rationals(args.l, "--l"))


def _work_limit_from_env() -> Fraction:
    raw = os.environ.get("HEUN_WORK_LIMIT")
    if raw is None:
        return DEFAULT_SUM_LIMIT
    try:
        return Fraction(raw.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"HEUN_WORK_LIMIT must be a rational, got {raw!r}")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    alpha = None
    if getattr(args, "alpha", None) is not None:
        alpha = AlphaTuple(_parse_rationals(args.alpha, "--alpha"))
    return RunConfig(
        command=args.command,
        couplings=_couplings_from_args(args),
        alpha=alpha,
        nome=getattr(args, "p", None),
        checks=getattr(args, "checks", "all"),
        max_genus=getattr(args, "max_g", DEFAULT_MAX_GENUS_SQUARE),
        fmt=args.format,
        seed=getattr(args, "seed", 0),
        sum_limit=_work_limit_from_env(),
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heunfg",
        description="Finite-gap data for coupled elliptic potentials.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_common(sub: argparse.ArgumentParser) -> None:
        group = sub.add_mutually_exclusive_group(required=True)
        group.add_argument(
            "--l", help="coupling tuple l0,l1,l2,l3 (integers or half-integers)"
        )
        group.add_argument(
            "--n", help="shifted couplings n0,n1,n2,n3 with l_i = n_i - 1/2"
        )
        sub.add_argument(
            "--format", choices=("json", "text"), default="json",
            help="output format (default: json)",
        )

    add_common(subparsers.add_parser(
        "spaces", help="enumerate the finite invariant spaces"))

    spectral = subparsers.add_parser(
        "spectral", help="spectral polynomial, curve, and identity checks")
    add_common(spectral)
    spectral.add_argument(
        "--checks", choices=("all", "fast"), default="all",
        help="fast skips the commutator and operator-square identities",
    )
    spectral.add_argument(
        "--max-g", type=int, default=DEFAULT_MAX_GENUS_SQUARE, dest="max_g",
        help="largest genus for the operator-square check (default: 2)",
    )

    add_common(subparsers.add_parser(
        "partners", help="family sharing the spectral polynomial"))

    darboux = subparsers.add_parser(
        "darboux", help="one intertwining operator and its residual")
    add_common(darboux)
    darboux.add_argument(
        "--alpha", required=True, help="weight tuple a0,a1,a2,a3")

    generic = subparsers.add_parser(
        "generic", help="numeric root distinctness at sampled nomes")
    add_common(generic)
    generic.add_argument(
        "--p", type=float, default=None,
        help="nome in [0, 1); omitted: three seeded samples in (0.02, 0.2)",
    )
    generic.add_argument(
        "--seed", type=int, default=0, help="seed for nome sampling (default: 0)")

    return parser


_TUPLE_FLAGS = ("--l", "--n", "--alpha")


def _join_tuple_flags(argv: list[str]) -> list[str]:
    """Fuse `--l -2,1,1,0` into `--l=-2,1,1,0` so negatives parse."""
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in _TUPLE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = _build_parser().parse_args(_join_tuple_flags(list(argv)))
    fmt = getattr(args, "format", "json")
    try:
        config = _config_from_args(args)
        status, payload = run(config)
    except WorkLimitError as exc:
        code = "work-limit"
        message = str(exc)
    except (MixedCouplingError, MixedParityError) as exc:
        code = "mixed-parity"
        message = str(exc)
    except DegeneratePointError as exc:
        code = "degenerate-point"
        message = str(exc)
    except (InvalidAlphaError, ValueError) as exc:
        code = "invalid-tuple"
        message = str(exc)
    else:
        _emit(config.command, payload, config.fmt)
        return status
    _emit(args.command, {"schema": SCHEMA, "error": {"code": code, "message": message}}, fmt)
    return 2


if __name__ == "__main__":
    sys.exit(main())
