"""Command line surface: JSON in, JSON out.

Input documents look like::

    {"frame": ["x", "y", "z"],
     "masses": {"x": 0.2, "y": 0.1, "x,y": 0.4, "y,z": 0.3}}

Subset keys are comma-joined element labels; they are re-emitted normalized
to frame order.  All real numbers in the output are rounded to 12 significant
digits, which keeps repeated runs byte-identical.

Exit codes: 0 ok, 1 verification found a gap, 2 unreadable or invalid input,
3 invalid flag combination, 4 unknown focus element, 5 frame too large to
verify.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Any, Mapping

from .core import (
    EvidenceError,
    Frame,
    MassFunction,
    PseudoMassFunction,
    belief_from_mass,
    contour,
    core_of,
    is_consistent,
    ultrafilter,
)
from .consistent_mass import (
    ApproxBox,
    GlobalResult,
    global_l1_mass,
    global_l2_mass,
    global_linf_mass,
    partial_l1_mass,
    partial_l2_mass,
    partial_linf_mass,
)
from .consistent_belief import (
    FocusedTransform,
    GammaBox,
    focused_transform,
    gamma_to_mass,
    global_l1_belief,
    global_l2_belief,
    global_linf_belief,
    partial_linf_belief,
)
from .geometry import SpaceKind
from .oracle import (
    MAX_ORACLE_FRAME,
    OracleConfig,
    SUPPORTED_PAIRS,
    brute_force_partial,
    globals_agree,
    library_global,
)

EXIT_OK = 0
EXIT_GAP = 1
EXIT_PARSE = 2
EXIT_FLAGS = 3
EXIT_FOCUS = 4
EXIT_FRAME = 5

INGEST_SUM_TOL = 1e-6
MAX_VERTEX_COORDS = 12


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _comparison_tolerance() -> float:
    raw = os.environ.get("CSBF_TOLERANCE")
    if raw is None:
        return 1e-9
    try:
        value = float(raw)
    except ValueError:
        raise CliError(f"CSBF_TOLERANCE is not a number: {raw!r}", EXIT_PARSE) from None
    if value <= 0:
        raise CliError("CSBF_TOLERANCE must be positive", EXIT_PARSE)
    return value


def load_input(path: str) -> tuple[Frame, MassFunction, dict]:
    """Parse an input document, renormalizing near-unit mass sums with a warning."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read input document: {exc}", EXIT_PARSE) from None
    if not isinstance(raw, dict) or "frame" not in raw or "masses" not in raw:
        raise CliError("input document needs 'frame' and 'masses'", EXIT_PARSE)
    labels = raw["frame"]
    if not isinstance(labels, list) or not all(isinstance(lbl, str) for lbl in labels):
        raise CliError("'frame' must be a list of strings", EXIT_PARSE)
    if not isinstance(raw["masses"], dict):
        raise CliError("'masses' must be an object", EXIT_PARSE)
    try:
        frame = Frame(tuple(labels))
        masses: dict[int, float] = {}
        for key, value in raw["masses"].items():
            if not isinstance(value, (int, float)):
                raise EvidenceError(f"mass of {key!r} is not a number")
            mask = frame.parse_subset(key)
            if mask == 0:
                raise EvidenceError("the empty set may not carry mass")
            if mask in masses:
                raise EvidenceError(f"subset {key!r} appears twice")
            masses[mask] = float(value)
    except EvidenceError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    total = sum(masses.values())
    if abs(total - 1.0) > INGEST_SUM_TOL:
        raise CliError(f"mass values must sum to 1 within {INGEST_SUM_TOL}, got {total!r}", EXIT_PARSE)
    if total > 0 and total != 1.0:
        masses = {mask: v / total for mask, v in masses.items()}
        if abs(total - 1.0) > 1e-12:
            print(
                f"warning: mass values summed to {total!r}; renormalized",
                file=sys.stderr,
            )
    try:
        m = MassFunction(frame, masses)
    except EvidenceError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    echo = {
        "frame": list(frame.elements),
        "masses": _mass_block(m, sorted(m.masses)),
    }
    return frame, m, echo


# ---------------------------------------------------------------------------
# Output assembly.
# ---------------------------------------------------------------------------


def _round12(value: Any) -> Any:
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _round12(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round12(v) for v in value]
    return value


def _emit(doc: dict, out_path: str | None) -> None:
    text = json.dumps(_round12(doc), indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _mass_block(m: PseudoMassFunction, masks) -> dict[str, float]:
    return {m.frame.format_subset(mask): m.value(mask) for mask in masks}


def _point_payload(m: PseudoMassFunction, focus: str, tol: float) -> dict:
    masks = ultrafilter(m.frame, focus)
    return {
        "masses": _mass_block(m, masks),
        "admissible": m.is_admissible(tol),
    }


def _interval_block(frame: Frame, lower: Mapping[int, float], upper: Mapping[int, float]) -> dict:
    return {frame.format_subset(mask): [lower[mask], upper[mask]] for mask in sorted(lower)}


def _payload_mass_box(box: ApproxBox, vertices: bool, tol: float) -> dict:
    lo, hi, clipped = box.admissible_intervals()
    payload = {
        "space": SpaceKind.MASS_N2.value,
        "distance": box.distance,
        "intervals": _interval_block(box.frame, box.lower, box.upper),
        "admissible_intervals": _interval_block(box.frame, lo, hi),
        "admissible_clipped": clipped,
        "barycenter": _point_payload(box.barycenter, box.focus, tol),
    }
    if vertices:
        payload["vertices"] = [_point_payload(corner, box.focus, tol) for corner in box.corners()]
    return payload


def _payload_gamma_box(box: GammaBox, vertices: bool, tol: float) -> dict:
    barycenter = gamma_to_mass(box, box.midpoint())
    payload = {
        "space": SpaceKind.BELIEF.value,
        "distance": box.distance,
        "gamma_intervals": _interval_block(box.frame, box.lower, box.upper),
        "barycenter": _point_payload(barycenter, box.focus, tol),
    }
    if vertices:
        payload["vertices"] = [
            _point_payload(gamma_to_mass(box, corner), box.focus, tol)
            for corner in box.corners()
        ]
    return payload


def _payload_focused(ft: FocusedTransform, norm: str, tol: float) -> dict:
    payload = _point_payload(ft.result, ft.focus, tol)
    payload["space"] = SpaceKind.BELIEF.value
    payload["distance"] = ft.distance_l1 if norm == "l1" else ft.distance_l2
    payload["distance_l1"] = ft.distance_l1
    payload["distance_l2"] = ft.distance_l2
    return payload


def _payload_pointwise(pa, tol: float) -> dict:
    payload = _point_payload(pa.result, pa.focus, tol)
    payload["space"] = pa.space.kind.value
    payload["distance"] = pa.distance
    return payload


def cmd_approximate(args: argparse.Namespace) -> int:
    tol = _comparison_tolerance()
    frame, m, echo = load_input(args.input)

    norm, space, rep = args.norm, args.space, args.rep
    if rep is not None and not (norm == "l2" and space == "mass"):
        raise CliError("--rep applies only to --norm l2 --space mass", EXIT_FLAGS)
    if norm == "l2" and space == "mass" and rep is None:
        raise CliError("--norm l2 --space mass needs an explicit --rep {n1,n2}", EXIT_FLAGS)
    if args.vertices and norm != "linf":
        raise CliError("--vertices applies only to --norm linf", EXIT_FLAGS)
    if args.focus is None and not args.global_:
        raise CliError("pick --focus <element> or --global", EXIT_FLAGS)
    if args.focus is not None and args.global_:
        raise CliError("--focus and --global are mutually exclusive", EXIT_FLAGS)
    if args.focus is not None and args.focus not in frame.elements:
        raise CliError(f"unknown focus element {args.focus!r}", EXIT_FOCUS)
    if args.vertices:
        box_coords = (frame.n_subsets // 2) - 1
        if box_coords > MAX_VERTEX_COORDS:
            raise CliError("frame too large for vertex enumeration", EXIT_FLAGS)

    kind = SpaceKind.MASS_N1 if rep == "n1" else SpaceKind.MASS_N2

    def partial_payload(x: str) -> dict:
        if space == "mass":
            if norm == "l1":
                return _payload_pointwise(partial_l1_mass(m, x), tol)
            if norm == "l2":
                return _payload_pointwise(partial_l2_mass(m, x, kind), tol)
            return _payload_mass_box(partial_linf_mass(m, x), args.vertices, tol)
        if norm in ("l1", "l2"):
            return _payload_focused(focused_transform(m, x), norm, tol)
        return _payload_gamma_box(partial_linf_belief(m, x), args.vertices, tol)

    def global_result() -> GlobalResult:
        if space == "mass":
            if norm == "l1":
                return global_l1_mass(m, tol)
            if norm == "l2":
                return global_l2_mass(m, kind, tol)
            return global_linf_mass(m, tol)
        if norm == "l1":
            return global_l1_belief(m, tol)
        if norm == "l2":
            return global_l2_belief(m, tol)
        return global_linf_belief(m, tol)

    doc = {
        "command": "approximate",
        "input": echo,
        "norm": norm,
        "space": space,
        "rep": rep,
    }
    if args.focus is not None:
        doc["focus"] = args.focus
        doc["result"] = partial_payload(args.focus)
    else:
        result = global_result()
        doc["focus"] = "global"
        doc["result"] = {
            "criterion": {lbl: result.criterion_values[lbl] for lbl in frame.elements},
            "optima": list(result.optima),
            "partials": {lbl: partial_payload(lbl) for lbl in result.optima},
        }
    _emit(doc, args.out)
    return EXIT_OK


def cmd_inspect(args: argparse.Namespace) -> int:
    frame, m, echo = load_input(args.input)
    view = belief_from_mass(m)
    masks = range(1, frame.n_subsets)
    doc = {
        "command": "inspect",
        "input": echo,
        "focal_elements": _mass_block(m, m.focal_elements()),
        "core": frame.format_subset(core_of(m)),
        "consistent": is_consistent(m),
        "belief": {frame.format_subset(a): view.belief_of(a) for a in masks},
        "plausibility": {frame.format_subset(a): view.plausibility_of(a) for a in masks},
        "contour": contour(m),
    }
    _emit(doc, args.out)
    return EXIT_OK


_KIND_LABEL = {
    SpaceKind.MASS_N1: "mass-n1",
    SpaceKind.MASS_N2: "mass-n2",
    SpaceKind.BELIEF: "belief",
}
_NORM_LABEL = {1: "l1", 2: "l2", math.inf: "linf"}


def cmd_verify(args: argparse.Namespace) -> int:
    tol = _comparison_tolerance()
    frame, m, echo = load_input(args.input)
    if frame.size > MAX_ORACLE_FRAME:
        raise CliError(
            f"verification needs a frame of at most {MAX_ORACLE_FRAME} elements", EXIT_FRAME
        )
    grid_step = args.grid_step if args.grid_step is not None else (0.02 if frame.size <= 3 else 0.1)
    try:
        cfg = OracleConfig(grid_step=grid_step, random_restarts=args.restarts, seed=args.seed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_FLAGS) from None

    reports = []
    checks = []
    all_ok = True
    for p, kind in SUPPORTED_PAIRS:
        by_focus = {}
        for x in frame.elements:
            try:
                rep = brute_force_partial(m, x, p, kind, cfg)
            except ValueError as exc:
                raise CliError(str(exc), EXIT_FLAGS) from None
            by_focus[x] = rep
            all_ok &= rep.converged
            reports.append(
                {
                    "norm": _NORM_LABEL[p],
                    "space": _KIND_LABEL[kind],
                    "focus": x,
                    "oracle_distance": rep.oracle_distance,
                    "closed_form_distance": rep.closed_form_distance,
                    "max_gap": rep.max_gap,
                    "converged": rep.converged,
                }
            )
        result = library_global(m, p, kind, tol)
        agree = globals_agree(result, by_focus, cfg)
        all_ok &= agree
        checks.append(
            {
                "norm": _NORM_LABEL[p],
                "space": _KIND_LABEL[kind],
                "library_optima": list(result.optima),
                "oracle_distances": {x: by_focus[x].oracle_distance for x in frame.elements},
                "agree": agree,
            }
        )
    doc = {
        "command": "verify",
        "input": echo,
        "config": {
            "grid_step": cfg.grid_step,
            "refinement_rounds": cfg.refinement_rounds,
            "random_restarts": cfg.random_restarts,
            "seed": cfg.seed,
            "tolerance": cfg.tolerance,
            "match_tolerance": cfg.match_tolerance,
        },
        "reports": reports,
        "global_checks": checks,
        "all_ok": all_ok,
    }
    _emit(doc, args.out)
    return EXIT_OK if all_ok else EXIT_GAP


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csbf",
        description="Consistent approximations of belief functions under Lp norms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_approx = sub.add_parser("approximate", help="partial or global consistent approximation")
    p_approx.add_argument("input", help="path to a JSON input document")
    p_approx.add_argument("--norm", choices=["l1", "l2", "linf"], required=True)
    p_approx.add_argument("--space", choices=["mass", "belief"], required=True)
    p_approx.add_argument("--rep", choices=["n1", "n2"], default=None,
                          help="mass embedding for --norm l2 --space mass")
    p_approx.add_argument("--focus", default=None, help="frame element to focus on")
    p_approx.add_argument("--global", dest="global_", action="store_true",
                          help="pick the globally optimal focus element(s)")
    p_approx.add_argument("--vertices", action="store_true",
                          help="list solution-box corners (linf only)")
    p_approx.add_argument("--out", default=None, help="write output here instead of stdout")
    p_approx.set_defaults(func=cmd_approximate)

    p_inspect = sub.add_parser("inspect", help="focal elements, core, belief and plausibility")
    p_inspect.add_argument("input")
    p_inspect.add_argument("--out", default=None)
    p_inspect.set_defaults(func=cmd_inspect)

    p_verify = sub.add_parser("verify", help="brute-force check of every closed form")
    p_verify.add_argument("input")
    p_verify.add_argument("--grid-step", type=float, default=None)
    p_verify.add_argument("--restarts", type=int, default=16)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except EvidenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
