"""Command-line front end.

Commands: spectrum | bound-states | scattering | isoperimetric | probe | d-sigma.
Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 invariant violation.  All numbers are written with 15 significant digits
and no time-dependent fields, so identical configurations produce
byte-identical output files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .assembly import boundary_matrix, circle_mode_eigenvalues
from .curves import circle_deviation, curve_from_json_dict, make_grid
from .errors import ConfigError, CurveError, InvariantError, NumericsError
from .resolvent import (correction_singular_values, fit_decay_slope,
                        layer_singular_values, make_box)
from .scattering import choose_reference_energy, scattering_block
from .spectral import count_bound_states, eigen, find_bound_states, isoperimetric_compare

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3
EXIT_INVARIANT = 4


def _fmt(x) -> str:
    return format(float(x), ".15g")


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise ConfigError(f"bad numeric list {text!r}") from exc


def _load_curve(path: str, reparam_tol: float = 1e-8):
    if not os.path.exists(path):
        raise ConfigError(f"curve file not found: {path}")
    try:
        with open(path) as fh:
            spec = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"curve file is not valid JSON: {exc}") from exc
    return curve_from_json_dict(spec, reparam_tol=reparam_tol)


def _write_rows(path: str, meta: str, header: list[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# {meta}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, (int, float, np.floating))
                              else str(v) for v in row) + "\n")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _tolerances(args) -> dict:
    out = {}
    for item in args.tol_override or []:
        if "=" not in item:
            raise ConfigError(f"bad tolerance override {item!r}, expected KEY=VAL")
        key, val = item.split("=", 1)
        try:
            out[key] = float(val)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance value in {item!r}") from exc
    allowed = {"root_tol", "rank_tol", "reparam_tol"}
    unknown = set(out) - allowed
    if unknown:
        raise ConfigError(f"unknown tolerance keys: {sorted(unknown)}")
    return out


def cmd_spectrum(args) -> int:
    tols = _tolerances(args)
    curve = _load_curve(args.curve, tols.get("reparam_tol", 1e-8))
    grid = make_grid(curve, args.n)
    lams = _float_list(args.lam) if args.lam else [0.0]
    if any(lam > 0 for lam in lams):
        raise ConfigError("spectrum energies must satisfy lam <= 0")
    summary = {}
    for i, lam in enumerate(lams):
        spec = eigen(boundary_matrix(curve, lam, grid), vectors=False)
        trusted = spec.trusted_count
        rows = []
        closed = None
        if curve.is_circle and lam == 0.0:
            nu0, pairs = circle_mode_eigenvalues(curve.radius, trusted // 2 + 1)
            closed = [nu0] + [pairs[(k - 2) // 2] for k in range(2, trusted + 1)]
        for k in range(1, trusted + 1):
            row = [k, spec.values[k - 1]]
            if closed is not None:
                row.append(closed[k - 1])
            rows.append(row)
        header = ["k", "nu"] + (["nu_closed_form"] if closed is not None else [])
        path = os.path.join(args.out, f"spectrum_{i}.csv")
        _write_rows(path, f"spectrum lam={_fmt(lam)} n={grid.n}", header, rows)
        entry = {"lam": lam, "file": os.path.basename(path)}
        if closed is not None:
            entry["max_closed_form_deviation"] = float(
                np.max(np.abs(spec.values[:trusted] - np.asarray(closed))))
        summary[str(i)] = entry
    _write_json(os.path.join(args.out, "spectrum_summary.json"), summary)
    return EXIT_OK


def cmd_bound_states(args) -> int:
    tols = _tolerances(args)
    curve = _load_curve(args.curve, tols.get("reparam_tol", 1e-8))
    grid = make_grid(curve, args.n)
    if not args.alpha:
        raise ConfigError("bound-states requires --alpha")
    alphas = _float_list(args.alpha)
    state_rows, count_rows = [], []
    for alpha in alphas:
        report = count_bound_states(curve, grid, alpha)
        states = find_bound_states(curve, grid, alpha,
                                   max_states=args.max_states,
                                   root_tol=tols.get("root_tol", 1e-10))
        if args.max_states is None and len(states) != report.count:
            raise InvariantError(
                f"root count {len(states)} disagrees with the eigenvalue count "
                f"{report.count} at alpha={alpha:g}")
        for st in states:
            state_rows.append([alpha, st.index, st.energy, st.residual])
        count_rows.append([alpha, report.count, report.deviation,
                           report.r_index, report.l_index, report.lower,
                           report.upper,
                           report.asym_lower if report.asym_lower is not None else "",
                           report.asym_upper if report.asym_upper is not None else "",
                           int(report.endpoint_flag)])
    _write_rows(os.path.join(args.out, "bound_states.csv"),
                f"bound states n={grid.n}",
                ["alpha", "k", "energy", "residual"], state_rows)
    _write_rows(os.path.join(args.out, "counts.csv"),
                f"counts n={grid.n}",
                ["alpha", "count", "deviation", "r", "l", "lower", "upper",
                 "asym_lower", "asym_upper", "endpoint_flag"], count_rows)
    return EXIT_OK


def cmd_scattering(args) -> int:
    tols = _tolerances(args)
    curve = _load_curve(args.curve, tols.get("reparam_tol", 1e-8))
    grid = make_grid(curve, args.n)
    if not args.alpha:
        raise ConfigError("scattering requires --alpha")
    alpha = _float_list(args.alpha)[0]
    lams = _float_list(args.lam) if args.lam else [1.0]
    if any(lam < 0 for lam in lams):
        raise ConfigError("scattering energies must satisfy lam >= 0")
    candidates = _float_list(args.eta) if args.eta else [-1.0, -4.0, -16.0]
    eta = choose_reference_energy(curve, grid, alpha, candidates)
    rows = []
    for i, lam in enumerate(lams):
        block = scattering_block(curve, grid, lam, alpha, eta,
                                 rank_tol=tols.get("rank_tol", 1e-10))
        rows.append([lam, eta, block.retained_dim, block.unitarity_defect,
                     block.min_channel_eigenvalue, block.condition])
        if args.dump_smatrix:
            entries = [[r + 1, c + 1, block.matrix[r, c].real, block.matrix[r, c].imag]
                       for r in range(block.retained_dim)
                       for c in range(block.retained_dim)]
            _write_rows(os.path.join(args.out, f"smatrix_{i}.csv"),
                        f"smatrix lam={_fmt(lam)} eta={_fmt(eta)} alpha={_fmt(alpha)}",
                        ["row", "col", "re", "im"], entries)
        if block.retained_dim and block.unitarity_defect > 1e-6:
            raise InvariantError(
                f"unitarity defect {block.unitarity_defect:.2e} at lam={lam:g}")
    _write_rows(os.path.join(args.out, "scattering.csv"),
                f"scattering alpha={_fmt(alpha)} n={grid.n}",
                ["lam", "eta", "retained_dim", "unitarity_defect",
                 "min_channel_eigenvalue", "condition"], rows)
    return EXIT_OK


def cmd_isoperimetric(args) -> int:
    tols = _tolerances(args)
    curve = _load_curve(args.curve, tols.get("reparam_tol", 1e-8))
    grid = make_grid(curve, args.n)
    if not args.alpha:
        raise ConfigError("isoperimetric requires --alpha")
    alpha = _float_list(args.alpha)[0]
    lam_curve, lam_circle, gap = isoperimetric_compare(curve, grid, alpha)
    _write_rows(os.path.join(args.out, "isoperimetric.csv"),
                f"isoperimetric alpha={_fmt(alpha)} n={grid.n}",
                ["alpha", "energy_curve", "energy_circle", "gap"],
                [[alpha, lam_curve, lam_circle, gap]])
    if gap <= 0:
        raise InvariantError(f"principal-eigenvalue gap {gap:.3e} not positive")
    return EXIT_OK


def cmd_probe(args) -> int:
    tols = _tolerances(args)
    curve = _load_curve(args.curve, tols.get("reparam_tol", 1e-8))
    grid = make_grid(curve, args.n)
    lam = _float_list(args.lam)[0] if args.lam else -1.0
    alpha = _float_list(args.alpha)[0] if args.alpha else -0.5
    bounds = None
    if args.box_lo is not None and args.box_hi is not None:
        bounds = (args.box_lo, args.box_hi)
    box = make_box(curve, grid, n=args.box_n, bounds=bounds, lam=lam)
    s_corr = correction_singular_values(curve, grid, box, lam, alpha)
    s_layer = layer_singular_values(curve, grid, box, lam)
    _write_rows(os.path.join(args.out, "probe_correction.csv"),
                f"correction singular values lam={_fmt(lam)} alpha={_fmt(alpha)}",
                ["k", "s"], [[k + 1, s_corr[k]] for k in range(len(s_corr))])
    _write_rows(os.path.join(args.out, "probe_layer.csv"),
                f"layer singular values lam={_fmt(lam)}",
                ["k", "s"], [[k + 1, s_layer[k]] for k in range(len(s_layer))])
    summary = {
        "lam": lam,
        "alpha": alpha,
        "box": {"lo": box.lo, "hi": box.hi, "n": box.n,
                "exclusion_radius": box.exclusion_radius,
                "points": int(len(box.points)), "excluded": box.n_excluded},
        "fit_window": [8, 48],
        "slope_correction": fit_decay_slope(s_corr),
        "slope_layer": fit_decay_slope(s_layer),
        "note": ("box/tube compression of the ambient operator; measured decay "
                 "certifies upper-envelope behavior only"),
    }
    _write_json(os.path.join(args.out, "probe_summary.json"), summary)
    return EXIT_OK


def cmd_d_sigma(args) -> int:
    tols = _tolerances(args)
    curve = _load_curve(args.curve, tols.get("reparam_tol", 1e-8))
    grid = make_grid(curve, args.n)
    value = circle_deviation(curve, grid)
    _write_json(os.path.join(args.out, "d_sigma.json"),
                {"n": grid.n, "value": value})
    sys.stdout.write(_fmt(value) + "\n")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvedelta",
        description="Spectra, bound states and scattering of a delta-interaction "
                    "supported on a closed curve in R^3.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--curve", required=True, help="curve JSON file")
        p.add_argument("--n", type=int, default=256, help="grid size (even)")
        p.add_argument("--alpha", help="coupling value(s), comma separated")
        p.add_argument("--lambda", dest="lam", help="energy value(s), comma separated")
        p.add_argument("--eta", help="reference energy candidates, comma separated")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--tol-override", action="append",
                       help="KEY=VAL tolerance override (repeatable)")

    p = sub.add_parser("spectrum", help="eigenvalue tables per energy")
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bound-states", help="bound states and counting per alpha")
    common(p)
    p.add_argument("--max-states", type=int, default=None)
    p.set_defaults(func=cmd_bound_states)

    p = sub.add_parser("scattering", help="scattering block per energy")
    common(p)
    p.add_argument("--dump-smatrix", action="store_true")
    p.set_defaults(func=cmd_scattering)

    p = sub.add_parser("isoperimetric", help="principal eigenvalue vs the circle")
    common(p)
    p.set_defaults(func=cmd_isoperimetric)

    p = sub.add_parser("probe", help="singular-value decay of the resolvent correction")
    common(p)
    p.add_argument("--box-lo", type=float, default=None)
    p.add_argument("--box-hi", type=float, default=None)
    p.add_argument("--box-n", type=int, default=24)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("d-sigma", help="kernel deviation from the equal-length circle")
    common(p)
    p.set_defaults(func=cmd_d_sigma)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        os.makedirs(args.out, exist_ok=True)
        return args.func(args)
    except (ConfigError, CurveError) as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG
    except NumericsError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICS
    except InvariantError as exc:
        sys.stderr.write(f"invariant violation: {exc}\n")
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
