"""
Command line front end.

    speclab <simulate|spectrum|birth|sweep> --config <path> [--out <dir>]

Exit codes: 0 success, 1 config or usage error, 2 a birth initial state was
requested but that birth space is not one-dimensional, 3 chi_1 chi_2 = 0
somewhere, 4 a sweep point disagrees with its predicted verdict.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .birth import BirthReport, Verdict, birth_report, classify, construct_eigenvector, side_ratios
from .config import NUMERIC_FIELDS, ConfigError, ExperimentConfig, load_config
from .discriminant import spectral_mapping_check
from .errors import BirthSpaceTrivial, BoundaryCase, HypothesisViolation, WindowTooSmall
from .lattice import State
from .models import predict_theorem_6_1, predict_theorem_6_2
from .walk import step

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_TRIVIAL_BIRTH = 2
EXIT_HYPOTHESIS = 3
EXIT_DISAGREE = 4


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def fmt(v) -> str:
    """Deterministic text for a CSV cell; floats use the shortest round-trip form."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n", encoding="utf-8")


def _sign_name(s: int) -> str:
    return "plus" if s > 0 else "minus"


def _initial_state(cfg: ExperimentConfig, shift, coins) -> tuple[State, int]:
    init = cfg.initial
    if init is None:
        return State.delta(0, [1.0, 0.0]), 0
    if isinstance(init, str):
        s = 1 if init.endswith("+") else -1
        try:
            vec = construct_eigenvector(
                shift,
                coins,
                s,
                (-cfg.window, cfg.window),
                tail_tol=cfg.tol("tail_mass"),
                margin=cfg.tol("classify_margin"),
            )
        except BirthSpaceTrivial as exc:
            raise CommandError(str(exc), EXIT_TRIVIAL_BIRTH) from None
        return vec, 0
    spinor = [complex(*v) if isinstance(v, list) else complex(v) for v in init["spinor"]]
    return State.delta(init["site"], spinor).normalized(), int(init["site"])


def cmd_simulate(cfg: ExperimentConfig, out: Path) -> int:
    shift, coins = cfg.build()
    psi, start = _initial_state(cfg, shift, coins)
    norm0 = psi.norm() ** 2
    rows = []
    returns = []
    drift = 0.0
    for t in range(cfg.time + 1):
        if t > 0:
            psi = step(shift, coins, psi).compact()
        probs = psi.site_norms2()
        rows.extend((t, int(x), float(w)) for x, w in zip(psi.sites, probs))
        returns.append(float(np.sum(np.abs(psi.at(start)) ** 2)))
        drift = max(drift, abs(float(probs.sum()) - norm0))
    write_csv(out / "distribution.csv", ("t", "x", "probability"), rows)
    r0 = returns[0]
    write_json(
        out / "summary.json",
        {
            "start": start,
            "time": cfg.time,
            "norm_drift": drift,
            "return_probability": returns,
            "return_probability_ratio": [r / r0 if r0 > 0 else None for r in returns],
        },
    )
    return EXIT_OK


def cmd_spectrum(cfg: ExperimentConfig, out: Path) -> int:
    n = int(cfg.options("spectrum").get("sites", cfg.window))
    if n < 4:
        raise CommandError("spectrum needs at least 4 sites", EXIT_CONFIG)
    shift, coins = cfg.build()
    rep = spectral_mapping_check(shift, coins, n)
    t_rep = rep.reference
    write_csv(
        out / "spectrum_T.csv",
        ("eigenvalue", "edge_localized"),
        zip(t_rep.eigenvalues.tolist(), t_rep.edge_flags.tolist()),
    )
    write_csv(
        out / "spectrum_U.csv",
        ("re", "im", "mapping_defect", "edge_localized"),
        zip(rep.eigenvalues.real.tolist(), rep.eigenvalues.imag.tolist(), rep.mapping_defects.tolist(), rep.edge_flags.tolist()),
    )
    tol = cfg.tol("mapping")
    write_json(
        out / "mapping.json",
        {
            "sites": n,
            "boundary": "periodic",
            "max_defect": rep.max_mapping_defect,
            "max_interior_defect": rep.max_interior_defect,
            "max_inverse_defect": rep.max_inverse_defect,
            "max_unit_circle_deviation": float(np.max(np.abs(np.abs(rep.eigenvalues) - 1.0))),
            "tolerance": tol,
            "within_tolerance": rep.max_interior_defect <= tol,
        },
    )
    return EXIT_OK


def _birth_payload(rep: BirthReport, residual_tol: float) -> dict:
    d = rep.to_dict()
    d["residual_ok"] = None if rep.residual is None else rep.residual <= residual_tol
    ratio_plus = ratio_minus = None
    if rep.decay is not None and rep.predicted_slope_plus is not None:
        ratio_plus = rep.decay.slope_plus / rep.predicted_slope_plus
        ratio_minus = rep.decay.slope_minus / rep.predicted_slope_minus
    d["fitted_over_predicted_plus"] = ratio_plus
    d["fitted_over_predicted_minus"] = ratio_minus
    return d


def cmd_birth(cfg: ExperimentConfig, out: Path) -> int:
    shift, coins = cfg.build()
    opts = cfg.options("birth")
    for s in (1, -1):
        try:
            rep = birth_report(
                shift,
                coins,
                s,
                (-cfg.window, cfg.window),
                tail=opts.get("tail", 30),
                tail_start=opts.get("tail_start", 30),
                margin=cfg.tol("classify_margin"),
                tail_tol=cfg.tol("tail_mass"),
            )
        except HypothesisViolation as exc:
            raise CommandError(str(exc), EXIT_HYPOTHESIS) from None
        except WindowTooSmall as exc:
            raise CommandError(str(exc), EXIT_CONFIG) from None
        name = _sign_name(s)
        write_json(out / f"birth_{name}.json", _birth_payload(rep, cfg.tol("residual")))
        if rep.eigenvector is not None:
            vec = rep.eigenvector
            w = vec.site_norms2()
            with np.errstate(divide="ignore"):
                logw = np.log(w)
            rows = [(int(x), float(a), float(b) if np.isfinite(b) else None) for x, a, b in zip(vec.sites, w, logw)]
            write_csv(out / f"birth_{name}.csv", ("x", "norm2", "log_norm2"), rows)
    return EXIT_OK


def _grid_values(spec) -> list[float]:
    if isinstance(spec, dict):
        return [float(v) for v in np.linspace(spec["start"], spec["stop"], spec["num"])]
    vals = []
    for v in spec:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise CommandError(f"grid values must be numeric, got {v!r}", EXIT_CONFIG)
        vals.append(float(v))
    return vals


def _predict(cfg: ExperimentConfig, shift) -> Optional[tuple[Verdict, Verdict]]:
    m = cfg.model
    margin = cfg.tol("boundary_margin")
    try:
        if m["kind"] == "anisotropic":
            return predict_theorem_6_1(m["epsilon"], shift.p, tol=margin)
        if m["kind"] == "kitagawa" and "table" not in m:
            return predict_theorem_6_2(m["theta_minus"], m["theta_plus"], m["theta2"], margin=margin)
    except BoundaryCase:
        return None
    return None


def cmd_sweep(cfg: ExperimentConfig, out: Path) -> int:
    opts = cfg.options("sweep")
    grid = opts.get("grid")
    if not grid:
        raise CommandError("sweep needs a nonempty 'grid' under command-options.sweep", EXIT_CONFIG)
    kind = cfg.model["kind"]
    names = sorted(grid)
    for name in names:
        if name not in NUMERIC_FIELDS[kind]:
            raise CommandError(f"cannot sweep over {name!r} for model {kind!r}", EXIT_CONFIG)
    axes = [_grid_values(grid[name]) for name in names]
    if any(len(ax) == 0 for ax in axes):
        raise CommandError("empty grid", EXIT_CONFIG)
    margin = cfg.tol("classify_margin")
    rows = []
    disagreements = 0
    for idx, point in enumerate(itertools.product(*axes)):
        sub = cfg.with_params(dict(zip(names, point)))
        try:
            shift, coins = sub.build()
        except ConfigError as exc:
            raise CommandError(f"grid point {dict(zip(names, point))}: {exc}", EXIT_CONFIG) from None
        try:
            ratios = {s: side_ratios(shift, coins, s) for s in (1, -1)}
        except HypothesisViolation as exc:
            raise CommandError(str(exc), EXIT_HYPOTHESIS) from None
        verdicts = {s: classify(r, margin) for s, r in ratios.items()}
        pred = _predict(sub, shift)
        if pred is None:
            agree = None
        else:
            agree = pred[0] is verdicts[1] and pred[1] is verdicts[-1]
            disagreements += not agree
        rows.append(
            (
                idx,
                *point,
                verdicts[1].value,
                verdicts[-1].value,
                ratios[1].B,
                ratios[1].b_paper,
                ratios[-1].B,
                ratios[-1].b_paper,
                None if pred is None else pred[0].value,
                None if pred is None else pred[1].value,
                agree,
            )
        )
    header = (
        "index",
        *names,
        "verdict_plus",
        "verdict_minus",
        "B_plus",
        "b_plus",
        "B_minus",
        "b_minus",
        "predicted_plus",
        "predicted_minus",
        "agree",
    )
    write_csv(out / "sweep.csv", header, rows)
    if disagreements:
        raise CommandError(f"{disagreements} grid point(s) disagree with the predicted verdicts", EXIT_DISAGREE)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "birth": cmd_birth,
    "sweep": cmd_sweep,
}


def run(command: str, cfg: ExperimentConfig, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    return COMMANDS[command](cfg, out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="speclab", description="Split-step quantum walk spectral experiments.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="path to the JSON experiment config")
    parser.add_argument("--out", default="speclab_out", help="output directory (created if missing)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        return run(args.command, cfg, Path(args.out))
    except ConfigError as exc:
        print(f"speclab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisViolation as exc:
        print(f"speclab: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except CommandError as exc:
        print(f"speclab: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
