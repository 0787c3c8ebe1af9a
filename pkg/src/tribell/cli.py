"""Command-line interface: analyze, sweep-ghz, sweep-w, verify, simulate.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 I/O error.
All randomness flows from the --seed flag, so every command is
deterministic and CSV outputs are byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .qcore import (
    GhzClassParams,
    ThreeQubitPureState,
    UnitVector,
    ValidationError,
    WClassParams,
    expectation,
    ghz_state,
    haar_random_state,
    herm_eigenvalues,
    make_state,
    spin_observable,
    tensor3,
    w_state,
)
from .entanglement import (
    entanglement_profile,
    ghz_profile_closed,
    w_profile_closed,
)
from .bell import (
    ALGEBRAIC_CEILING,
    MeasurementSettings,
    bell_operators,
    ghz_correlator_closed,
    optimal_settings_ghz,
    settings_from_vectors,
    settings_from_w_angles,
    smax_ghz_closed,
    smax_w,
    svetlichny_value,
    svetlichny_value_direct,
    w_correlator_closed,
    w_reduced_value,
)
from .optimize import (
    OptimizationConfig,
    ghz_grid_points,
    ghz_verification_row,
    multistart_maximize,
    w_grid_points,
    w_verification_row,
)
from .montecarlo import estimate_svetlichny

GHZ_CLASS_TAU_THRESHOLD = 1e-9

_PI_PATTERN = re.compile(
    r"^\s*(-)?\s*(?:(\d+(?:\.\d+)?)\s*\*?\s*)?pi\s*(?:/\s*(\d+(?:\.\d+)?))?\s*$")


def parse_angle(text: str) -> float:
    """Parse a radian literal, accepting pi fractions like 'pi/4' or '3pi/8'."""
    match = _PI_PATTERN.match(text)
    if match:
        sign = -1.0 if match.group(1) else 1.0
        value = sign * math.pi * float(match.group(2) or 1.0)
        if match.group(3):
            value /= float(match.group(3))
        return value
    try:
        return float(text)
    except ValueError:
        raise ValidationError(f"cannot parse angle literal {text!r}")


@dataclass(frozen=True)
class StateSpec:
    """One of the three input variants: a family or raw amplitudes."""

    kind: str
    ghz: Optional[GhzClassParams] = None
    w: Optional[WClassParams] = None
    raw: Optional[ThreeQubitPureState] = None

    def state(self) -> ThreeQubitPureState:
        if self.kind == "ghz":
            return ghz_state(self.ghz)
        if self.kind == "w":
            return w_state(self.w)
        return self.raw


def _parse_keyvalue(text: str) -> dict:
    entries = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ValidationError(f"malformed line {line!r}: expected key: value")
        key, value = line.split(":", 1)
        entries[key.strip()] = value.strip()
    return entries


def parse_state_spec(text: str) -> StateSpec:
    """Parse the structured state document (family: ghz | w | raw)."""
    entries = _parse_keyvalue(text)
    family = entries.get("family")
    if family == "ghz":
        return StateSpec("ghz", ghz=GhzClassParams(
            theta=parse_angle(entries["theta"]),
            theta3=parse_angle(entries["theta3"])))
    if family == "w":
        return StateSpec("w", w=WClassParams(
            alpha=float(entries["alpha"]),
            beta=float(entries["beta"]),
            gamma=float(entries["gamma"])))
    if family == "raw":
        amps = []
        for k in range(8):
            pair = entries.get(f"amp{k}", "[0, 0]").strip().strip("[]")
            re_part, im_part = (float(v) for v in pair.split(","))
            amps.append(complex(re_part, im_part))
        return StateSpec("raw", raw=make_state(amps))
    raise ValidationError(f"unknown or missing family {family!r}")


def parse_settings_file(text: str) -> MeasurementSettings:
    """Six lines 'name: polar azimuth' for a, a', b, b', c, c'."""
    entries = _parse_keyvalue(text)
    vectors = {}
    for name in ("a", "a_prime", "b", "b_prime", "c", "c_prime"):
        if name not in entries:
            raise ValidationError(f"settings file missing vector {name}")
        parts = entries[name].split()
        if len(parts) != 2:
            raise ValidationError(f"vector {name} needs 'polar azimuth'")
        vectors[name] = UnitVector(parse_angle(parts[0]),
                                   parse_angle(parts[1]) % (2 * math.pi))
    return MeasurementSettings(**vectors)


def _spec_from_args(args) -> StateSpec:
    if args.state:
        try:
            with open(args.state, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise ValidationError(f"cannot read state file: {exc}")
        return parse_state_spec(text)
    if args.ghz:
        return StateSpec("ghz", ghz=GhzClassParams(
            parse_angle(args.ghz[0]), parse_angle(args.ghz[1])))
    if args.w:
        return StateSpec("w", w=WClassParams(*(float(v) for v in args.w)))
    raise ValidationError("provide one of --state, --ghz or --w")


def _closed_report(spec: StateSpec):
    if spec.kind == "ghz":
        return smax_ghz_closed(ghz_profile_closed(spec.ghz))
    if spec.kind == "w":
        return smax_w(w_profile_closed(spec.w))
    return None


def cmd_analyze(args) -> dict:
    spec = _spec_from_args(args)
    state = spec.state()
    profile = entanglement_profile(state)
    classification = ("GHZ-class" if profile.tau > GHZ_CLASS_TAU_THRESHOLD
                      else "W-class")
    closed = _closed_report(spec)
    cfg = OptimizationConfig(seed=args.seed)
    numeric = multistart_maximize(state, cfg)
    report = {
        "profile": profile,
        "classification": classification,
        "smax_closed": closed.closed_value if closed else None,
        "smax_numeric": numeric.best_value,
        "violates": numeric.best_value > 4.0,
        "closed_report": closed,
    }
    print(f"tau:               {profile.tau:.9g}")
    print(f"c12 c23 c31:       {profile.c12:.9g} {profile.c23:.9g} "
          f"{profile.c31:.9g}")
    print(f"c1(23) c2(13) c3(12): {profile.c1_23:.9g} {profile.c2_13:.9g} "
          f"{profile.c3_12:.9g}")
    print(f"monogamy residual: {profile.monogamy_residual:.9g}")
    print(f"classification:    {classification}")
    if closed is not None:
        print(f"smax closed:       {closed.closed_value:.9g} ({closed.branch})")
        if closed.theta_tilde is not None:
            degs = " ".join(f"{math.degrees(t):.7f}" for t in closed.theta_tilde)
            print(f"theta-tilde (deg): {degs}")
    print(f"smax numeric:      {numeric.best_value:.9g}")
    print(f"verdict:           "
          f"{'violates' if report['violates'] else 'no violation'} "
          f"(threshold 4)")
    return report


def _write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]):
    def fmt(value):
        if isinstance(value, float):
            return f"{value:.9g}"
        return str(value)

    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) for v in row])
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        raise SystemExit(3)


def _map_rows(worker, tasks, jobs: int) -> list:
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, tasks, chunksize=1))
    return [worker(task) for task in tasks]


def _ghz_row_task(task):
    index, theta, theta3, cfg, tol = task
    return ghz_verification_row(index, theta, theta3, cfg, tol)


def _w_row_task(task):
    index, c12, sum_c, cfg, tol = task
    return w_verification_row(index, c12, sum_c, cfg, tol)


def cmd_sweep_ghz(args) -> List:
    theta3_values = [parse_angle(v) for v in args.theta3.split(",")]
    cfg = OptimizationConfig(seed=args.seed)
    points = ghz_grid_points(args.theta_steps, theta3_values)
    tasks = [(i, theta, theta3, cfg, args.tol)
             for i, (theta, theta3) in enumerate(points)]
    rows = _map_rows(_ghz_row_task, tasks, args.jobs)
    out_rows = []
    for row in rows:
        theta, theta3 = row.params
        params = GhzClassParams(theta, theta3)
        profile = ghz_profile_closed(params)
        branch = smax_ghz_closed(profile).branch
        out_rows.append([theta, theta3, profile.tau, profile.c12 ** 2,
                         row.closed_value, row.numeric_value, branch, row.gap])
    _write_csv(args.out, ["theta", "theta3", "tau", "c12_sq", "smax_closed",
                          "smax_numeric", "branch", "gap"], out_rows)
    flagged = [r for r in rows if r.flag != "match"]
    print(f"wrote {len(rows)} rows to {args.out}; {len(flagged)} flagged")
    for row in flagged:
        print(f"finding: params={row.params} gap={row.gap:.3e} flag={row.flag}")
    return rows


def cmd_sweep_w(args) -> List:
    c12_values = [float(eval_fraction(v)) for v in args.c12.split(",")]
    cfg = OptimizationConfig(seed=args.seed)
    points = w_grid_points(c12_values, args.sum_steps)
    tasks = [(i, c12, sum_c, cfg, args.tol)
             for i, (c12, sum_c) in enumerate(points)]
    maybe_rows = _map_rows(_w_row_task, tasks, args.jobs)
    rows = []
    for task, row in zip(tasks, maybe_rows):
        if row is None:
            print(f"skipping unrealizable point c12={task[1]:.9g} "
                  f"sum={task[2]:.9g}")
        else:
            rows.append(row)
    out_rows = []
    for row in rows:
        c12, c23, c31 = row.params
        out_rows.append([c12, c23, c31, c12 + c23 + c31,
                         row.closed_value, row.numeric_value, row.gap])
    _write_csv(args.out, ["c12", "c23", "c31", "sum_c", "smax_closed",
                          "smax_numeric", "gap"], out_rows)
    flagged = [r for r in rows if r.flag != "match"]
    print(f"wrote {len(rows)} rows to {args.out}; {len(flagged)} flagged")
    for row in flagged:
        print(f"finding: params={row.params} gap={row.gap:.3e} flag={row.flag}")
    return rows


def eval_fraction(text: str) -> float:
    """Parse a plain float or a simple fraction like '2/3'."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    count: int
    worst: float
    detail: str


def _random_unit_vectors(rng: np.random.Generator, n: int) -> np.ndarray:
    cos_polar = rng.uniform(-1.0, 1.0, size=n)
    azimuth = rng.uniform(0.0, 2.0 * math.pi, size=n)
    sin_polar = np.sqrt(1.0 - cos_polar ** 2)
    return np.stack([sin_polar * np.cos(azimuth),
                     sin_polar * np.sin(azimuth), cos_polar], axis=-1)


def _random_settings(rng: np.random.Generator) -> MeasurementSettings:
    return settings_from_vectors(_random_unit_vectors(rng, 6))


def _random_w_params(rng: np.random.Generator) -> WClassParams:
    amps = np.abs(rng.normal(size=3))
    amps /= np.linalg.norm(amps)
    return WClassParams(*amps)


def _suite_eq12(rng: np.random.Generator, n: int) -> SuiteResult:
    worst = 0.0
    detail = ""
    for _ in range(n):
        params = GhzClassParams(*rng.uniform(0.0, math.pi / 2, size=2))
        a, d, c = (UnitVector.from_cartesian(v)
                   for v in _random_unit_vectors(rng, 3))
        op = tensor3(spin_observable(a), spin_observable(d), spin_observable(c))
        err = abs(ghz_correlator_closed(params, a, d, c)
                  - expectation(ghz_state(params), op))
        if err > worst:
            worst = err
            detail = f"params={params} a={a} d={d} c={c}"
    return SuiteResult("eq12-oracle", worst <= 1e-10, n, worst, detail)


def _suite_eq24(rng: np.random.Generator, n: int) -> SuiteResult:
    worst = 0.0
    detail = ""
    for _ in range(n):
        params = _random_w_params(rng)
        profile = w_profile_closed(params)
        a, b, c = (UnitVector.from_cartesian(v)
                   for v in _random_unit_vectors(rng, 3))
        op = tensor3(spin_observable(a), spin_observable(b), spin_observable(c))
        err = abs(w_correlator_closed(profile, a, b, c)
                  - expectation(w_state(params), op))
        if err > worst:
            worst = err
            detail = f"params={params} a={a} b={b} c={c}"
    return SuiteResult("eq24-oracle", worst <= 1e-10, n, worst, detail)


def _suite_w_reduced(rng: np.random.Generator, n: int) -> SuiteResult:
    worst = 0.0
    detail = ""
    for _ in range(n):
        params = _random_w_params(rng)
        profile = w_profile_closed(params)
        tilde = rng.uniform(0.0, math.pi, size=3)
        reduced = w_reduced_value(profile, *tilde)
        direct = expectation(w_state(params), bell_operators(
            settings_from_w_angles(*tilde))[0])
        err = abs(reduced - direct)
        if err > worst:
            worst = err
            detail = f"params={params} tilde={tilde.tolist()}"
    return SuiteResult("w-reduced-oracle", worst <= 1e-9, n, worst, detail)


def _suite_tensor_vs_direct(rng: np.random.Generator, n: int) -> SuiteResult:
    worst = 0.0
    detail = ""
    for k in range(n):
        state = haar_random_state(rng)
        ms = _random_settings(rng)
        err = abs(svetlichny_value(state, ms)
                  - svetlichny_value_direct(state, ms))
        if err > worst:
            worst = err
            detail = f"case {k}"
    return SuiteResult("tensor-vs-direct", worst <= 1e-10, n, worst, detail)


def _suite_monogamy(rng: np.random.Generator, n_haar: int,
                    n_w: int) -> SuiteResult:
    worst = 0.0
    detail = ""
    passed = True
    for k in range(n_haar):
        profile = entanglement_profile(haar_random_state(rng))
        if profile.monogamy_residual < -1e-9:
            passed = False
            detail = f"haar case {k}: residual {profile.monogamy_residual}"
        worst = max(worst, -profile.monogamy_residual)
    for k in range(n_w):
        profile = entanglement_profile(w_state(_random_w_params(rng)))
        if abs(profile.monogamy_residual) > 1e-9:
            passed = False
            detail = f"w case {k}: residual {profile.monogamy_residual}"
    return SuiteResult("monogamy", passed, n_haar + n_w, worst, detail)


def _suite_branch_continuity(n: int) -> SuiteResult:
    worst = 0.0
    for tau in np.linspace(0.0, 1.0 / 3.0, n):
        c12_sq = 1.0 - 3.0 * tau
        low = 4.0 * math.sqrt(1.0 - tau)
        high = 4.0 * math.sqrt(c12_sq + 2.0 * tau)
        worst = max(worst, abs(low - high))
    return SuiteResult("branch-continuity", worst < 1e-12, n, worst, "")


def _suite_mermin_factor(n_side: int) -> SuiteResult:
    worst = 0.0
    detail = ""
    for theta in np.linspace(0.0, math.pi / 2, n_side):
        for theta3 in np.linspace(0.0, math.pi / 2, n_side):
            params = GhzClassParams(float(theta), float(theta3))
            state = ghz_state(params)
            s_op, m_op, _ = bell_operators(optimal_settings_ghz(params))
            err = abs(expectation(state, s_op) - 2.0 * expectation(state, m_op))
            if err > worst:
                worst = err
                detail = f"params={params}"
    return SuiteResult("mermin-factor", worst <= 1e-9, n_side * n_side,
                       worst, detail)


def _suite_ceiling(rng: np.random.Generator, n: int) -> SuiteResult:
    worst = 0.0
    detail = ""
    passed = True
    for k in range(n):
        s_op, m_op, _ = bell_operators(_random_settings(rng))
        s_top = float(np.max(np.abs(herm_eigenvalues(s_op))))
        m_top = float(np.max(np.abs(herm_eigenvalues(m_op))))
        worst = max(worst, s_top)
        if s_top > ALGEBRAIC_CEILING + 1e-9 or m_top > 4.0 + 1e-9:
            passed = False
            detail = f"case {k}: |S|={s_top} |M|={m_top}"
    return SuiteResult("ceiling", passed, n, worst, detail)


def verification_battery(seed: int = 0) -> List[SuiteResult]:
    """The full invariant battery behind the verify command."""
    rng = np.random.default_rng(seed)
    return [
        _suite_eq12(rng, 1000),
        _suite_eq24(rng, 1000),
        _suite_w_reduced(rng, 500),
        _suite_tensor_vs_direct(rng, 1000),
        _suite_monogamy(rng, 1000, 200),
        _suite_branch_continuity(100),
        _suite_mermin_factor(10),
        _suite_ceiling(rng, 200),
    ]


def cmd_verify(args) -> int:
    results = verification_battery(args.seed)
    failures = 0
    for result in results:
        status = "pass" if result.passed else "FAIL"
        print(f"{status}  {result.name:20s} cases={result.count:5d} "
              f"worst={result.worst:.3e}")
        if not result.passed:
            failures += 1
            print(f"      failing case: {result.detail}")
    print(f"{len(results) - failures}/{len(results)} suites passed")
    return 0 if failures == 0 else 1


def _optimal_settings_for(spec: StateSpec, seed: int) -> MeasurementSettings:
    closed = _closed_report(spec)
    if closed is not None:
        return closed.achieving_settings
    return multistart_maximize(spec.state(),
                               OptimizationConfig(seed=seed)).best_settings


def cmd_simulate(args) -> dict:
    spec = _spec_from_args(args)
    state = spec.state()
    if args.settings == "optimal":
        settings = _optimal_settings_for(spec, args.seed)
    else:
        try:
            with open(args.settings, "r", encoding="utf-8") as handle:
                settings = parse_settings_file(handle.read())
        except OSError as exc:
            raise ValidationError(f"cannot read settings file: {exc}")
    exact = svetlichny_value(state, settings)
    estimate = estimate_svetlichny(state, settings, args.shots, args.seed)
    z_score = ((abs(estimate.mean) - exact) / estimate.stderr
               if estimate.stderr > 0 else 0.0)
    print(f"shots per correlator: {estimate.shots}")
    print(f"estimate:             {estimate.mean:.9g} "
          f"+/- {estimate.stderr:.3e}")
    print(f"exact value:          {exact:.9g}")
    print(f"z-score:              {z_score:.3f}")
    return {"estimate": estimate, "exact": exact, "z_score": z_score}


def _add_common_flags(parser: argparse.ArgumentParser, suppress: bool):
    # The same flags live on the main parser (with real defaults) and on
    # every subparser (defaulting to SUPPRESS), so they are accepted on
    # either side of the subcommand without clobbering each other.
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=default(0),
                        help="seed for every random draw (default 0)")
    parser.add_argument("--tol", type=float, default=default(1e-3),
                        help="report tolerance for sweeps (default 1e-3)")
    parser.add_argument("--jobs", type=int, default=default(1),
                        help="worker processes for sweeps (default 1)")
    parser.add_argument("--out", default=default(None),
                        help="output path for CSV-producing commands")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tribell",
        description="Tripartite nonlocality of three-qubit pure states.")
    _add_common_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="entanglement and S_max report")
    group = analyze.add_mutually_exclusive_group(required=True)
    group.add_argument("--state", help="state spec file")
    group.add_argument("--ghz", nargs=2, metavar=("THETA", "THETA3"))
    group.add_argument("--w", nargs=3, metavar=("ALPHA", "BETA", "GAMMA"))
    _add_common_flags(analyze, suppress=True)
    analyze.set_defaults(func=cmd_analyze)

    sweep_ghz = sub.add_parser("sweep-ghz", help="Fig.-1 style GHZ sweep CSV")
    sweep_ghz.add_argument("--theta-steps", type=int, default=21)
    sweep_ghz.add_argument("--theta3", default="pi/8,pi/4,pi/2",
                           help="comma-separated theta3 curve values")
    _add_common_flags(sweep_ghz, suppress=True)
    sweep_ghz.set_defaults(func=cmd_sweep_ghz, default_out="fig1_ghz.csv")

    sweep_w = sub.add_parser("sweep-w", help="Fig.-2 style W sweep CSV")
    sweep_w.add_argument("--c12", default="0.35,0.45,2/3",
                         help="comma-separated fixed c12 curve values")
    sweep_w.add_argument("--sum-steps", type=int, default=21)
    _add_common_flags(sweep_w, suppress=True)
    sweep_w.set_defaults(func=cmd_sweep_w, default_out="fig2_w.csv")

    verify = sub.add_parser("verify", help="run the invariant battery")
    _add_common_flags(verify, suppress=True)
    verify.set_defaults(func=cmd_verify)

    simulate = sub.add_parser("simulate", help="finite-shot Born sampling")
    group = simulate.add_mutually_exclusive_group(required=True)
    group.add_argument("--state", help="state spec file")
    group.add_argument("--ghz", nargs=2, metavar=("THETA", "THETA3"))
    group.add_argument("--w", nargs=3, metavar=("ALPHA", "BETA", "GAMMA"))
    simulate.add_argument("--settings", default="optimal",
                          help="'optimal' or a settings file path")
    simulate.add_argument("--shots", type=int, default=1_000_000)
    _add_common_flags(simulate, suppress=True)
    simulate.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.out is None:
        args.out = getattr(args, "default_out", None)
    try:
        result = args.func(args)
    except ValidationError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "verify":
        return int(result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
