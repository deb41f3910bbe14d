"""Experiment runner: parses configs, seeds per-trial RNG streams, dispatches
to the core modules, and emits deterministic CSV reports.

Per-trial generators are counter-based (Philox keyed on (seed, row index)),
so results do not depend on execution order and BJLAB_THREADS may fan trials
out across workers without changing a byte of output.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .blockspace import SpaceSpec
from .errors import BadSpec, ConfigError
from .ortho import is_approx_bj_orthogonal, is_bj_orthogonal
from .preserver import (
    AtomPartition,
    ScalingOperator,
    draw_orthogonal_pair,
    is_scalar_multiple_of_isometry,
    preservation_trial,
    random_element,
    u_eps_L1,
    u_eps_l1,
    u_eps_Lp,
)
from .sip import sip_axiom_report, sip_orthogonality_criterion

MODES = ("check-ortho", "check-approx", "sip", "axioms", "preserver-sweep",
         "isometry-test")

_MODES_NEEDING_EPS = ("check-approx", "sip", "preserver-sweep")

# Cross-route comparisons are inconclusive within this band of the linear
# criterion's boundary: the minimization route's margin is quadratic in the
# distance to the boundary, so verdicts cannot be matched closer than the
# square root of the decision tolerance.
CROSS_ROUTE_BAND = 1e-3

TRIAL_COLUMNS = ("trial", "seed", "p", "q", "n", "d", "epsilon",
                 "direct_verdict", "direct_margin", "second_route",
                 "second_verdict", "second_margin", "boundary")
AXIOM_COLUMNS = ("trial", "seed", "p", "q", "n", "d", "a", "b",
                 "res_linearity", "res_homogeneity", "res_cauchy_schwarz",
                 "res_norm", "scale", "pass")
ISOMETRY_COLUMNS = ("scalar_multiple_of_isometry", "ratio_spread", "probes")


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    spec: SpaceSpec
    trials: int
    seed: int
    epsilons: tuple[float, ...] = ()
    partition: AtomPartition | None = None
    factors: tuple[float, ...] | None = None
    tol: float = 1e-9
    zero_tol: float = 1e-12
    out: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode: must be one of {', '.join(MODES)}, got {self.mode!r}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError(f"trials: must be a positive integer, got {self.trials!r}")
        if not isinstance(self.seed, int) or abs(self.seed) >= 2**63:
            raise ConfigError(f"seed: must be a 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        for e in self.epsilons:
            if not (0.0 <= e < 1.0):
                raise ConfigError(f"epsilons: values must lie in [0, 1), got {e}")
        if not (self.tol > 0.0 and math.isfinite(self.tol)):
            raise ConfigError(f"tol: must be positive and finite, got {self.tol}")
        if self.zero_tol < 0.0:
            raise ConfigError(f"zero_tol: must be >= 0, got {self.zero_tol}")
        if self.mode in _MODES_NEEDING_EPS and not self.epsilons:
            raise ConfigError(f"epsilons: required for mode {self.mode}")
        if self.partition is not None and self.partition.n != self.spec.n:
            raise ConfigError(
                f"partition: covers {self.partition.n} atoms, spec has {self.spec.n}")
        if self.factors is not None:
            object.__setattr__(self, "factors",
                               tuple(float(c) for c in self.factors))
            if len(self.factors) != self.spec.n:
                raise ConfigError(
                    f"factors: expected {self.spec.n} entries, got {len(self.factors)}")
            if not all(c > 0.0 and math.isfinite(c) for c in self.factors):
                raise ConfigError("factors: all entries must be positive and finite")
        if self.mode != "isometry-test" and not self.spec.smooth_inner:
            raise ConfigError(
                f"spec: mode {self.mode} needs 1 < q < inf, got q={self.spec.q}")
        if self.mode in ("sip", "axioms") and self.spec.p == 1.0:
            raise ConfigError(f"spec: mode {self.mode} needs p > 1")
        if self.mode == "isometry-test":
            if self.factors is None and not self.epsilons:
                raise ConfigError("factors: required for isometry-test "
                                  "(or give epsilons to test a built-in operator)")
            if self.trials < 2:
                raise ConfigError("trials: isometry-test needs at least 2")
        if self.mode == "preserver-sweep":
            self._operator(self.epsilons[0])  # validate spec/partition pairing

    def _operator(self, eps: float) -> ScalingOperator:
        """Matching counterexample operator for this space at eps."""
        try:
            if self.spec.p == 1.0:
                if self.partition is None:
                    return u_eps_l1(eps, self.spec)
                return u_eps_L1(eps, self.partition, self.spec)
            if self.partition is None:
                raise ConfigError("partition: required for p > 1 sweeps")
            return u_eps_Lp(eps, self.partition, self.spec)
        except BadSpec as exc:
            raise ConfigError(f"spec/partition: {exc}") from exc


_CONFIG_KEYS = {"mode", "spec", "epsilons", "trials", "seed", "partition",
                "factors", "tol", "zero_tol", "out"}
_SPEC_KEYS = {"p", "q", "n", "d", "weights"}


def parse_config(text: str, mode: str | None = None) -> ExperimentConfig:
    """Parse a JSON config; rejects unknown keys and fills documented
    defaults (tol=1e-9, zero_tol=1e-12)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")

    cfg_mode = data.get("mode")
    if mode is not None and cfg_mode is not None and mode != cfg_mode:
        raise ConfigError(f"mode: config says {cfg_mode!r} but {mode!r} was requested")
    eff_mode = mode or cfg_mode
    if eff_mode is None:
        raise ConfigError("mode: missing (set it in the config or on the command line)")

    if "spec" not in data:
        raise ConfigError("spec: missing")
    raw_spec = data["spec"]
    if not isinstance(raw_spec, dict):
        raise ConfigError("spec: must be an object {p, q, n, d, weights}")
    bad = set(raw_spec) - _SPEC_KEYS
    if bad:
        raise ConfigError(f"spec: unknown key(s): {', '.join(sorted(bad))}")
    missing = _SPEC_KEYS - set(raw_spec)
    if missing:
        raise ConfigError(f"spec: missing key(s): {', '.join(sorted(missing))}")
    try:
        spec = SpaceSpec.from_dict(raw_spec)
    except BadSpec as exc:
        raise ConfigError(f"spec: {exc}") from exc

    for key in ("trials", "seed"):
        if key not in data:
            raise ConfigError(f"{key}: missing")
        if not isinstance(data[key], int) or isinstance(data[key], bool):
            raise ConfigError(f"{key}: must be an integer, got {data[key]!r}")

    partition = None
    if data.get("partition") is not None:
        raw_part = data["partition"]
        if not isinstance(raw_part, list):
            raise ConfigError("partition: must be an array of atom indices")
        try:
            partition = AtomPartition(tuple(raw_part), spec.n)
        except BadSpec as exc:
            raise ConfigError(f"partition: {exc}") from exc

    return ExperimentConfig(
        mode=eff_mode,
        spec=spec,
        trials=data["trials"],
        seed=data["seed"],
        epsilons=tuple(data.get("epsilons", ())),
        partition=partition,
        factors=tuple(data["factors"]) if data.get("factors") is not None else None,
        tol=float(data.get("tol", 1e-9)),
        zero_tol=float(data.get("zero_tol", 1e-12)),
        out=data.get("out"),
    )


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based per-trial stream, independent of execution order."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


@dataclass
class _Row:
    values: tuple
    outcome: str          # pass | fail | boundary
    pass_margins: tuple = ()


@dataclass
class RunReport:
    mode: str
    columns: tuple[str, ...]
    rows: list[tuple]
    summary: dict

    def csv_text(self) -> str:
        lines = ["#v1 " + ",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _execute(tasks: list[Callable[[], _Row]]) -> list[_Row]:
    raw = os.environ.get("BJLAB_THREADS", "1") or "1"
    try:
        workers = max(1, int(raw))
    except ValueError as exc:
        raise ConfigError(f"BJLAB_THREADS: must be an integer, got {raw!r}") from exc
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda task: task(), tasks))
    return [task() for task in tasks]


def _check_outcome(res) -> str:
    if res.boundary:
        return "boundary"
    return "pass" if res.verdict else "fail"


def _constructed_pair_task(cfg: ExperimentConfig, index: int, trial: int,
                           eps: float | None):
    """One row: draw an orthogonal pair and check it (exact or at eps)."""

    def task() -> _Row:
        rng = trial_rng(cfg.seed, index)
        x, y = draw_orthogonal_pair(cfg.spec, rng)
        if eps is None:
            res = is_bj_orthogonal(x, y, cfg.spec, cfg.tol)
            shown_eps = 0.0
        else:
            res = is_approx_bj_orthogonal(x, y, eps, cfg.spec, cfg.tol)
            shown_eps = eps
        s = cfg.spec
        values = (trial, f"{cfg.seed}:{index}", s.p, s.q, s.n, s.d, shown_eps,
                  res.verdict, res.margin, "none", "", "", res.boundary)
        return _Row(values, _check_outcome(res), (res.margin,))

    return task


def _run_check_ortho(cfg: ExperimentConfig):
    tasks = [_constructed_pair_task(cfg, i, i, None) for i in range(cfg.trials)]
    return TRIAL_COLUMNS, _execute(tasks)


def _run_check_approx(cfg: ExperimentConfig):
    tasks = []
    for k, eps in enumerate(cfg.epsilons):
        for i in range(cfg.trials):
            tasks.append(_constructed_pair_task(cfg, k * cfg.trials + i, i, eps))
    return TRIAL_COLUMNS, _execute(tasks)


def _run_sip(cfg: ExperimentConfig):
    """Random (not constructed) pairs: the direct check and the semi-inner
    product criterion must agree outside the cross-route band."""

    def make_task(index: int, trial: int, eps: float):
        def task() -> _Row:
            rng = trial_rng(cfg.seed, index)
            x = random_element(cfg.spec, rng)
            y = random_element(cfg.spec, rng)
            direct = is_approx_bj_orthogonal(x, y, eps, cfg.spec, cfg.tol)
            crit = sip_orthogonality_criterion(x, y, eps, cfg.spec, cfg.tol)
            if direct.boundary or crit.boundary or abs(crit.margin) < CROSS_ROUTE_BAND:
                outcome = "boundary"
            else:
                outcome = "pass" if direct.verdict == crit.verdict else "fail"
            s = cfg.spec
            values = (trial, f"{cfg.seed}:{index}", s.p, s.q, s.n, s.d, eps,
                      direct.verdict, direct.margin, "sip", crit.verdict,
                      crit.margin, outcome == "boundary")
            return _Row(values, outcome, (direct.margin, crit.margin))

        return task

    tasks = []
    for k, eps in enumerate(cfg.epsilons):
        for i in range(cfg.trials):
            tasks.append(make_task(k * cfg.trials + i, i, eps))
    return TRIAL_COLUMNS, _execute(tasks)


def _run_axioms(cfg: ExperimentConfig):
    def make_task(index: int):
        def task() -> _Row:
            rng = trial_rng(cfg.seed, index)
            f = random_element(cfg.spec, rng, min_norm=0.0)
            g = random_element(cfg.spec, rng, min_norm=0.0)
            h = random_element(cfg.spec, rng, min_norm=0.0)
            a, b = rng.standard_normal(2)
            rep = sip_axiom_report(f, g, h, a, b, cfg.spec)
            ok = rep.passes(cfg.tol)
            s = cfg.spec
            values = (index, f"{cfg.seed}:{index}", s.p, s.q, s.n, s.d,
                      float(a), float(b), rep.first_slot_linearity,
                      rep.second_slot_homogeneity, rep.cauchy_schwarz,
                      rep.norm_compatibility, rep.scale, ok)
            return _Row(values, "pass" if ok else "fail",
                        (rep.max_relative(),))

        return task

    return AXIOM_COLUMNS, _execute([make_task(i) for i in range(cfg.trials)])


def _run_preserver_sweep(cfg: ExperimentConfig):
    def make_task(index: int, trial: int, eps: float):
        operator = cfg._operator(eps)

        def task() -> _Row:
            rng = trial_rng(cfg.seed, index)
            rec = preservation_trial(operator, eps, cfg.spec, rng, cfg.tol,
                                     trial=trial, seed=(cfg.seed, index))
            s = cfg.spec
            values = (trial, f"{cfg.seed}:{index}", s.p, s.q, s.n, s.d, eps,
                      rec.direct.verdict, rec.direct.margin, rec.second_route,
                      rec.second.verdict, rec.second.margin,
                      rec.outcome == "boundary")
            return _Row(values, rec.outcome,
                        (rec.direct.margin, rec.second.margin))

        return task

    tasks = []
    for k, eps in enumerate(cfg.epsilons):
        for i in range(cfg.trials):
            tasks.append(make_task(k * cfg.trials + i, i, eps))
    return TRIAL_COLUMNS, _execute(tasks)


def _run_isometry_test(cfg: ExperimentConfig):
    if cfg.factors is not None:
        operator = ScalingOperator(np.asarray(cfg.factors))
    else:
        operator = cfg._operator(cfg.epsilons[0])
    rng = trial_rng(cfg.seed, 0)
    verdict, spread = is_scalar_multiple_of_isometry(
        operator, cfg.spec, trials=cfg.trials, tol=cfg.tol, rng=rng)
    row = _Row((verdict, spread, cfg.trials), "pass", ())
    return ISOMETRY_COLUMNS, [row]


_RUNNERS = {
    "check-ortho": _run_check_ortho,
    "check-approx": _run_check_approx,
    "sip": _run_sip,
    "axioms": _run_axioms,
    "preserver-sweep": _run_preserver_sweep,
    "isometry-test": _run_isometry_test,
}


def run(config: ExperimentConfig, echo: bool = True) -> RunReport:
    """Execute a configured experiment.

    Deterministic given (config, seed): the CSV written to config.out is
    byte-for-byte identical across runs on the same platform.  The summary is
    printed to stdout as a single JSON object unless echo is False.
    """
    start = time.perf_counter()
    columns, row_data = _RUNNERS[config.mode](config)
    rows = [r.values for r in row_data]
    counts = {"pass": 0, "fail": 0, "boundary": 0}
    max_pass_margin = 0.0
    for r in row_data:
        counts[r.outcome] += 1
        if r.outcome == "pass" and r.pass_margins:
            max_pass_margin = max(max_pass_margin,
                                  max(abs(m) for m in r.pass_margins))
    summary = {
        "mode": config.mode,
        "seed": config.seed,
        "trials": len(rows),
        "pass": counts["pass"],
        "fail": counts["fail"],
        "boundary": counts["boundary"],
        "max_abs_margin_pass": max_pass_margin,
        "wall_time_s": time.perf_counter() - start,
        "out": config.out,
    }
    if config.mode == "isometry-test":
        summary["scalar_multiple_of_isometry"] = bool(rows[0][0])
        summary["ratio_spread"] = float(rows[0][1])
    report = RunReport(mode=config.mode, columns=columns, rows=rows,
                       summary=summary)
    if config.out is not None:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(report.csv_text())
    if echo:
        print(json.dumps(summary, sort_keys=True))
    return report


def with_overrides(config: ExperimentConfig, seed: int | None = None,
                   out: str | None = None) -> ExperimentConfig:
    """Command-line overrides applied to a parsed config."""
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if out is not None:
        changes["out"] = out
    return replace(config, **changes) if changes else config
