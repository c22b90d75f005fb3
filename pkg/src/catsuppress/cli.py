"""Command-line experiments.

Usage::

    catsuppress <scenario> --config run.toml [--out DIR] [--seed N] [--threads N] [--strict]

Config files are TOML::

    schema_version = 1
    seed = 0
    [params]            # scalars, or lists for a series of values
    alpha = 2.0
    T = [0.95, 0.85, 0.5]
    [sweep]             # exactly one swept parameter for sweep scenarios
    alpha = { start = 0.5, stop = 3.0, count = 26 }   # or { values = [...] }
    [ascent]            # optimizer settings (AscentConfig fields)
    [options]           # scenario-specific switches

Points are the product of the series (outer, in key order) and the sweep
values (inner).  Each run writes ``<scenario>.csv`` and ``<scenario>.json``
(the manifest) into the output directory.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__, catstates, channels, fock, oracle, recovery
from .catstates import CatBasisKind, LogicalBasis
from .errors import ConfigError, ConvergenceError, CutoffError, DomainError, NoRealRootError
from .optimizer import AscentConfig, optimize

SCHEMA_VERSION = 1
SCENARIOS = (
    "zps_sweep",
    "teleamp_sweep",
    "pipeline_fidelity",
    "optimize_recovery",
    "nps_compare",
    "success_prob_generalized",
    "oracle_check",
    "wigner_dump",
)
SWEEP_REQUIRED = {"zps_sweep", "teleamp_sweep", "pipeline_fidelity", "nps_compare"}
SWEEP_OPTIONAL = {"success_prob_generalized"}
PARAM_KEYS = ("alpha", "T", "gamma", "eta", "g", "n", "x", "gain_rule")
SWEEPABLE = ("alpha", "T", "gamma", "eta", "g", "n")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_CONVERGENCE = 4

OFF_BLOCK_TOL = 1e-3
RANGE_SLACK = 1e-12

NOTES = (
    "loss-branch weight p3 uses (sinh y - sin y)/2; the cosine form does not conserve probability",
    "mixture weights use the squared normalization ratio (N0/Nk)^2",
    "gain solved from the amplitude-restoration constraint unless gain_rule = 'sextic'",
)

# encoded test states: (a, b) in the chosen logical basis
STATES = {
    "zero": (1.0, 0.0),
    "one": (0.0, 1.0),
    "plus": (1 / math.sqrt(2), 1 / math.sqrt(2)),
    "minus": (1 / math.sqrt(2), -1 / math.sqrt(2)),
    "plus_i": (1 / math.sqrt(2), 1j / math.sqrt(2)),
    "minus_i": (1 / math.sqrt(2), -1j / math.sqrt(2)),
}


@dataclass
class ExperimentConfig:
    scenario: str
    params: dict
    sweep: tuple | None  # (name, values)
    ascent: AscentConfig
    options: dict
    seed: int = 0
    output: str = "results"
    raw: dict = field(default_factory=dict)

    def points(self):
        """Parameter dicts in deterministic order (series outer, sweep inner)."""
        keys = [k for k, v in self.params.items() if isinstance(v, list) and k != "x"]
        series = [self.params[k] for k in keys]
        sweep_vals = self.sweep[1] if self.sweep else [None]
        out = []
        for combo in itertools.product(*series):
            for s in sweep_vals:
                p = dict(self.params)
                p.update(zip(keys, combo))
                if self.sweep:
                    p[self.sweep[0]] = s
                out.append(p)
        return out


# ---------------------------------------------------------------------------
# config


def _fail(msg):
    raise ConfigError(msg)


def _check_param(name, v):
    if name == "x":
        if not (isinstance(v, list) and len(v) == 3 and all(isinstance(i, int) and i >= 1 for i in v)):
            _fail(f"params.x must be three integers >= 1, got {v!r}")
        return
    if name == "gain_rule":
        if v not in ("constraint", "sextic"):
            _fail(f"params.gain_rule must be 'constraint' or 'sextic', got {v!r}")
        return
    if name == "n":
        if not (isinstance(v, int) and not isinstance(v, bool) and v >= 0):
            _fail(f"params.n must be an integer >= 0, got {v!r}")
        return
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        _fail(f"params.{name} must be a finite number, got {v!r}")
    if name == "alpha" and not v > 0:
        _fail(f"params.alpha must be positive, got {v}")
    if name in ("T", "gamma", "eta") and not 0.0 < v <= 1.0:
        _fail(f"params.{name} must lie in (0, 1], got {v}")
    if name == "g" and not v >= 1.0:
        _fail(f"params.g must be >= 1, got {v}")


def _sweep_values(name, spec):
    if not isinstance(spec, dict):
        _fail(f"sweep.{name} must be a table")
    if "values" in spec:
        vals = list(spec["values"])
    else:
        try:
            start, stop, count = spec["start"], spec["stop"], int(spec["count"])
        except KeyError as e:
            _fail(f"sweep.{name} needs start, stop and count (missing {e.args[0]})")
        if count < 1:
            _fail(f"sweep.{name}.count must be >= 1")
        vals = np.linspace(start, stop, count).tolist()
        if name == "n":
            vals = sorted({int(round(v)) for v in vals})
    for v in vals:
        _check_param(name, v)
    if not vals:
        _fail(f"sweep.{name} is empty")
    return vals


def parse_config(data, scenario):
    """Validate a decoded TOML document into an :class:`ExperimentConfig`."""
    if scenario not in SCENARIOS:
        _fail(f"unknown scenario {scenario!r}")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        _fail(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")
    declared = data.get("scenario", scenario)
    if declared != scenario:
        _fail(f"config is for scenario {declared!r}, not {scenario!r}")
    unknown = set(data) - {"schema_version", "scenario", "seed", "output", "params", "sweep", "ascent", "options"}
    if unknown:
        _fail(f"unknown top-level keys: {sorted(unknown)}")

    params = dict(data.get("params", {}))
    for k, v in params.items():
        if k not in PARAM_KEYS:
            _fail(f"unknown parameter params.{k}")
        if isinstance(v, list) and k != "x":
            if not v:
                _fail(f"params.{k} series is empty")
            for item in v:
                _check_param(k, item)
        elif k == "x" and v and isinstance(v[0], list):
            _fail("params.x series are not supported; use one pattern per run")
        else:
            _check_param(k, v)

    sweep_tab = data.get("sweep", {})
    sweep = None
    if len(sweep_tab) > 1:
        _fail(f"exactly one swept parameter allowed, got {sorted(sweep_tab)}")
    if sweep_tab:
        (name, spec), = sweep_tab.items()
        if name not in SWEEPABLE:
            _fail(f"sweep.{name} is not a sweepable parameter")
        if scenario not in SWEEP_REQUIRED | SWEEP_OPTIONAL:
            _fail(f"scenario {scenario} does not take a sweep")
        if name in params:
            _fail(f"params.{name} is also swept")
        sweep = (name, _sweep_values(name, spec))
    elif scenario in SWEEP_REQUIRED:
        _fail(f"scenario {scenario} needs exactly one [sweep] parameter")

    ascent_tab = dict(data.get("ascent", {}))
    known = {f.name for f in fields(AscentConfig)}
    bad = set(ascent_tab) - known
    if bad:
        _fail(f"unknown ascent keys: {sorted(bad)}")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        _fail(f"seed must be a non-negative integer, got {seed!r}")
    ascent_tab.setdefault("seed", seed)
    try:
        ascent = AscentConfig(**ascent_tab)
    except (TypeError, ValueError) as e:
        _fail(f"ascent: {e}")
    return ExperimentConfig(
        scenario=scenario,
        params=params,
        sweep=sweep,
        ascent=ascent,
        options=dict(data.get("options", {})),
        seed=seed,
        output=data.get("output", "results"),
        raw=data,
    )


def load_config(path, scenario):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        _fail(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as e:
        _fail(f"config parse error in {path}: {e}")
    return parse_config(data, scenario)


# ---------------------------------------------------------------------------
# scenario evaluation (one parameter point -> rows)


def _need(p, *names):
    for n in names:
        if n not in p:
            _fail(f"params.{n} is required")


def _pipeline(p, **over):
    kw = dict(
        alpha=p["alpha"],
        T=p.get("T", 1.0),
        gamma=p.get("gamma", 1.0),
        eta=p.get("eta", 1.0),
        g=p.get("g"),
        n=p.get("n", 0),
        x=tuple(p.get("x", (1, 1, 1))),
        gain_rule=p.get("gain_rule", "constraint"),
    )
    kw.update(over)
    return channels.PipelineParams(**kw)


def _states(options):
    labels = options.get("states", ["zero", "one", "plus", "minus"])
    for s in labels:
        if s not in STATES:
            _fail(f"options.states: unknown state {s!r}")
    return labels


def _eval_zps(p, options, ascent):
    _need(p, "alpha", "T")
    rows = []
    for s in _states(options):
        a, b = STATES[s]
        rows.append(dict(alpha=p["alpha"], T=p["T"], state_label=s,
                         P_s=channels.zps_success_probability(a, b, p["alpha"], p["T"])))
    return rows


def _eval_teleamp(p, options, ascent):
    _need(p, "alpha", "g")
    x = tuple(p.get("x", (1, 1, 1)))
    alpha = catstates.check_alpha(p["alpha"])
    rows = []
    for s in _states(options):
        a, b = STATES[s]
        c = catstates.ring_coefficients(a, b, LogicalBasis.ZERO_ONE, alpha)
        rows.append(dict(alpha=alpha, g=p["g"], x1=x[0], x2=x[1], x3=x[2], state_label=s,
                         P_s=channels.teleamp_success_probability(c, alpha, p["g"], x)))
    return rows


def _recovery_point(pp, options, ascent):
    e = pp.effective()
    noise = recovery.pipeline_noise(pp)
    R0 = recovery.canonical_recovery(noise.alpha_tilde, noise.alpha_bar)
    wc = recovery.worst_case_fidelity(R0, noise)
    ps = channels.min_success_probability(pp, channels.HeraldingSet.standard(pp.n))
    row = dict(
        alpha=pp.alpha, T=pp.T, gamma=pp.gamma, eta=pp.eta, n=pp.n, g=e.g,
        F_w_canonical=wc.fidelity, theta_canonical=wc.theta, phi_canonical=wc.phi,
    )
    diag = dict(gain_residual=abs(e.residual))
    if options.get("optimize", False):
        res = optimize(noise, ascent)
        best = res.trace
        row.update(F_w_optimized=res.fidelity, theta_optimized=best.theta[-1], phi_optimized=best.phi[-1])
        tp = max(max(t.tp_residual) for t in res.traces)
        mn = min(min(t.min_eigenvalue) for t in res.traces)
        diag.update(cptp_tp_residual=tp, cptp_min_eigenvalue=mn, off_block=res.off_block,
                    plateaued=all(t.stopped_early for t in res.traces))
    row["P_s_min"] = ps.probability
    return row, diag


def _eval_pipeline(p, options, ascent):
    _need(p, "alpha", "T", "gamma")
    row, diag = _recovery_point(_pipeline(p), options, ascent)
    return [row], diag


def _eval_nps(p, options, ascent):
    _need(p, "alpha", "T", "gamma")
    row, diag = _recovery_point(_pipeline(p), dict(options, optimize=False), ascent)
    return [row], diag


def _eval_success(p, options, ascent):
    _need(p, "alpha", "T", "gamma")
    pp = _pipeline(p)
    n_max = int(options.get("n_max", 10))
    x_max = int(options.get("x_max", 10))
    sets = dict(
        P_s_standard=channels.HeraldingSet.standard(pp.n),
        P_s_any_n=channels.HeraldingSet.any_n(n_max),
        P_s_generalized=channels.HeraldingSet.generalized(n_max, x_max),
    )
    e = pp.effective()
    row = dict(alpha=pp.alpha, T=pp.T, gamma=pp.gamma, eta=pp.eta, g=e.g)
    for k, h in sets.items():
        row[k] = channels.min_success_probability(pp, h).probability
    return [row], dict(gain_residual=abs(e.residual))


EVALUATORS = dict(
    zps_sweep=_eval_zps,
    teleamp_sweep=_eval_teleamp,
    pipeline_fidelity=_eval_pipeline,
    nps_compare=_eval_nps,
    success_prob_generalized=_eval_success,
)


def _evaluate(task):
    scenario, p, options, ascent = task
    t0 = time.perf_counter()
    out = EVALUATORS[scenario](p, options, ascent)
    rows, diag = out if isinstance(out, tuple) else (out, {})
    diag["runtime_s"] = time.perf_counter() - t0
    return rows, diag


# ---------------------------------------------------------------------------
# single-shot scenarios


def run_optimize(cfg):
    p = cfg.points()[0]
    _need(p, "alpha", "T", "gamma")
    pp = _pipeline(p)
    noise = recovery.pipeline_noise(pp)
    R0 = recovery.canonical_recovery(noise.alpha_tilde, noise.alpha_bar)
    canon = recovery.worst_case_fidelity(R0, noise)
    res = optimize(noise, cfg.ascent)
    tr = res.trace
    rows = [
        dict(step=t, fidelity=tr.fidelity[t], delta_norm=tr.delta_norm[t], epsilon=tr.epsilon[t],
             theta=tr.theta[t], phi=tr.phi[t])
        for t in range(len(tr))
    ]
    tp = max(max(t.tp_residual) for t in res.traces)
    mn = min(min(t.min_eigenvalue) for t in res.traces)
    extra = dict(
        F_w_canonical=canon.fidelity,
        F_w_optimized=res.fidelity,
        best_restart=res.best_restart,
        restart_fidelities=[max(t.fidelity) for t in res.traces],
        restart_steps=[len(t) for t in res.traces],
        choi_real=res.choi.real.tolist(),
        choi_imag=res.choi.imag.tolist(),
    )
    residuals = dict(cptp_tp_residual=tp, cptp_min_eigenvalue=mn, off_block=res.off_block,
                     noise_kraus=len(noise.kraus))
    warnings = []
    if res.off_block > OFF_BLOCK_TOL:
        warnings.append(f"off-block parity mass {res.off_block:.3g} exceeds {OFF_BLOCK_TOL}")
    if not all(t.stopped_early for t in res.traces):
        warnings.append("some restarts hit max_steps before the fidelity plateau")
    summary = f"F_w optimized {res.fidelity:.6f} (canonical {canon.fidelity:.6f})"
    return rows, extra, residuals, warnings, summary


def run_oracle(cfg):
    p = cfg.points()[0]
    alpha = p.get("alpha", 1.2)
    if alpha > 1.5:
        _fail(f"params.alpha must be <= 1.5 for the circuit oracle, got {alpha}")
    opts = cfg.options
    cut = oracle.OracleCutoffs(**{k: opts[k] for k in ("signal", "network", "resource", "output") if k in opts})
    a = complex(opts.get("a_re", 0.6), opts.get("a_im", 0.0))
    b = complex(opts.get("b_re", 0.0), opts.get("b_im", 0.8))
    nrm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    checks = oracle.oracle_suite(
        alpha=alpha, T=p.get("T", 0.6), gamma=p.get("gamma", 0.8), eta=p.get("eta", 0.9),
        g=p.get("g", 1.3), x=tuple(p.get("x", (1, 2, 1))), n=p.get("n", 1),
        a=a / nrm, b=b / nrm, cutoffs=cut, scenarios=opts.get("scenarios"),
    )
    rows = [dict(check=c.name, kind=c.kind, residual=c.residual, tolerance=c.tolerance, passed=c.passed)
            for c in checks]
    residuals = {c.name: c.residual for c in checks}
    failed = [c.name for c in checks if not c.passed]
    extra = dict(failed=failed)
    summary = f"oracle: {len(checks) - len(failed)}/{len(checks)} checks within tolerance"
    return rows, extra, residuals, [], summary


def wigner_state(options, alpha, headroom=0):
    """Fock vector from ``options.state`` (a basis kind, ``vacuum`` or ``encoded``).

    ``headroom`` extra levels keep the truncated tail negligible after annihilations.
    """
    kind = options.get("state", "plus_bar")
    if kind == "vacuum":
        return fock.number_state(0, int(options.get("n_max", 20)))
    alpha = catstates.check_alpha(alpha)
    n_max = int(options.get("n_max", fock.default_cutoff(alpha))) + headroom
    if kind == "encoded":
        a = complex(options.get("a_re", 1.0), options.get("a_im", 0.0))
        b = complex(options.get("b_re", 0.0), options.get("b_im", 0.0))
        nrm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        return catstates.encode(a / nrm, b / nrm, options.get("basis", "plus_minus"), alpha, n_max)
    try:
        return catstates.basis_state(CatBasisKind(kind), alpha, n_max)
    except ValueError:
        _fail(f"options.state: unknown state {kind!r}")


def run_wigner(cfg):
    p = cfg.points()[0]
    opts = cfg.options
    n_primes = opts.get("n_prime", [0, 1, 2, 3])
    psi = wigner_state(opts, p.get("alpha", 2.0), 2 * max(n_primes, default=0))
    xs = np.linspace(opts.get("x_min", -4.0), opts.get("x_max", 4.0), int(opts.get("x_count", 81)))
    ps = np.linspace(opts.get("p_min", -4.0), opts.get("p_max", 4.0), int(opts.get("p_count", 81)))
    X, P = np.meshgrid(xs, ps, indexing="ij")
    rows = []
    for m in n_primes:
        v = fock.annihilate(psi, int(m))
        if np.vdot(v, v).real == 0:
            raise DomainError(f"n_prime={m} annihilates the state")
        v = fock.normalize(fock.pad(v, psi.size - 1))
        W = fock.wigner(np.outer(v, v.conj()), X, P)
        for i, j in np.ndindex(W.shape):
            rows.append(dict(n_prime=int(m), x=float(X[i, j]), p=float(P[i, j]), W=float(W[i, j])))
    summary = f"wigner grids for n' in {list(n_primes)} ({X.size} points each)"
    return rows, {}, {}, [], summary


SINGLE = dict(optimize_recovery=run_optimize, oracle_check=run_oracle, wigner_dump=run_wigner)


# ---------------------------------------------------------------------------
# output


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def validate_rows(rows):
    """Every probability (``P_s*``) and fidelity (``F_w*``, ``fidelity``) lies in ``[0, 1]``."""
    for r in rows:
        for k, v in r.items():
            if v is None or not (k.startswith("P_s") or k.startswith("F_w") or k == "fidelity"):
                continue
            if not (-RANGE_SLACK <= v <= 1.0 + RANGE_SLACK):
                raise ValueError(f"{k}={v} outside [0, 1]")


def write_csv(path, rows):
    cols = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r.get(k)) for k in cols])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def tolerances():
    return dict(
        fock_tail=fock.TAIL_TOL,
        gain_constraint=channels.CONSTRAINT_TOL,
        oracle_fidelity=oracle.FIDELITY_TOL,
        oracle_probability=oracle.PROBABILITY_TOL,
        oracle_equivalence=oracle.EQUIVALENCE_TOL,
        off_block=OFF_BLOCK_TOL,
        range_slack=RANGE_SLACK,
    )


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(type(o))


# ---------------------------------------------------------------------------
# driver


def _log(msg):
    print(msg, file=sys.stderr, flush=True)


def execute(cfg, out_dir, threads=1, strict=False):
    """Run a validated config; returns ``(exit code, summary line)``."""
    t0 = time.perf_counter()
    os.makedirs(out_dir, exist_ok=True)
    warnings = []
    residuals = {}
    extra = {}
    if cfg.scenario in SINGLE:
        if len(cfg.points()) != 1:
            _fail(f"scenario {cfg.scenario} takes single parameter values, not series")
        if cfg.scenario == "optimize_recovery" and threads != 1:
            cfg.ascent = AscentConfig(**{**asdict(cfg.ascent), "workers": threads})
        rows, extra, residuals, warnings, summary = SINGLE[cfg.scenario](cfg)
    else:
        tasks = [(cfg.scenario, p, cfg.options, cfg.ascent) for p in cfg.points()]
        rows, diags = [], []
        if threads != 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                for i, (r, d) in enumerate(pool.map(_evaluate, tasks)):
                    _log(f"[{i + 1}/{len(tasks)}] done")
                    rows += r
                    diags.append(d)
        else:
            for i, t in enumerate(tasks):
                r, d = _evaluate(t)
                _log(f"[{i + 1}/{len(tasks)}] {d['runtime_s']:.2f}s")
                rows += r
                diags.append(d)
        for d in diags:
            for k, v in d.items():
                if isinstance(v, bool) or k == "runtime_s":
                    continue
                best = residuals.get(k)
                worse = min if k == "cptp_min_eigenvalue" else max
                residuals[k] = v if best is None else worse(best, v)
        extra["point_runtimes_s"] = [d["runtime_s"] for d in diags]
        if any(d.get("off_block", 0.0) > OFF_BLOCK_TOL for d in diags):
            warnings.append(f"off-block parity mass above {OFF_BLOCK_TOL} at some points")
        if any(d.get("plateaued") is False for d in diags):
            warnings.append("some optimizer restarts hit max_steps before the fidelity plateau")
        summary = f"{cfg.scenario}: {len(rows)} rows from {len(tasks)} points"

    validate_rows(rows)
    csv_path = os.path.join(out_dir, f"{cfg.scenario}.csv")
    write_csv(csv_path, rows)
    manifest = dict(
        schema_version=SCHEMA_VERSION,
        scenario=cfg.scenario,
        version=__version__,
        seed=cfg.seed,
        config=cfg.raw,
        tolerances=tolerances(),
        residuals=residuals,
        warnings=warnings,
        notes=list(NOTES),
        outputs=[os.path.basename(csv_path)],
        wall_clock_s=time.perf_counter() - t0,
        timestamp=datetime.now(timezone.utc).isoformat(),
        **extra,
    )
    with open(os.path.join(out_dir, f"{cfg.scenario}.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, default=_jsonable)
    for w in warnings:
        _log(f"warning: {w}")
    if extra.get("failed"):
        return EXIT_CHECK_FAILED, summary
    if strict and warnings:
        return EXIT_CONVERGENCE, summary + " (strict: warnings present)"
    return EXIT_OK, summary


def build_parser():
    ap = argparse.ArgumentParser(prog="catsuppress", description="Cat-code error suppression experiments")
    sub = ap.add_subparsers(dest="scenario", required=True)
    for s in SCENARIOS:
        sp = sub.add_parser(s)
        sp.add_argument("--config", required=True, help="TOML config file")
        sp.add_argument("--out", help="output directory (default: config 'output' or ./results)")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--threads", type=int, default=1, help="worker processes, 0 = all cores")
        sp.add_argument("--strict", action="store_true", help="treat warnings as failures")
    return ap


def run(argv=None):
    """Parse arguments, run the scenario and return the exit code."""
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.scenario)
        if args.seed is not None:
            if args.seed < 0:
                _fail("--seed must be non-negative")
            cfg.seed = args.seed
            cfg.ascent = AscentConfig(**{**asdict(cfg.ascent), "seed": args.seed})
        threads = args.threads if args.threads > 0 else (os.cpu_count() or 1)
        code, summary = execute(cfg, args.out or cfg.output, threads, args.strict)
    except ConfigError as e:
        _log(f"config error: {e}")
        return EXIT_CONFIG
    except (DomainError, CutoffError, NoRealRootError) as e:
        _log(f"{type(e).__name__}: {e}")
        return EXIT_DOMAIN
    except ConvergenceError as e:
        _log(f"convergence failure: {e}")
        return EXIT_CONVERGENCE
    print(summary)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
