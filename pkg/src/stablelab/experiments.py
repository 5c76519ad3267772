"""Config-driven experiments with CSV/JSON reports.

Each experiment resolves its configuration, computes a data table, runs its
hard assertions and writes one report file.  Report headers carry the full
resolved config, the mathematical claim being exercised and one structured
``# assert`` line per assertion, so a report is self-describing and
:func:`report_summary` never recomputes anything.

Reports are byte-identical across reruns of the same (config, seed), except
for the ``# generated_at`` line.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import analytics, closedform, functionals, geometry, identities, spectral
from .config import ConfigError, ExperimentConfig
from .process import ProcessSpec, sample_path

__all__ = ["run", "report_summary", "RunResult"]

_SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class Assertion:
    name: str
    value: float
    bound: float
    direction: str  # "<=" or ">="

    @property
    def passed(self) -> bool:
        return self.value <= self.bound if self.direction == "<=" else self.value >= self.bound

    def header_line(self) -> str:
        return (
            f"# assert {self.name}: value={self.value:.12g} bound={self.bound:.12g} "
            f"dir={self.direction} pass={self.passed}"
        )


@dataclass(frozen=True)
class RunResult:
    status: int  # 0 pass, 1 assertion failure
    files: tuple
    assertions: tuple


def _spec(cfg: ExperimentConfig) -> ProcessSpec:
    return ProcessSpec(alpha=cfg["alpha"], dim=cfg["dim"])


def _domain(cfg: ExperimentConfig) -> geometry.Domain:
    shape = cfg.get("domain.shape", "fullspace")
    dim = cfg["dim"]
    if shape == "fullspace":
        return geometry.FullSpace(dim)
    if shape == "ball":
        return geometry.Ball((0.0,) * dim, cfg.get("domain.radius", 1.0))
    if shape == "interval":
        if dim != 1:
            raise ConfigError("domain.shape: interval needs dim = 1")
        return geometry.Interval(cfg.get("domain.a", -1.0), cfg.get("domain.b", 1.0))
    if shape == "shrinking-balls":
        return geometry.shrinking_ball_domain(dim, cfg.get("domain.n_max", 40))
    if shape == "disjoint-intervals":
        if dim != 1:
            raise ConfigError("domain.shape: disjoint-intervals needs dim = 1")
        return geometry.disjoint_shrinking_intervals(cfg.get("domain.n_max", 64))
    raise ConfigError(f"domain.shape: unsupported shape {shape!r}")


def _potential(cfg: ExperimentConfig) -> functionals.KillingPotential:
    kind = cfg.get("potential.kind", "none")
    if kind == "none":
        return functionals.KillingPotential.none()
    return functionals.KillingPotential.power(
        cfg.get("potential.c", 1.0),
        cfg.get("potential.gamma", 0.0),
        offset=cfg.get("potential.offset", 0.0),
    )


def _x0(cfg: ExperimentConfig) -> np.ndarray:
    x = np.asarray(cfg.get("x0", (0.0,) * cfg["dim"]), dtype=float)
    if x.size != cfg["dim"]:
        raise ConfigError(f"x0: needs {cfg['dim']} coordinates, got {x.size}")
    return x


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def _write_csv(path, cfg, claim, columns, rows, assertions) -> None:
    lines = [
        f"# schema_version: {_SCHEMA_VERSION}",
        f"# claim: {claim}",
        f"# generated_at: {datetime.now(timezone.utc).isoformat()}",
    ]
    lines += [f"# config: {ln}" for ln in cfg.resolved_lines()]
    lines += [a.header_line() for a in assertions]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path, cfg, claim, report: spectral.SpectralReport, assertions) -> None:
    import json

    payload = json.loads(report.to_json())
    payload["claim"] = claim
    payload["config"] = cfg.resolved_lines()
    payload["generated_at"] = datetime.now(timezone.utc).isoformat()
    payload["assertions"] = [
        {
            "name": a.name,
            "value": a.value,
            "bound": a.bound,
            "dir": a.direction,
            "pass": a.passed,
        }
        for a in assertions
    ]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# experiment bodies: each returns (claim, columns, rows, assertions)


def _run_sample_paths(cfg, out_dir):
    spec = _spec(cfg)
    claim = "trajectories are replayable functions of (spec, x0, t_max, h, seed)"
    files = []
    rows = []
    for k in range(cfg["n_paths"]):
        path = sample_path(spec, _x0(cfg), cfg.get("t_max", 1.0), cfg["h"], cfg["seed"] + k)
        fp = os.path.join(out_dir, f"path_{k:03d}.csv")
        path.to_csv(fp)
        files.append(fp)
        rows.append((k, cfg["seed"] + k, float(np.linalg.norm(path.positions[-1] - path.positions[0]))))
    return claim, ("path", "seed", "displacement"), rows, [], files


def _run_exit_time(cfg, out_dir):
    spec = _spec(cfg)
    domain = _domain(cfg)
    x0 = _x0(cfg)
    res = functionals.estimate_mean_exit_time(
        spec, x0, domain, cfg.get("t_max", 12.0), cfg["h"], cfg["n_paths"],
        cfg["seed"], threads=cfg["threads"],
    )
    claim = "mean exit time estimator, cross-checked in closed form where one exists"
    assertions = []
    oracle = None
    if isinstance(domain, geometry.Interval) and spec.is_brownian:
        oracle = closedform.brownian_interval_mean_exit(domain.a, domain.b, float(x0[0]))
    elif isinstance(domain, geometry.Interval) and not spec.is_brownian:
        half = (domain.b - domain.a) / 2.0
        mid = (domain.a + domain.b) / 2.0
        oracle = closedform.stable_interval_mean_exit(spec.alpha, half, float(x0[0]) - mid)
    elif isinstance(domain, geometry.Ball) and spec.is_brownian:
        dist = float(np.linalg.norm(x0 - np.asarray(domain.center)))
        oracle = closedform.brownian_ball_mean_exit(domain.radius, dist, spec.dim)
    if oracle is not None and oracle > 0.0:
        tol = max(3.0 * res.stderr, 0.01 * oracle)
        assertions.append(Assertion("exit_time_matches_oracle", abs(res.mean - oracle), tol, "<="))
    rows = [(
        "mean_exit_time", _fmt(float(x0[0])), res.mean, res.stderr, res.n_paths,
        res.step_h, res.seed, res.survived_fraction,
    )]
    return claim, ("quantity", "x0", "mean", "stderr", "n_paths", "h", "seed", "survived_fraction"), rows, assertions, []


def _run_tightness_scan(cfg, out_dir):
    spec = _spec(cfg)
    domain = _domain(cfg)
    probes = cfg["probes"]
    starts = np.zeros((len(probes), spec.dim))
    starts[:, 0] = probes
    scan = functionals.exit_time_scan(
        spec, starts, domain, cfg.get("t_max", 20.0), cfg["h"], cfg["n_paths"],
        cfg["seed"], threads=cfg["threads"],
    )
    r1 = np.array([r.mean for _, r in scan])
    claim = "the 1-resolvent of 1 decreases to zero along the probe sequence"
    assertions = [
        Assertion("r1_strictly_decreasing", float(np.max(np.diff(r1))), 0.0, "<="),
    ]
    rows = [
        (_fmt(p), m.mean, m.stderr, r.mean, r.stderr, cfg["n_paths"], cfg["h"], cfg["seed"])
        for p, (m, r) in zip(probes, scan)
    ]
    return claim, ("probe", "mean_exit", "exit_stderr", "r1", "r1_stderr", "n_paths", "h", "seed"), rows, assertions, []


def _run_dynkin(cfg, out_dir):
    spec = _spec(cfg)
    domain = _domain(cfg)
    f = (
        closedform.GaussianBump(cfg.get("f.param", 1.0))
        if cfg.get("f.kind", "gaussian") == "gaussian"
        else closedform.CauchyBump(cfg.get("f.param", 1.0))
    )
    res = identities.dynkin_residual(
        spec, _x0(cfg), f, cfg.get("t", 0.5), domain, cfg["h"], cfg["n_paths"], cfg["seed"]
    )
    claim = "semigroup decomposition over U: full = part + boundary term, residual at noise level"
    assertions = [Assertion("dynkin_residual_within_noise", abs(res.residual), 3.0 * res.stderr, "<=")]
    rows = [(
        res.residual, res.stderr, res.full_semigroup, res.part_semigroup,
        res.boundary_term, res.n_paths,
    )]
    return claim, ("residual", "stderr", "full", "part", "boundary", "n_paths"), rows, assertions, []


def _run_t_norm(cfg, out_dir):
    spec = _spec(cfg)
    pot = _potential(cfg)
    r_n = cfg.get("level.n", 6.0)
    r_m = cfg.get("level.m", 3.0)
    level = geometry.Interval(-r_n, r_n) if spec.dim == 1 else geometry.Ball((0.0,) * spec.dim, r_n)
    inner = np.linspace(-r_m, r_m, 13)[:, None]
    outer_abs = np.array([r_m * 1.05, r_m * 1.2, r_m * 1.5, r_m * 2.0, r_n])
    outer = np.concatenate([-outer_abs[::-1], outer_abs])[:, None]
    if spec.dim != 1:
        raise ConfigError("dim: t-norm-check is wired for dim = 1")
    bound = identities.t_norm_bound_check(
        spec, pot, level, inner, outer, cfg.get("t", 1.0), cfg["h"],
        cfg["n_paths"], cfg["seed"], threads=cfg["threads"],
    )
    claim = "boundary-operator norm <= compact-part sup + (4/t) * exterior lifetime sup"
    slack = 3.0 * math.sqrt(bound.lhs_stderr**2 + bound.rhs_stderr**2)
    assertions = [Assertion("t_norm_bound", bound.lhs, bound.rhs + slack, "<=")]
    t = cfg.get("t", 1.0)
    rows = [
        (r_n, r_m, t, float(x[0]), m, se, bound.lhs, bound.rhs, bound.passed)
        for x, m, se in zip(
            bound.probe_table.probes, bound.probe_table.means, bound.probe_table.stderrs
        )
    ]
    return claim, ("n", "m", "t", "x", "boundary_mean", "boundary_stderr",
                   "lhs", "rhs", "pass"), rows, assertions, []


def _spectra_generator(cfg) -> spectral.GeneratorMatrix:
    grid = spectral.Grid1D.symmetric(cfg.get("grid.radius", 12.0), cfg.get("grid.delta", 0.02))
    base = spectral.dirichlet_laplacian(grid)
    alpha = cfg["alpha"]
    pot = _potential(cfg)
    wbeta = cfg.get("weight.beta")
    if wbeta is not None:
        return spectral.weighted_generator(base, functionals.TimeChangeWeight(beta=wbeta), alpha)
    gen = base if alpha == 2.0 else spectral.fractional_power(base, alpha)
    if not pot.is_none:
        gen = spectral.killed_generator(gen, pot)
    return gen


def _run_spectra(cfg, out_dir):
    gen = _spectra_generator(cfg)
    times = cfg.get("times", (0.5, 1.0))
    traces = [spectral.heat_trace(gen, t) for t in times]
    rates = spectral.lp_spectral_bound_compare(gen, (times[-1] * 4, times[-1] * 8))
    p = spectral.semigroup_matrix(gen, times[0])
    claim = "discretized generator yields a symmetric sub-Markov semigroup with discrete spectrum"
    assertions = [
        Assertion("semigroup_entries_nonnegative", float(p.min()), -1e-12, ">="),
        Assertion("semigroup_row_sums_submarkov", float(p.sum(axis=1).max()), 1.0 + 1e-10, "<="),
        Assertion("lp_duality_exact", abs(rates.rates_1[-1] - rates.rates_inf[-1]), 0.0, "<="),
    ]
    report = spectral.SpectralReport(
        eigenvalues=tuple(float(v) for v in gen.eigenvalues[: min(64, gen.n)]),
        trace_times=tuple(times),
        trace_values=tuple(float(tr) for tr in traces),
        lp_rates={
            "t_grid": list(rates.t_grid),
            "p1": list(rates.rates_1),
            "p2": list(rates.rates_2),
            "pinf": list(rates.rates_inf),
        },
        diagnostics={"n": gen.n, "delta": gen.delta},
    )
    # plot-ready CSV companion to the JSON report
    eig_path = os.path.join(out_dir, "spectra_eigenvalues.csv")
    _write_csv(
        eig_path, cfg, claim, ("k", "eigenvalue"),
        list(enumerate(report.eigenvalues, start=1)), [],
    )
    return claim, report, assertions, eig_path


def _run_trace_study(cfg, out_dir):
    delta = cfg.get("grid.delta", 0.01)
    t = cfg.get("trace.t", 0.01)
    n_list = cfg.get("n_list", (8, 16, 32, 64))
    rows = []
    traces = []
    tail2 = []
    for n in n_list:
        dom = geometry.disjoint_shrinking_intervals(n)
        tr = spectral.union_interval_trace(dom, delta, t)
        half = dom.segments[-1, 1] - dom.segments[-1, 0]
        traces.append(tr)
        tail2.append((half / 2.0) ** 2)
        rows.append((n, tr, (half / 2.0) ** 2))
    growth_last = traces[-1] / traces[-2] - 1.0
    tail_ratio = tail2[-1] / tail2[0]
    claim = "heat trace grows per interval doubling while the tail exit-time bound shrinks"
    assertions = [
        Assertion("trace_growth_at_largest_doubling", growth_last, 0.20, ">="),
        Assertion("tail_exit_bound_ratio", tail_ratio, 0.20, "<="),
    ]
    return claim, ("n_intervals", "heat_trace", "tail_half_length_sq"), rows, assertions, []


def _run_beta_transition(cfg, out_dir):
    alpha = cfg["alpha"]
    radii = cfg.get("radii", (20.0, 40.0, 80.0))
    betas = cfg.get("betas", (2.0, 0.5))
    delta = cfg.get("grid.delta", 0.05)
    rows = []
    assertions = []
    claim = "weighted-generator spectral gap stabilizes in R iff the weight exponent exceeds alpha"
    study = spectral.weighted_transition_study(alpha, betas, radii, delta)
    for beta in study["betas"]:
        for r, eigs in zip(radii, study["eigenvalues"][beta]):
            rows.append((beta, r) + tuple(eigs))
        gap = study["gap"][beta]
        rel = abs(gap[-1] - gap[-2]) / gap[-2]
        if beta > alpha:
            assertions.append(Assertion(f"gap_stabilizes_beta_{beta:g}", rel, 0.01, "<="))
        else:
            assertions.append(Assertion(f"gap_decays_beta_{beta:g}", rel, 0.20, ">="))
            assertions.append(
                Assertion(f"gap_decreasing_beta_{beta:g}", float(np.max(np.diff(gap))), 0.0, "<=")
            )
    return claim, ("beta", "R", "eig0", "eig1"), rows, assertions, []


def _run_theorem4_scan(cfg, out_dir):
    spec = _spec(cfg)
    domain = geometry.shrinking_ball_domain(spec.dim, cfg.get("domain.n_max", 40))
    probes = cfg["probes"]
    starts = np.zeros((len(probes), spec.dim))
    starts[:, 0] = probes
    scan = functionals.exit_time_scan(
        spec, starts, domain, cfg.get("t_max", 20.0), cfg["h"], cfg["n_paths"],
        cfg["seed"], threads=cfg["threads"],
    )
    et = np.array([m.mean for m, _ in scan])
    r1 = np.array([r.mean for _, r in scan])
    claim = "mean exit time and the 1-resolvent of 1 decrease together along the shrinking balls"
    assertions = [
        Assertion("exit_time_strictly_decreasing", float(np.max(np.diff(et))), 0.0, "<="),
        Assertion("r1_strictly_decreasing", float(np.max(np.diff(r1))), 0.0, "<="),
        Assertion(
            "trend_agreement",
            float(np.min(np.sign(np.diff(et)) * np.sign(np.diff(r1)))),
            1.0,
            ">=",
        ),
    ]
    rows = [
        (int(p), _fmt(float(p)), m.mean, m.stderr, r.mean, r.stderr)
        for p, (m, r) in zip(probes, scan)
    ]
    return claim, ("n", "x_first_coord", "mean_exit", "exit_stderr", "r1", "r1_stderr"), rows, assertions, []


def _run_resolvent_bounds(cfg, out_dir):
    alpha = cfg["alpha"]
    beta = cfg.get("weight.beta", 1.0)
    probes = cfg.get("probes", (1.0, 2.0, 4.0, 8.0, 16.0))
    table = analytics.r0_mu_bound_check(
        functionals.TimeChangeWeight(beta=beta), cfg["dim"], alpha, probes
    )
    claim = "0-resolvent mass is dominated by the Green-weighted singular integral"
    assertions = [
        Assertion("resolvent_below_bound", float(np.max(table.resolvent - table.bound)), 1e-6, "<=")
    ]
    if table.decay_checked:
        assertions.append(
            Assertion("columns_decay", float(np.max(np.diff(table.resolvent))), 0.0, "<=")
        )
    rows = [
        (_fmt(float(x)), r, b)
        for x, r, b in zip(table.probes, table.resolvent, table.bound)
    ]
    return claim, ("x", "r0_quadrature", "green_j_bound"), rows, assertions, []


_RUNNERS = {
    "sample-paths": _run_sample_paths,
    "exit-time": _run_exit_time,
    "tightness-scan": _run_tightness_scan,
    "dynkin-check": _run_dynkin,
    "t-norm-check": _run_t_norm,
    "trace-study": _run_trace_study,
    "beta-transition": _run_beta_transition,
    "theorem4-scan": _run_theorem4_scan,
    "resolvent-bounds": _run_resolvent_bounds,
}


def _write_rows_json(path, cfg, claim, columns, rows, assertions) -> None:
    import json

    payload = {
        "schema_version": _SCHEMA_VERSION,
        "claim": claim,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "config": cfg.resolved_lines(),
        "columns": list(columns),
        "rows": [[v if not isinstance(v, (np.floating, np.integer)) else v.item() for v in row] for row in rows],
        "assertions": [
            {"name": a.name, "value": a.value, "bound": a.bound, "dir": a.direction, "pass": a.passed}
            for a in assertions
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(cfg: ExperimentConfig, out_dir: str, fmt: str = "csv") -> RunResult:
    """Execute one experiment; returns exit status and report files."""
    os.makedirs(out_dir, exist_ok=True)
    if cfg.experiment == "spectra":
        claim, report, assertions, eig_path = _run_spectra(cfg, out_dir)
        path = os.path.join(out_dir, "spectra.json")
        _write_json(path, cfg, claim, report, assertions)
        files = (path, eig_path)
    else:
        runner = _RUNNERS[cfg.experiment]
        claim, columns, rows, assertions, extra = runner(cfg, out_dir)
        if fmt == "json":
            path = os.path.join(out_dir, f"{cfg.experiment}.json")
            _write_rows_json(path, cfg, claim, columns, rows, assertions)
        else:
            path = os.path.join(out_dir, f"{cfg.experiment}.csv")
            _write_csv(path, cfg, claim, columns, rows, assertions)
        files = tuple([path] + list(extra))
    status = 0 if all(a.passed for a in assertions) else 1
    return RunResult(status=status, files=files, assertions=tuple(assertions))


def _parse_assert_line(line: str) -> dict:
    body = line[len("# assert "):]
    name, _, rest = body.partition(":")
    fields = dict(p.split("=", 1) for p in rest.split())
    return {
        "name": name.strip(),
        "value": float(fields["value"]),
        "bound": float(fields["bound"]),
        "dir": fields["dir"],
        "pass": fields["pass"] == "True",
    }


def report_summary(paths) -> str:
    """Human-readable pass/fail table built from report files alone.

    Pure formatting: nothing is recomputed.  Output is byte-stable for the
    same inputs (the volatile generated_at header is ignored).
    """
    import json

    rows = []
    for path in paths:
        if not os.path.exists(path):
            raise FileNotFoundError(f"report file missing: {path}")
        name = os.path.basename(path)
        if path.endswith(".json"):
            with open(path) as fh:
                try:
                    payload = json.load(fh)
                except json.JSONDecodeError as exc:
                    raise ValueError(f"corrupt report file {path}: {exc}") from exc
            for a in payload.get("assertions", []):
                rows.append((name, a["name"], a["value"], a["bound"], a["dir"], a["pass"]))
        else:
            with open(path) as fh:
                for line in fh:
                    if line.startswith("# assert "):
                        a = _parse_assert_line(line.rstrip("\n"))
                        rows.append((name, a["name"], a["value"], a["bound"], a["dir"], a["pass"]))
    lines = []
    if not rows:
        lines.append("no assertions recorded in the given reports")
        lines.append("overall: PASS (vacuous)")
        return "\n".join(lines)
    width = max(len(r[1]) for r in rows)
    for name, aname, value, bound, d, ok in rows:
        lines.append(
            f"{'PASS' if ok else 'FAIL'}  {aname:<{width}}  value={value:.6g} {d} bound={bound:.6g}  [{name}]"
        )
    overall = all(r[5] for r in rows)
    lines.append(f"overall: {'PASS' if overall else 'FAIL'}")
    return "\n".join(lines)
