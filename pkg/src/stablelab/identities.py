"""Numerical checks of the semigroup decomposition machinery.

The operating identity is the decomposition of the semigroup over an open
set U,

    p_t f(x) = p_t^U f(x) + E_x[ p_{t - tau_U} f(X_{tau_U}) ; tau_U <= t ],

splitting the evolution into the part process and a boundary contribution.
``dynkin_residual`` measures how far sampled paths are from satisfying it,
with the inner semigroup p_s f supplied by a closed-form oracle rather than
by restarting paths (a restart would only test the sampler's Markov
property, not the identity).

The boundary operator T_{n,t} f(x) = E_x[p_{t-tau_n} f(X_{tau_n}); tau_n <= t]
over an exhaustion level U_n has positive kernel, so its sup-norm is attained
at f = 1 and is estimated as a max over a documented probe grid; the grid
stands in for the sup over all of E and its density is a reported parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closedform import CauchyBump, GaussianBump
from .functionals import (
    KillingPotential,
    UnsupportedConfiguration,
    _fk_engine,
    estimate_killed_lifetime_mean,
)
from .geometry import Domain, FullSpace, Interval
from .process import PathBatch, ProcessSpec, sample_increments, stream

__all__ = [
    "DynkinResidual",
    "BoundaryTermEstimate",
    "TNormBound",
    "dynkin_residual",
    "boundary_term",
    "estimate_T_norm",
    "t_norm_bound_check",
    "subprocess_commute_check",
]


@dataclass(frozen=True)
class DynkinResidual:
    """Decomposition residual with the three estimated pieces."""

    residual: float
    stderr: float
    full_semigroup: float
    part_semigroup: float
    boundary_term: float
    n_paths: int

    @property
    def within(self) -> float:
        """|residual| in units of its stderr (0 stderr means exact)."""
        if self.stderr == 0.0:
            return 0.0 if self.residual == 0.0 else math.inf
        return abs(self.residual) / self.stderr


def _heat_oracle(spec: ProcessSpec, f):
    """Closed-form s -> p_s f, or raise when no oracle exists."""
    if spec.is_brownian and isinstance(f, GaussianBump):
        return lambda s, x: f.heat(s, x, dim=spec.dim)
    if spec.alpha == 1.0 and spec.dim == 1 and isinstance(f, CauchyBump):
        return lambda s, x: f.heat(s, x)
    raise UnsupportedConfiguration(
        "dynkin_residual needs a closed-form inner semigroup: "
        "alpha=2 with a GaussianBump, or alpha=1 in d=1 with a CauchyBump"
    )


def dynkin_residual(
    spec: ProcessSpec,
    x0,
    f,
    t: float,
    domain: Domain,
    h: float,
    n_paths: int,
    seed: int,
) -> DynkinResidual:
    """Estimate p_t f(x0) - p_t^U f(x0) - boundary term on shared paths.

    All three pieces come from the same ensemble, so the residual's
    per-path variance is the right yardstick.  The inner semigroup value
    p_{t-tau} f(X_tau) is evaluated by the closed-form oracle.  For
    Brownian paths on an interval, exits between grid points are detected
    with the bridge correction and the exit position is the crossed
    endpoint; exit times sit mid-step (O(h), inside the noise at the
    default settings).
    """
    oracle = _heat_oracle(spec, f)
    if isinstance(domain, FullSpace):
        return DynkinResidual(0.0, 0.0, math.nan, math.nan, 0.0, n_paths)
    if not (spec.dim == 1 and isinstance(domain, Interval)):
        raise UnsupportedConfiguration(
            "dynkin_residual supports U = FullSpace or a 1D interval"
        )
    if not domain.contains_point(np.atleast_1d(x0)):
        raise ValueError("x0 must lie inside U")
    n_steps = int(round(t / h))
    rng = stream(seed)
    x = np.full(n_paths, float(np.atleast_1d(x0)[0]))
    alive = np.ones(n_paths, dtype=bool)  # "not exited yet"; paths continue after exit
    exit_pos = np.zeros(n_paths)
    exit_time = np.zeros(n_paths)
    use_bridge = spec.is_brownian
    a, b = domain.a, domain.b
    for k in range(n_steps):
        step = sample_increments(spec, h, rng, n_paths)[:, 0]
        new_x = x + step
        t_now = (k + 1) * h
        if use_bridge:
            out_lo = alive & (new_x <= a)
            out_hi = alive & (new_x >= b)
            inside = alive & ~out_lo & ~out_hi
            p_lo = np.exp(-2.0 * (x - a) * (new_x - a) / h)
            p_hi = np.exp(-2.0 * (b - x) * (b - new_x) / h)
            u = rng.random(n_paths)
            cross_lo = inside & (u < p_lo)
            cross_hi = inside & ~cross_lo & (u < p_lo + p_hi)
            for mask, pos in ((out_lo | cross_lo, a), (out_hi | cross_hi, b)):
                exit_pos[mask] = pos
                exit_time[mask] = t_now - h / 2.0
                alive &= ~mask
        else:
            out = alive & ((new_x <= a) | (new_x >= b))
            exit_pos[out] = new_x[out]
            exit_time[out] = t_now
            alive &= ~out
        x = new_x
    exited = ~alive
    f_end = np.asarray(f(x), dtype=float)
    full_vals = f_end
    part_vals = np.where(exited, 0.0, f_end)
    bnd_vals = np.zeros(n_paths)
    if exited.any():
        bnd_vals[exited] = oracle(t - exit_time[exited], exit_pos[exited])
    res_vals = full_vals - part_vals - bnd_vals
    return DynkinResidual(
        residual=float(res_vals.mean()),
        stderr=float(res_vals.std(ddof=0) / math.sqrt(n_paths)),
        full_semigroup=float(full_vals.mean()),
        part_semigroup=float(part_vals.mean()),
        boundary_term=float(bnd_vals.mean()),
        n_paths=n_paths,
    )


@dataclass(frozen=True)
class BoundaryTermEstimate:
    """T_{n,t} 1 over a probe grid: per-probe means and standard errors."""

    level: Domain
    t: float
    probes: np.ndarray
    means: np.ndarray
    stderrs: np.ndarray

    @property
    def sup(self) -> float:
        return float(self.means.max())

    @property
    def sup_stderr(self) -> float:
        return float(self.stderrs[int(self.means.argmax())])


def boundary_term(
    spec: ProcessSpec,
    level: Domain,
    t: float,
    probes,
    h: float,
    n_paths: int,
    seed: int,
    potential: KillingPotential | None = None,
    threads: int = 1,
) -> BoundaryTermEstimate:
    """Estimate T_{n,t} 1(x) = E_x[p_{t-tau_n} 1(X_{tau_n}); tau_n <= t].

    By the Markov property this equals E_x[w_t ; tau_n <= t] on continued
    paths, where w is the killing weight (identically 1 for a conservative
    process, exp(-A_t) under a potential).  Values at probes are estimated
    from independent ensembles per probe.
    """
    pot = potential if potential is not None else KillingPotential.none()
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    out = _fk_engine(
        spec, probes, pot, h, t, n_paths, seed,
        capture_time=t, level=level, threads=threads,
    )
    cap = out["captured"]
    return BoundaryTermEstimate(
        level=level,
        t=t,
        probes=probes,
        means=cap.mean(axis=1),
        stderrs=cap.std(axis=1, ddof=0) / math.sqrt(n_paths),
    )


def estimate_T_norm(
    spec: ProcessSpec,
    level: Domain,
    t: float,
    probes,
    h: float,
    n_paths: int,
    seed: int,
    potential: KillingPotential | None = None,
    threads: int = 1,
) -> tuple[float, BoundaryTermEstimate]:
    """Operator norm of T_{n,t} on bounded functions.

    The kernel is positive, so the norm equals sup_x T_{n,t} 1(x); the sup
    is proxied by the max over the probe grid.  Returns (norm estimate,
    full per-probe table).
    """
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    if probes.shape[0] == 0:
        raise ValueError("probe grid must be nonempty")
    table = boundary_term(
        spec, level, t, probes, h, n_paths, seed, potential, threads
    )
    return table.sup, table


@dataclass(frozen=True)
class TNormBound:
    """Two sides of the boundary-operator norm bound, with noise allowance."""

    lhs: float
    lhs_stderr: float
    rhs: float
    rhs_stderr: float
    compact_part: float
    tail_part: float
    passed: bool
    probe_table: BoundaryTermEstimate | None = None


def t_norm_bound_check(
    spec: ProcessSpec,
    potential: KillingPotential,
    level_n: Domain,
    inner_probes,
    outer_probes,
    t: float,
    h: float,
    n_paths: int,
    seed: int,
    threads: int = 1,
    zeta_t_max: float = 6.0,
) -> TNormBound:
    """Check ||T_{n,t}|| <= sup_{K_m} T_{n,t} 1 + (4/t) sup_{E \\ K_m} E[zeta].

    ``inner_probes`` sample the compact K_m, ``outer_probes`` its complement;
    the left side takes the sup over both grids.  Requires a killing
    potential: without one the lifetime is infinite and the right side is
    vacuous, so the configuration is rejected.
    """
    if potential is None or potential.is_none:
        raise UnsupportedConfiguration(
            "t_norm_bound_check needs finite lifetimes: supply a killing "
            "potential (a conservative process has E[zeta] = infinity)"
        )
    inner = np.atleast_2d(np.asarray(inner_probes, dtype=float))
    outer = np.atleast_2d(np.asarray(outer_probes, dtype=float))
    allp = np.vstack([inner, outer])
    lhs, table = estimate_T_norm(
        spec, level_n, t, allp, h, n_paths, seed, potential, threads
    )
    compact_part = float(table.means[: inner.shape[0]].max())
    compact_se = float(table.stderrs[: inner.shape[0]][
        int(table.means[: inner.shape[0]].argmax())
    ])
    zeta_means = []
    zeta_ses = []
    for i, x in enumerate(outer):
        r = estimate_killed_lifetime_mean(
            spec, x, potential, h, n_paths, seed + 1000 + i,
            t_max=zeta_t_max, threads=threads,
        )
        zeta_means.append(r.tail_corrected_mean)
        zeta_ses.append(r.stderr)
    j = int(np.argmax(zeta_means))
    tail_part = (4.0 / t) * zeta_means[j]
    rhs = compact_part + tail_part
    rhs_se = math.sqrt(compact_se**2 + (4.0 / t) ** 2 * zeta_ses[j] ** 2)
    slack = 3.0 * math.sqrt(table.sup_stderr**2 + rhs_se**2)
    return TNormBound(
        lhs=lhs,
        lhs_stderr=table.sup_stderr,
        rhs=rhs,
        rhs_stderr=rhs_se,
        compact_part=compact_part,
        tail_part=tail_part,
        passed=bool(lhs <= rhs + slack),
        probe_table=table,
    )


def subprocess_commute_check(
    batch: PathBatch,
    level: Domain,
    t: float,
    f,
    potential: KillingPotential | None = None,
) -> float:
    """Algebraic identity of the 1-subprocess: T^(1)_{n,t} f = e^{-t} T_{n,t} f.

    The unit-rate subprocess is realized as the deterministic weight e^{-t}
    on the same paths, so the two estimators share every sample and may
    differ only by floating-point association.  Returns the relative
    deviation, which must sit at rounding scale.
    """
    h = batch.step_h
    n_cap = int(round(t / h))
    if n_cap > batch.positions.shape[1] - 1:
        raise ValueError("t exceeds the batch horizon")
    pos = batch.positions
    inside = level.contains(pos[:, : n_cap + 1].reshape(-1, pos.shape[2])).reshape(
        pos.shape[0], n_cap + 1
    )
    exited = ~inside.all(axis=1)
    end = pos[:, n_cap]
    weights = np.ones(pos.shape[0])
    if potential is not None and not potential.is_none:
        v = potential(pos[:, :n_cap].reshape(-1, pos.shape[2])).reshape(
            pos.shape[0], n_cap
        )
        weights = np.exp(-h * v.sum(axis=1))
    vals = weights * np.asarray(f(end), dtype=float) * exited
    sub_estimate = float(np.mean(math.exp(-t) * vals))
    scaled_estimate = math.exp(-t) * float(np.mean(vals))
    denom = max(abs(scaled_estimate), 1e-300)
    return abs(sub_estimate - scaled_estimate) / denom
