"""Monte Carlo estimators and scaling diagnostics for dominance persistence.

The central quantity is the persistence probability: the chance that the
fittest type alive at time ``alpha * t`` is still the fittest at time ``t``.
Two estimators are provided.  The direct one scores the indicator that the
record holder's identity matches at both instants.  The conditional one
exploits that fitness marks are i.i.d. and independent of the birth/death
skeleton: given the skeleton, the match probability is exactly
``S(alpha t) / S(t)`` where ``S`` counts types ever born, because each of the
``S(t)`` marks is equally likely to be the largest.  Averaging that ratio is
therefore an exact conditional expectation of the direct indicator and never
has larger variance (both estimators share replicates when run paired).

Replicate ``k`` always simulates with ``derive_seed(master_seed, k)``, so
matched master seeds mean matched trajectories across estimator variants,
horizons, and fractions ``alpha``.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .errors import ExplosionError
from .population import (
    DEFAULT_MAX_EVENTS,
    DEFAULT_MAX_POPULATION,
    SimConfig,
    simulate,
    simulate_counts,
)
from .seeding import derive_seed


@dataclass(frozen=True)
class PersistenceEstimate:
    """Point estimate of the persistence probability at one grid point."""

    lam: float
    alpha: float
    t: float
    replicates: int
    estimator: str  # "direct" | "conditional"
    point: float
    std_err: float
    master_seed: int

    def __post_init__(self):
        # normalize numpy scalars so serialization stays plain
        for name in ("lam", "alpha", "t", "point", "std_err"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("replicates", "master_seed"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if not 0.0 <= self.point <= 1.0:
            raise ValueError("persistence estimates live in [0, 1]")
        if self.std_err < 0:
            raise ValueError("standard errors are non-negative")


def _validate_grid(alphas, t) -> list[float]:
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ValueError("need at least one alpha")
    if any(not 0.0 < a < 1.0 for a in alphas):
        raise ValueError("alpha must lie strictly between 0 and 1")
    if sorted(set(alphas)) != alphas:
        raise ValueError("alphas must be strictly increasing")
    if not t > 0:
        raise ValueError("t must be positive")
    return alphas


def _persistence_pass(
    lam: float,
    alphas: list[float],
    t: float,
    replicates: int,
    master_seed: int,
    max_events: int,
    max_population: int,
):
    """Simulate the replicates once; return per-alpha ratios and match flags."""
    if replicates < 1:
        raise ValueError("replicates must be positive")
    times = [a * t for a in alphas] + [t]
    n_alpha = len(alphas)
    ratios = np.empty((replicates, n_alpha))
    matches = np.empty((replicates, n_alpha), dtype=bool)
    for k in range(replicates):
        cfg = SimConfig(
            lam=lam,
            horizon=t,
            seed=derive_seed(master_seed, k),
            max_events=max_events,
            max_population=max_population,
        )
        try:
            res = simulate(
                cfg, snapshot_times=times, keep_events=False, keep_ledger=False
            )
        except ExplosionError as err:
            raise ExplosionError(
                f"replicate {k}: {err}",
                cap_name=err.cap_name,
                cap_value=err.cap_value,
                partial=err.partial,
            ) from err
        end = res.snapshots[-1]
        for j in range(n_alpha):
            snap = res.snapshots[j]
            ratios[k, j] = snap.births_total / end.births_total
            matches[k, j] = snap.max_id == end.max_id
    return ratios, matches


def _direct_estimate(lam, alpha, t, master_seed, matches) -> PersistenceEstimate:
    r = matches.shape[0]
    p = float(np.mean(matches))
    se = float(np.sqrt(p * (1.0 - p) / r))
    return PersistenceEstimate(
        lam=lam, alpha=alpha, t=t, replicates=r, estimator="direct",
        point=p, std_err=se, master_seed=master_seed,
    )


def _conditional_estimate(lam, alpha, t, master_seed, ratios) -> PersistenceEstimate:
    r = ratios.shape[0]
    point = float(np.mean(ratios))
    se = float(np.std(ratios, ddof=1) / np.sqrt(r)) if r > 1 else 0.0
    return PersistenceEstimate(
        lam=lam, alpha=alpha, t=t, replicates=r, estimator="conditional",
        point=point, std_err=se, master_seed=master_seed,
    )


def persistence_grid(
    lam: float,
    alphas,
    t: float,
    replicates: int,
    master_seed: int,
    estimator: str = "conditional",
    *,
    max_events: int = DEFAULT_MAX_EVENTS,
    max_population: int = DEFAULT_MAX_POPULATION,
) -> list[PersistenceEstimate]:
    """Estimates for several alphas from one shared set of trajectories.

    With ``estimator="both"`` the direct and conditional rows for each alpha
    come from the same replicates (matched trajectories), direct first.
    """
    alphas = _validate_grid(alphas, t)
    if estimator not in ("direct", "conditional", "both"):
        raise ValueError(f"unknown estimator {estimator!r}")
    ratios, matches = _persistence_pass(
        lam, alphas, t, replicates, master_seed, max_events, max_population
    )
    out: list[PersistenceEstimate] = []
    for j, alpha in enumerate(alphas):
        if estimator in ("direct", "both"):
            out.append(_direct_estimate(lam, alpha, t, master_seed, matches[:, j]))
        if estimator in ("conditional", "both"):
            out.append(_conditional_estimate(lam, alpha, t, master_seed, ratios[:, j]))
    return out


def persistence_direct(
    lam: float, alpha: float, t: float, replicates: int, master_seed: int, **caps
) -> PersistenceEstimate:
    """Indicator estimator: record-holder identity matches at alpha*t and t."""
    (est,) = persistence_grid(
        lam, [alpha], t, replicates, master_seed, estimator="direct", **caps
    )
    return est


def persistence_conditional(
    lam: float, alpha: float, t: float, replicates: int, master_seed: int, **caps
) -> PersistenceEstimate:
    """Skeleton-exact estimator: average of ``S(alpha t) / S(t)``."""
    (est,) = persistence_grid(
        lam, [alpha], t, replicates, master_seed, estimator="conditional", **caps
    )
    return est


def persistence_paired(
    lam: float, alpha: float, t: float, replicates: int, master_seed: int, **caps
) -> tuple[PersistenceEstimate, PersistenceEstimate]:
    """(direct, conditional) from the same trajectories."""
    direct, conditional = persistence_grid(
        lam, [alpha], t, replicates, master_seed, estimator="both", **caps
    )
    return direct, conditional


class CycleRegime(enum.Enum):
    """Which renewal structure a cycle sample follows.

    ``RETURN_TO_ONE``: excursions between successive visits of the size chain
    to 1 (i.i.d.; certain to end only for ``lam <= 1``, heavy tailed at 1).
    ``FIRST_PASSAGE``: climbs from a level to the next (supercritical).
    """

    RETURN_TO_ONE = "return_to_one"
    FIRST_PASSAGE = "first_passage"


@dataclass(frozen=True)
class CycleSample:
    """One cycle: its duration and the number of new types born in it."""

    regime: CycleRegime
    level: int
    duration: float
    births: int

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("cycle durations are positive")
        if self.births < 1:
            raise ValueError("every cycle contains at least one birth")


@dataclass
class CycleSamples:
    """Completed cycle samples plus the count of cap-truncated ones.

    Truncated cycles are excluded, never imputed; ``requested`` minus
    ``truncated`` equals the number of rows kept.
    """

    regime: CycleRegime
    lam: float
    level: int
    durations: np.ndarray
    births: np.ndarray
    truncated: int
    requested: int

    def __len__(self) -> int:
        return self.durations.shape[0]

    def __getitem__(self, i: int) -> CycleSample:
        return CycleSample(
            regime=self.regime,
            level=self.level,
            duration=float(self.durations[i]),
            births=int(self.births[i]),
        )


def sample_cycles(
    lam: float,
    regime: CycleRegime,
    count: int,
    rng: np.random.Generator,
    *,
    level: int = 1,
    max_events: int = 10_000_000,
) -> CycleSamples:
    """Draw independent cycle samples under the given regime.

    ``level`` only applies to ``FIRST_PASSAGE`` (the climb ``level`` to
    ``level + 1``); floor-return cycles always start and end at size 1.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if regime is CycleRegime.RETURN_TO_ONE:
        if lam > 1.0:
            raise ValueError(
                "return-to-floor cycles need lam <= 1; the supercritical chain "
                "drifts away from the floor"
            )
    elif regime is CycleRegime.FIRST_PASSAGE:
        if not lam > 1.0:
            raise ValueError("first-passage cycles need lam > 1")
        if level < 1:
            raise ValueError("level must be at least 1")
    else:  # pragma: no cover
        raise ValueError(f"unknown regime {regime!r}")

    durations = []
    births = []
    truncated = 0
    for _ in range(count):
        if regime is CycleRegime.RETURN_TO_ONE:
            tau, sigma, _steps, capped = _kernels.cycle_kernel(rng, lam, max_events)
        else:
            tau, sigma, _steps, capped = _kernels.hit_kernel(
                rng, lam, level, level + 1, max_events
            )
        if capped:
            truncated += 1
        else:
            durations.append(tau)
            births.append(sigma)
    return CycleSamples(
        regime=regime,
        lam=lam,
        level=level if regime is CycleRegime.FIRST_PASSAGE else 1,
        durations=np.asarray(durations, dtype=np.float64),
        births=np.asarray(births, dtype=np.int64),
        truncated=truncated,
        requested=count,
    )


def sample_hitting_times(
    count: int, rng: np.random.Generator, *, max_events: int = 100_000_000
) -> tuple[np.ndarray, int]:
    """Simulated critical (lam = 1) drop times from size 2 to size 1.

    Returns the sampled durations and how many hit the event cap (those are
    returned too, as lower bounds, since the law has no mean).
    """
    out = np.empty(count)
    capped_n = 0
    for i in range(count):
        tau, _births, _steps, capped = _kernels.hit_kernel(
            rng, 1.0, 2, 1, max_events
        )
        out[i] = tau
        capped_n += capped
    return out, capped_n


@dataclass
class ScalingDiagnostic:
    """Per-replicate trajectories of one scaling statistic over a grid.

    ``values`` has one row per completed replicate, one column per grid time;
    cap-truncated replicates are excluded and counted in ``truncated``.
    """

    name: str
    lam: float
    grid: np.ndarray
    values: np.ndarray
    truncated: int
    replicates: int
    master_seed: int

    @property
    def median(self) -> np.ndarray:
        return np.median(self.values, axis=0)

    @property
    def quartiles(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.percentile(self.values, 25, axis=0),
            np.percentile(self.values, 75, axis=0),
        )

    def to_csv(self, path) -> None:
        lower, upper = self.quartiles
        med = self.median
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("t,median,q25,q75\n")
            for j in range(self.grid.shape[0]):
                fh.write(
                    f"{float(self.grid[j])!r},{float(med[j])!r},"
                    f"{float(lower[j])!r},{float(upper[j])!r}\n"
                )


def diagnose_growth(
    lam: float,
    t_grid,
    replicates: int,
    master_seed: int,
    *,
    max_events: int = DEFAULT_MAX_EVENTS,
    max_population: int = DEFAULT_MAX_POPULATION,
) -> ScalingDiagnostic:
    """Track ``exp(-(lam - 1) t) * (n(t) - 1)`` per replicate over a grid.

    For ``lam > 1`` the statistic stays bounded along each trajectory; tests
    assert its per-replicate range is tame rather than trending upward.  One
    trajectory per replicate is reused across the whole grid.
    """
    if not lam > 1.0:
        raise ValueError("growth diagnostics need lam > 1")
    grid = np.asarray(t_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("t_grid must be non-empty and strictly increasing")
    values = np.empty((replicates, grid.size))
    for k in range(replicates):
        cfg = SimConfig(
            lam=lam,
            horizon=float(grid[-1]),
            seed=derive_seed(master_seed, k),
            max_events=max_events,
            max_population=max_population,
        )
        try:
            res = simulate_counts(cfg, snapshot_times=grid)
        except ExplosionError as err:
            raise ExplosionError(
                f"replicate {k}: {err}",
                cap_name=err.cap_name,
                cap_value=err.cap_value,
                partial=err.partial,
            ) from err
        for j, snap in enumerate(res.snapshots):
            values[k, j] = np.exp(-(lam - 1.0) * snap.time) * (snap.size - 1)
    return ScalingDiagnostic(
        name="scaled_population_excess",
        lam=lam,
        grid=grid,
        values=values,
        truncated=0,
        replicates=replicates,
        master_seed=master_seed,
    )


def diagnose_critical(
    t_grid,
    replicates: int,
    master_seed: int,
    *,
    max_events: int = DEFAULT_MAX_EVENTS,
) -> ScalingDiagnostic:
    """Track ``N(t) * log(t) / t`` at ``lam = 1`` over a grid of times.

    ``N(t)`` counts the size chain's returns to 1 by time ``t``.  The
    statistic tends to 1 in probability, logarithmically slowly.  Replicates
    that hit the event cap are flagged, excluded, and counted.
    """
    grid = np.asarray(t_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("t_grid must be non-empty and strictly increasing")
    if np.any(grid < 1.0):
        raise ValueError("grid times below 1 make log(t) negative")
    rows = []
    truncated = 0
    for k in range(replicates):
        cfg = SimConfig(
            lam=1.0,
            horizon=float(grid[-1]),
            seed=derive_seed(master_seed, k),
            max_events=max_events,
        )
        try:
            res = simulate_counts(cfg, snapshot_times=grid)
        except ExplosionError:
            truncated += 1
            continue
        rows.append(
            [snap.returns_to_floor * np.log(snap.time) / snap.time for snap in res.snapshots]
        )
    return ScalingDiagnostic(
        name="returns_times_logt_over_t",
        lam=1.0,
        grid=grid,
        values=np.asarray(rows, dtype=np.float64),
        truncated=truncated,
        replicates=replicates,
        master_seed=master_seed,
    )


def ratio_identity_samples(
    n: int, replicates: int, rng: np.random.Generator
) -> np.ndarray:
    """Samples of ``V_1 / (V_1 + ... + V_n)`` with V i.i.d. critical hitting times.

    The summands have no mean, but the ratio is bounded and by exchangeability
    its expectation is exactly ``1 / n`` for any positive i.i.d. law.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if replicates < 1:
        raise ValueError("replicates must be positive")
    q = rng.random((replicates, n))
    v = q / (1.0 - q)
    return v[:, 0] / v.sum(axis=1)


def stable_ratio_check(n: int, replicates: int, rng: np.random.Generator) -> float:
    """Monte Carlo mean of the bounded ratio; equals 1/n up to noise."""
    return float(np.mean(ratio_identity_samples(n, replicates, rng)))


def config_digest(params: dict) -> str:
    """Short stable hash of a parameter mapping, for provenance columns."""
    blob = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


_ESTIMATE_FIELDS = (
    "lam",
    "alpha",
    "t",
    "replicates",
    "estimator",
    "point",
    "std_err",
    "master_seed",
)


def estimate_row(est: PersistenceEstimate) -> dict:
    row = asdict(est)
    row["config_hash"] = config_digest(
        {k: row[k] for k in ("lam", "alpha", "t", "replicates", "estimator", "master_seed")}
    )
    return row


def estimates_to_csv(estimates, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(_ESTIMATE_FIELDS) + ",config_hash\n")
        for est in estimates:
            row = estimate_row(est)
            cells = []
            for key in _ESTIMATE_FIELDS + ("config_hash",):
                value = row[key]
                cells.append(repr(float(value)) if isinstance(value, float) else str(value))
            fh.write(",".join(cells) + "\n")


def estimates_to_json(estimates, path) -> None:
    rows = [estimate_row(est) for est in estimates]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(rows, fh, indent=2, sort_keys=True)
        fh.write("\n")
