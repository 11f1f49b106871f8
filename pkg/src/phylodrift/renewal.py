"""First-passage moments of the size chain and related hitting-time laws.

For birth multiplier ``lam > 1`` the population size is transient upward, and
the time to climb from level ``n`` to ``n + 1`` satisfies a linear recursion
whose solution is a geometric convolution of the forcing sequence.  This
module evaluates those recursions in closed form, checks the harmonic
asymptote of the accumulated passage times, provides the hitting-time CDF
``t / (1 + t)`` of the critical chain (from level 2 down to 1 at ``lam = 1``),
and samples the births-per-passage law via the embedded reflected random walk.

All arrays here are level-aligned: index ``n`` holds the value for level
``n`` and index 0 is an unused zero, matching the convention that the level-0
mean is zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolationError

_REL_TOL = 1e-12


def _require_supercritical(lam: float) -> None:
    if not lam > 1.0:
        raise ValueError(
            f"lam must exceed 1 (upward-transient size chain); got lam={lam}"
        )


def solve_discounted_recursion(
    lam: float, forcing: np.ndarray, check: bool = True
) -> np.ndarray:
    """Solve ``lam * a[n] = forcing[n] + a[n-1]`` with ``a[0] = 0``.

    ``forcing`` is level-aligned (index 0 ignored).  The recursion evaluates
    each ``a[n]`` in Horner order, which accumulates the geometrically
    smallest terms first; with ``check`` the independent closed form
    ``a[n] = sum_j lam**-j * forcing[n+1-j]`` is evaluated as a convolution
    and both must agree to {rel} relative tolerance.
    """
    if lam == 0:
        raise ValueError("lam must be non-zero")
    forcing = np.asarray(forcing, dtype=np.float64)
    n_max = forcing.shape[0] - 1
    if n_max < 1:
        return np.zeros(forcing.shape[0], dtype=np.float64)
    out = np.zeros(n_max + 1, dtype=np.float64)
    acc = 0.0
    for n in range(1, n_max + 1):
        acc = (forcing[n] + acc) / lam
        out[n] = acc
    if check:
        powers = float(lam) ** -np.arange(1, n_max + 1, dtype=np.float64)
        closed = np.convolve(forcing[1:], powers)[:n_max]
        diff = np.abs(closed - out[1:])
        scale = np.maximum(np.abs(closed), np.abs(out[1:]))
        if np.any(diff > _REL_TOL * scale + 1e-300):
            worst = int(np.argmax(diff - _REL_TOL * scale)) + 1
            raise InvariantViolationError(
                f"recursion and closed form disagree at level {worst}: "
                f"{out[worst]!r} vs {closed[worst - 1]!r}"
            )
    return out


solve_discounted_recursion.__doc__ = solve_discounted_recursion.__doc__.format(
    rel=_REL_TOL
)


def first_passage_means(lam: float, n_max: int, check: bool = True) -> np.ndarray:
    """Mean time to climb one level, for levels 1..n_max (level-aligned).

    The level-1 mean is exactly ``1 / lam``; asymptotically the level-``n``
    mean behaves like ``1 / (n * (lam - 1))``.
    """
    _require_supercritical(lam)
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    forcing = np.zeros(n_max + 1)
    forcing[1:] = 1.0 / np.arange(1, n_max + 1, dtype=np.float64)
    return solve_discounted_recursion(lam, forcing, check=check)


def first_passage_variances(
    lam: float, n_max: int, means: np.ndarray | None = None, check: bool = True
) -> tuple[np.ndarray, np.ndarray]:
    """Forcing terms and variances of the one-level climb times.

    The forcing at level ``n`` is
    ``1 / ((1 + lam) n**2) + (lam / (1 + lam)) (m[n] + m[n-1])**2`` with the
    level-0 mean set to zero, and the variances solve the same discounted
    recursion driven by it.  Returns ``(forcing, variances)``.
    """
    _require_supercritical(lam)
    if means is None:
        means = first_passage_means(lam, n_max, check=check)
    levels = np.arange(1, n_max + 1, dtype=np.float64)
    forcing = np.zeros(n_max + 1)
    forcing[1:] = 1.0 / ((1.0 + lam) * levels**2) + (lam / (1.0 + lam)) * (
        means[1:] + means[:-1]
    ) ** 2
    variances = solve_discounted_recursion(lam, forcing, check=check)
    return forcing, variances


def harmonic_deviation(
    lam: float, n_max: int, means: np.ndarray | None = None
) -> np.ndarray:
    """Deviation of cumulative mean passage times from the harmonic sum.

    Level-aligned array of ``E[T_n] - H_n / (lam - 1)`` where ``T_n`` is the
    time to reach level ``n + 1`` and ``H_n`` the n-th harmonic number.  The
    sequence converges to zero; tests pin both its size at large ``n`` and its
    eventual decrease.
    """
    _require_supercritical(lam)
    if means is None:
        means = first_passage_means(lam, n_max)
    cumulative = np.concatenate(([0.0], np.cumsum(means[1:])))
    harmonic = np.concatenate(
        ([0.0], np.cumsum(1.0 / np.arange(1, n_max + 1, dtype=np.float64)))
    )
    return cumulative - harmonic / (lam - 1.0)


@dataclass(frozen=True)
class MomentTable:
    """Level-aligned first-passage statistics for a supercritical chain.

    ``mean[n]`` and ``var[n]`` describe the climb from level ``n`` to
    ``n + 1``; ``forcing`` drives the variance recursion; ``cumulative[n]`` is
    the expected time to reach level ``n + 1`` from the start; ``deviation``
    is its gap to the harmonic asymptote.
    """

    lam: float
    mean: np.ndarray
    var: np.ndarray
    forcing: np.ndarray
    cumulative: np.ndarray
    deviation: np.ndarray

    @property
    def n_max(self) -> int:
        return self.mean.shape[0] - 1

    @classmethod
    def compute(cls, lam: float, n_max: int, check: bool = True) -> "MomentTable":
        mean = first_passage_means(lam, n_max, check=check)
        forcing, var = first_passage_variances(lam, n_max, means=mean, check=check)
        cumulative = np.concatenate(([0.0], np.cumsum(mean[1:])))
        deviation = harmonic_deviation(lam, n_max, means=mean)
        table = cls(
            lam=lam,
            mean=mean,
            var=var,
            forcing=forcing,
            cumulative=cumulative,
            deviation=deviation,
        )
        table._validate()
        return table

    def _validate(self) -> None:
        if self.mean[1] != 1.0 / self.lam:
            raise InvariantViolationError("level-1 mean must equal 1/lam exactly")
        if np.any(self.mean[1:] <= 0) or np.any(self.var[1:] < 0):
            raise InvariantViolationError("moment tables must be positive")
        if np.any(np.diff(self.cumulative) <= 0):
            raise InvariantViolationError("cumulative means must increase strictly")

    def to_csv(self, path) -> None:
        """Rows ``n,mu,v,b,ET,deviation`` for levels 1..n_max."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("n,mu,v,b,ET,deviation\n")
            for n in range(1, self.n_max + 1):
                fh.write(
                    f"{n},{float(self.mean[n])!r},{float(self.var[n])!r},"
                    f"{float(self.forcing[n])!r},{float(self.cumulative[n])!r},"
                    f"{float(self.deviation[n])!r}\n"
                )


def critical_hitting_cdf(t):
    """CDF ``t / (1 + t)`` of the time for the critical chain to drop 2 -> 1."""
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < 0):
        raise ValueError("the hitting-time CDF is defined for t >= 0")
    out = arr / (1.0 + arr)
    return float(out) if np.isscalar(t) or arr.ndim == 0 else out


def sample_critical_hitting_time(rng: np.random.Generator, size=None):
    """Inverse-CDF sampler for the critical 2 -> 1 hitting law (heavy tailed)."""
    q = rng.random(size)
    return q / (1.0 - q)


@dataclass(frozen=True)
class ReflectedWalkSample:
    """Hitting data of the embedded walk reflected at ``1 - level``.

    ``steps`` is the number of moves until the walk first reaches +1 from 0;
    ``births`` counts the right-moves, always ``(1 + steps) / 2``.
    """

    level: int
    steps: int
    births: int

    def __post_init__(self):
        if self.steps % 2 != 1:
            raise InvariantViolationError("hitting +1 from 0 takes an odd step count")
        if self.births != (1 + self.steps) // 2 or self.births < 1:
            raise InvariantViolationError("births must equal (1 + steps) / 2")


@dataclass(frozen=True)
class CoupledWalkSample:
    """Reflected and free walks driven by one shared direction stream."""

    reflected: ReflectedWalkSample
    free_steps: int
    free_births: int


def sample_passage_births(
    lam: float, level: int, rng: np.random.Generator
) -> ReflectedWalkSample:
    """Sample births in one level-``level`` passage via the reflected walk.

    The walk starts at 0, steps +1 with probability ``lam / (1 + lam)``, and
    is reflected at ``1 - level``: from the barrier it moves up without
    consuming a direction draw, exactly as the size chain cannot lose its last
    type.  Stops on first hitting +1.
    """
    _require_supercritical(lam)
    if level < 1:
        raise ValueError("level must be at least 1")
    barrier = 1 - level
    p_up = lam / (1.0 + lam)
    pos = 0
    steps = 0
    births = 0
    while pos < 1:
        if pos == barrier:
            pos += 1
            births += 1
        elif rng.random() < p_up:
            pos += 1
            births += 1
        else:
            pos -= 1
        steps += 1
    return ReflectedWalkSample(level=level, steps=steps, births=births)


def sample_coupled_passage_births(
    lam: float, level: int, rng: np.random.Generator
) -> CoupledWalkSample:
    """Sample the reflected walk and the free walk from one shared stream.

    Both walks consume every direction draw (the reflected walk still moves up
    from its barrier regardless of the draw), which keeps the free walk at or
    below the reflected one for every step; the reflected walk therefore hits
    +1 no later, making its births count a pathwise lower bound.
    """
    _require_supercritical(lam)
    if level < 1:
        raise ValueError("level must be at least 1")
    barrier = 1 - level
    p_up = lam / (1.0 + lam)
    refl_pos = 0
    free_pos = 0
    refl_done = False
    refl_steps = refl_births = 0
    free_steps = free_births = 0
    while free_pos < 1:
        up = rng.random() < p_up
        if not refl_done:
            if refl_pos == barrier or up:
                refl_pos += 1
                refl_births += 1
            else:
                refl_pos -= 1
            refl_steps += 1
            if refl_pos == 1:
                refl_done = True
        free_pos += 1 if up else -1
        free_births += up
        free_steps += 1
    if not refl_done:  # pragma: no cover - free at 1 forces reflected at 1
        raise InvariantViolationError("free walk finished before the reflected walk")
    return CoupledWalkSample(
        reflected=ReflectedWalkSample(level=level, steps=refl_steps, births=refl_births),
        free_steps=free_steps,
        free_births=int(free_births),
    )
