"""Exact event-driven simulation of the ranked-fitness type population.

One type is alive at time zero.  With ``n`` types alive, a new type is born at
rate ``n * lam`` and receives an independent Uniform[0, 1] fitness mark; with
``n >= 2`` one type dies at rate ``n``, always the one with the smallest
fitness.  A single remaining type cannot die.  Only fitness ranks matter, so
the fittest type ever born can never be killed (the record holder is
immortal), and the population size alone is a birth-death chain that does not
feel the fitness values.

Randomness contract, per trajectory stream and in draw order:

1. one uniform for the initial type's fitness (the initial type is marked
   exactly like every later one);
2. per event: one uniform for the exponential waiting time (inverse CDF,
   ``-log1p(-u) / rate``), then one uniform for the birth/death direction when
   ``n >= 2`` (births are forced at ``n == 1`` and consume no direction draw),
   then one uniform for the newborn fitness when the event is a birth.

The event whose time would cross the horizon is discarded, draws included;
by memorylessness the returned state is exactly the population at the horizon.
Identical configs (seed included) give bit-identical trajectories on either
engine.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import ExplosionError, InvariantViolationError
from .seeding import make_generator

DEFAULT_MAX_EVENTS = 100_000_000
DEFAULT_MAX_POPULATION = 10_000_000

_EVENT_CHUNK = 1 << 17
_INITIAL_CAPACITY = 1 << 12


class EventKind(enum.Enum):
    BIRTH = "B"
    DEATH = "D"


@dataclass(frozen=True)
class TypeRecord:
    """One type: identity, fitness mark, lifespan, and (optional) parent."""

    id: int
    fitness: float
    birth_time: float
    death_time: float | None = None
    parent_id: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.fitness <= 1.0:
            raise ValueError(f"fitness must lie in [0, 1], got {self.fitness}")
        if self.death_time is not None and not self.death_time > self.birth_time:
            raise ValueError("death_time must exceed birth_time")

    @property
    def alive(self) -> bool:
        return self.death_time is None


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one trajectory.

    ``lam`` is the per-type birth rate multiplier; the caps turn runaway
    supercritical growth into explicit errors instead of silent truncation.
    """

    lam: float
    horizon: float
    seed: int
    max_events: int = DEFAULT_MAX_EVENTS
    max_population: int = DEFAULT_MAX_POPULATION

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")
        if self.max_events <= 0 or self.max_population <= 0:
            raise ValueError("caps must be positive")


class Event(NamedTuple):
    time: float
    kind: EventKind
    type_id: int


class EventLog:
    """Time-ordered event records of one trajectory, stored columnar.

    Kinds are 0 for birth and 1 for death; iteration yields :class:`Event`
    tuples.  Death events from a counts-only run carry type id -1.
    """

    __slots__ = ("times", "kinds", "type_ids", "horizon")

    def __init__(self, times, kinds, type_ids, horizon=None):
        self.times = np.asarray(times, dtype=np.float64)
        self.kinds = np.asarray(kinds, dtype=np.int8)
        self.type_ids = np.asarray(type_ids, dtype=np.int64)
        self.horizon = horizon

    def __len__(self) -> int:
        return self.times.shape[0]

    def __iter__(self) -> Iterator[Event]:
        for i in range(len(self)):
            yield self.event(i)

    def event(self, i: int) -> Event:
        kind = EventKind.BIRTH if self.kinds[i] == _kernels.KIND_BIRTH else EventKind.DEATH
        return Event(float(self.times[i]), kind, int(self.type_ids[i]))

    @property
    def birth_count(self) -> int:
        return int(np.count_nonzero(self.kinds == _kernels.KIND_BIRTH))

    @property
    def death_count(self) -> int:
        return int(np.count_nonzero(self.kinds == _kernels.KIND_DEATH))

    def equals(self, other: "EventLog") -> bool:
        return (
            np.array_equal(self.times, other.times)
            and np.array_equal(self.kinds, other.kinds)
            and np.array_equal(self.type_ids, other.type_ids)
        )

    def to_csv(self, path) -> None:
        """Write ``time,kind,type_id`` rows, kind encoded as B or D."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("time,kind,type_id\n")
            for i in range(len(self)):
                kind = "B" if self.kinds[i] == _kernels.KIND_BIRTH else "D"
                fh.write(f"{float(self.times[i])!r},{kind},{int(self.type_ids[i])}\n")


class Ledger:
    """Every type ever created, indexed by id (equal to birth order).

    Death times are NaN while a type is alive.  Parent links are not stored
    here; tree construction owns those.
    """

    __slots__ = ("fitness", "birth_times", "death_times")

    def __init__(self, fitness, birth_times, death_times):
        self.fitness = np.asarray(fitness, dtype=np.float64)
        self.birth_times = np.asarray(birth_times, dtype=np.float64)
        self.death_times = np.asarray(death_times, dtype=np.float64)

    def __len__(self) -> int:
        return self.fitness.shape[0]

    def __getitem__(self, type_id: int) -> TypeRecord:
        dt = self.death_times[type_id]
        return TypeRecord(
            id=int(type_id),
            fitness=float(self.fitness[type_id]),
            birth_time=float(self.birth_times[type_id]),
            death_time=None if math.isnan(dt) else float(dt),
        )

    def records(self) -> list[TypeRecord]:
        return [self[i] for i in range(len(self))]

    def alive_ids(self) -> np.ndarray:
        return np.flatnonzero(np.isnan(self.death_times))

    def argmax_fitness(self) -> int:
        """Id of the fittest type ever born (the immortal record holder)."""
        return int(np.argmax(self.fitness))


@dataclass
class PopulationState:
    """Live simulation state: the alive types plus running counters.

    ``heap`` is a (fitness, id, birth_time) min-heap, so the next victim is
    popped in O(log n) and fitness ties break toward the smaller id.  The
    running maximum is maintained at births only, which is exact because the
    record holder never dies.
    """

    lam: float
    max_population: int
    heap: list = field(default_factory=list)
    current_time: float = 0.0
    births_total: int = 1
    max_fitness: float = 0.0
    max_id: int = 0
    returns_to_floor: int = 0
    events_total: int = 0

    @classmethod
    def initial(cls, config: SimConfig, rng: np.random.Generator) -> "PopulationState":
        """Single founder type at time zero; draws its fitness mark."""
        f = rng.random()
        state = cls(lam=config.lam, max_population=config.max_population)
        state.heap.append((f, 0, 0.0))
        state.max_fitness = f
        return state

    @property
    def size(self) -> int:
        return len(self.heap)

    def alive_records(self) -> list[TypeRecord]:
        """Alive types as records, sorted by id."""
        return [
            TypeRecord(id=i, fitness=f, birth_time=bt)
            for f, i, bt in sorted(self.heap, key=lambda entry: entry[1])
        ]

    def max_record(self) -> TypeRecord:
        for f, i, bt in self.heap:
            if i == self.max_id:
                return TypeRecord(id=i, fitness=f, birth_time=bt)
        raise InvariantViolationError("record holder missing from the alive set")


def next_event(state: PopulationState, rng: np.random.Generator) -> tuple[float, EventKind]:
    """Sample the next (waiting time, kind) pair without touching the state.

    At size 1 the event is a birth with certainty and only the waiting-time
    uniform is consumed; from size 2 up, one direction uniform follows.
    """
    n = state.size
    lam = state.lam
    if n == 1:
        wait = -math.log1p(-rng.random()) / lam
        return wait, EventKind.BIRTH
    wait = -math.log1p(-rng.random()) / (n * (1.0 + lam))
    if rng.random() < lam / (1.0 + lam):
        return wait, EventKind.BIRTH
    return wait, EventKind.DEATH


def apply_birth(state: PopulationState, rng: np.random.Generator) -> TypeRecord:
    """Create the next type at the current time with a fresh fitness mark."""
    if state.size + 1 > state.max_population:
        raise ExplosionError(
            f"population cap exceeded: max_population={state.max_population} "
            f"at t={state.current_time:.6g}",
            cap_name="max_population",
            cap_value=state.max_population,
        )
    f = rng.random()
    rec = TypeRecord(id=state.births_total, fitness=f, birth_time=state.current_time)
    heapq.heappush(state.heap, (f, rec.id, rec.birth_time))
    state.births_total += 1
    if f > state.max_fitness:
        state.max_fitness = f
        state.max_id = rec.id
    state.events_total += 1
    return rec


def apply_death(state: PopulationState) -> TypeRecord:
    """Remove the minimum-fitness type; impossible while only one is alive."""
    if state.size < 2:
        raise ValueError("the last remaining type cannot die")
    f, victim, bt = heapq.heappop(state.heap)
    if victim == state.max_id:
        raise InvariantViolationError(
            f"record holder (id {victim}) selected for death; the alive set is corrupt"
        )
    if state.size == 1:
        state.returns_to_floor += 1
    state.events_total += 1
    return TypeRecord(
        id=victim, fitness=f, birth_time=bt, death_time=state.current_time
    )


@dataclass(frozen=True)
class Snapshot:
    """State extract at a query time: all events at or before it included."""

    time: float
    size: int
    births_total: int
    max_id: int
    returns_to_floor: int


@dataclass
class SimResult:
    """Everything one trajectory produced."""

    config: SimConfig
    state: PopulationState
    log: EventLog | None
    ledger: Ledger | None
    snapshots: list[Snapshot]

    @property
    def events_total(self) -> int:
        return self.state.events_total


def _validated_snapshot_times(snapshot_times, horizon) -> np.ndarray:
    if snapshot_times is None:
        return np.empty(0, dtype=np.float64)
    times = np.asarray(snapshot_times, dtype=np.float64)
    if times.ndim != 1:
        raise ValueError("snapshot times must be one-dimensional")
    if times.size and (np.any(np.diff(times) < 0)):
        raise ValueError("snapshot times must be sorted ascending")
    if times.size and (times[0] < 0 or times[-1] > horizon):
        raise ValueError("snapshot times must lie within [0, horizon]")
    return times


def _resolve_engine(engine: str) -> str:
    if engine == "auto":
        return "numba" if _kernels.HAVE_NUMBA else "python"
    if engine == "numba" and not _kernels.HAVE_NUMBA:
        raise RuntimeError("numba engine requested but numba is not importable")
    if engine not in ("numba", "python"):
        raise ValueError(f"unknown engine {engine!r}")
    return engine


def simulate(
    config: SimConfig,
    *,
    snapshot_times: Sequence[float] | None = None,
    keep_events: bool = True,
    keep_ledger: bool = True,
    engine: str = "auto",
) -> SimResult:
    """Run one trajectory to the horizon.

    ``snapshot_times`` (sorted, within [0, horizon]) are the instants at which
    (size, births_total, record-holder id, floor returns) are captured without
    retaining the event stream.  With ``keep_ledger`` off, dead types are
    forgotten and only the alive set plus counters survive, which is what long
    supercritical runs need.  A cap hit raises :class:`ExplosionError` with
    the partial result attached.
    """
    snap_t = _validated_snapshot_times(snapshot_times, config.horizon)
    if _resolve_engine(engine) == "numba":
        return _simulate_kernel(config, snap_t, keep_events, keep_ledger)
    return _simulate_object(config, snap_t, keep_events, keep_ledger)


def _simulate_object(config, snap_t, keep_events, keep_ledger) -> SimResult:
    """Reference engine: drives the public step operations directly."""
    rng = make_generator(config.seed)
    state = PopulationState.initial(config, rng)
    led_f = [state.heap[0][0]] if keep_ledger else None
    led_bt = [0.0] if keep_ledger else None
    led_dt = [math.nan] if keep_ledger else None
    ev_t: list[float] = []
    ev_k: list[int] = []
    ev_id: list[int] = []
    snaps: list[Snapshot] = []
    snap_pos = 0

    def take_snapshot():
        snaps.append(
            Snapshot(
                time=float(snap_t[len(snaps)]),
                size=state.size,
                births_total=state.births_total,
                max_id=state.max_id,
                returns_to_floor=state.returns_to_floor,
            )
        )

    def build(final_time) -> SimResult:
        state.current_time = final_time
        log = None
        if keep_events:
            log = EventLog(ev_t, ev_k, ev_id, horizon=config.horizon)
        ledger = Ledger(led_f, led_bt, led_dt) if keep_ledger else None
        return SimResult(config=config, state=state, log=log, ledger=ledger, snapshots=snaps)

    while True:
        wait, kind = next_event(state, rng)
        te = state.current_time + wait
        if te > config.horizon:
            while snap_pos < snap_t.size:
                take_snapshot()
                snap_pos += 1
            return build(config.horizon)
        if state.events_total >= config.max_events:
            raise ExplosionError(
                f"event cap exceeded: max_events={config.max_events} at t={te:.6g}",
                cap_name="max_events",
                cap_value=config.max_events,
                partial=build(state.current_time),
            )
        while snap_pos < snap_t.size and snap_t[snap_pos] < te:
            take_snapshot()
            snap_pos += 1
        state.current_time = te
        if kind is EventKind.BIRTH:
            try:
                rec = apply_birth(state, rng)
            except ExplosionError as err:
                err.partial = build(te)
                raise
            if keep_ledger:
                led_f.append(rec.fitness)
                led_bt.append(rec.birth_time)
                led_dt.append(math.nan)
        else:
            rec = apply_death(state)
            if keep_ledger:
                led_dt[rec.id] = te
        if keep_events:
            ev_t.append(te)
            ev_k.append(_kernels.KIND_BIRTH if kind is EventKind.BIRTH else _kernels.KIND_DEATH)
            ev_id.append(rec.id)


def _grow(arr: np.ndarray, capacity: int) -> np.ndarray:
    out = np.empty(capacity, dtype=arr.dtype)
    out[: arr.shape[0]] = arr
    return out


def _simulate_kernel(config, snap_t, keep_events, keep_ledger) -> SimResult:
    """Fast engine: chunked, resumable numba kernel."""
    rng = make_generator(config.seed)
    root_f = rng.random()

    capacity = _INITIAL_CAPACITY
    heap_f = np.empty(capacity, dtype=np.float64)
    heap_i = np.empty(capacity, dtype=np.int64)
    heap_bt = np.empty(capacity, dtype=np.float64)
    heap_f[0], heap_i[0], heap_bt[0] = root_f, 0, 0.0
    if keep_ledger:
        led_f = np.empty(capacity, dtype=np.float64)
        led_bt = np.empty(capacity, dtype=np.float64)
        led_dt = np.empty(capacity, dtype=np.float64)
        led_f[0], led_bt[0], led_dt[0] = root_f, 0.0, np.nan
    else:
        led_f = np.empty(0, dtype=np.float64)
        led_bt = np.empty(0, dtype=np.float64)
        led_dt = np.empty(0, dtype=np.float64)

    if keep_events:
        ev_t = np.empty(_EVENT_CHUNK, dtype=np.float64)
        ev_k = np.empty(_EVENT_CHUNK, dtype=np.int8)
        ev_id = np.empty(_EVENT_CHUNK, dtype=np.int64)
    else:
        ev_t = np.empty(0, dtype=np.float64)
        ev_k = np.empty(0, dtype=np.int8)
        ev_id = np.empty(0, dtype=np.int64)

    n_snaps = snap_t.shape[0]
    snap_n = np.zeros(n_snaps, dtype=np.int64)
    snap_s = np.zeros(n_snaps, dtype=np.int64)
    snap_maxi = np.zeros(n_snaps, dtype=np.int64)
    snap_ret = np.zeros(n_snaps, dtype=np.int64)

    t = 0.0
    n = 1
    total_births = 1
    maxf = root_f
    maxi = 0
    returns = 0
    events_total = 0
    snap_pos = 0
    violations = 0
    chunks: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []

    def build(final_time, alive_n, alive_births) -> SimResult:
        state = PopulationState(lam=config.lam, max_population=config.max_population)
        state.heap = [
            (float(heap_f[i]), int(heap_i[i]), float(heap_bt[i])) for i in range(alive_n)
        ]
        heapq.heapify(state.heap)
        state.current_time = final_time
        state.births_total = alive_births
        state.max_fitness = float(maxf)
        state.max_id = int(maxi)
        state.returns_to_floor = int(returns)
        state.events_total = int(events_total)
        log = None
        if keep_events:
            if chunks:
                log = EventLog(
                    np.concatenate([c[0] for c in chunks]),
                    np.concatenate([c[1] for c in chunks]),
                    np.concatenate([c[2] for c in chunks]),
                    horizon=config.horizon,
                )
            else:
                log = EventLog(
                    np.empty(0), np.empty(0, np.int8), np.empty(0, np.int64),
                    horizon=config.horizon,
                )
        ledger = None
        if keep_ledger:
            ledger = Ledger(
                led_f[:alive_births].copy(),
                led_bt[:alive_births].copy(),
                led_dt[:alive_births].copy(),
            )
        snaps = [
            Snapshot(
                time=float(snap_t[i]),
                size=int(snap_n[i]),
                births_total=int(snap_s[i]),
                max_id=int(snap_maxi[i]),
                returns_to_floor=int(snap_ret[i]),
            )
            for i in range(snap_pos)
        ]
        return SimResult(config=config, state=state, log=log, ledger=ledger, snapshots=snaps)

    while True:
        (status, t, n, total_births, maxf, maxi, returns, events_total,
         ev_count, snap_pos, viol) = _kernels.full_kernel(
            rng, config.lam, config.horizon, config.max_events,
            config.max_population, t, n, total_births, maxf, maxi, returns,
            events_total, heap_f, heap_i, heap_bt, led_f, led_bt, led_dt,
            keep_ledger, ev_t, ev_k, ev_id, keep_events, snap_t, snap_pos,
            snap_n, snap_s, snap_maxi, snap_ret,
        )
        violations += viol
        if keep_events and ev_count:
            chunks.append((ev_t[:ev_count].copy(), ev_k[:ev_count].copy(), ev_id[:ev_count].copy()))
        if status == _kernels.STATUS_GROW:
            capacity *= 2
            heap_f = _grow(heap_f, capacity)
            heap_i = _grow(heap_i, capacity)
            heap_bt = _grow(heap_bt, capacity)
            if keep_ledger:
                led_f = _grow(led_f, capacity)
                led_bt = _grow(led_bt, capacity)
                led_dt = _grow(led_dt, capacity)
        elif status == _kernels.STATUS_EVENTS_FULL:
            pass
        elif status == _kernels.STATUS_HORIZON:
            break
        elif status == _kernels.STATUS_MAX_EVENTS:
            raise ExplosionError(
                f"event cap exceeded: max_events={config.max_events} at t={t:.6g}",
                cap_name="max_events",
                cap_value=config.max_events,
                partial=build(t, n, total_births),
            )
        elif status == _kernels.STATUS_MAX_POP:
            raise ExplosionError(
                f"population cap exceeded: max_population={config.max_population} "
                f"at t={t:.6g}",
                cap_name="max_population",
                cap_value=config.max_population,
                partial=build(t, n, total_births),
            )
        else:  # pragma: no cover
            raise InvariantViolationError(f"unknown kernel status {status}")

    if violations:
        raise InvariantViolationError(
            f"record holder was selected for death {violations} time(s)"
        )
    return build(config.horizon, n, total_births)


@dataclass
class CountsResult:
    """Skeleton-only trajectory: sizes and counters, no fitness bookkeeping."""

    config: SimConfig
    final_time: float
    size: int
    births_total: int
    returns_to_floor: int
    events_total: int
    log: EventLog | None
    snapshots: list[Snapshot]


def simulate_counts(
    config: SimConfig,
    *,
    snapshot_times: Sequence[float] | None = None,
    keep_events: bool = False,
    engine: str = "auto",
) -> CountsResult:
    """Run the population-size process alone.

    The size/births law is identical to :func:`simulate` (fitness never feeds
    back into the rates) but the stream alignment differs since no fitness
    uniforms are drawn; use it for diagnostics that only need counts.
    Snapshot ``max_id`` fields are -1 here.
    """
    snap_t = _validated_snapshot_times(snapshot_times, config.horizon)
    kernel = (
        _kernels.counts_kernel
        if _resolve_engine(engine) == "numba"
        else _kernels._counts_kernel_impl
    )
    rng = make_generator(config.seed)

    if keep_events:
        ev_t = np.empty(_EVENT_CHUNK, dtype=np.float64)
        ev_k = np.empty(_EVENT_CHUNK, dtype=np.int8)
        ev_id = np.empty(_EVENT_CHUNK, dtype=np.int64)
    else:
        ev_t = np.empty(0, dtype=np.float64)
        ev_k = np.empty(0, dtype=np.int8)
        ev_id = np.empty(0, dtype=np.int64)

    n_snaps = snap_t.shape[0]
    snap_n = np.zeros(n_snaps, dtype=np.int64)
    snap_s = np.zeros(n_snaps, dtype=np.int64)
    snap_ret = np.zeros(n_snaps, dtype=np.int64)

    t = 0.0
    n = 1
    total_births = 1
    returns = 0
    events_total = 0
    snap_pos = 0
    chunks: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []

    def build(final_time) -> CountsResult:
        log = None
        if keep_events:
            if chunks:
                log = EventLog(
                    np.concatenate([c[0] for c in chunks]),
                    np.concatenate([c[1] for c in chunks]),
                    np.concatenate([c[2] for c in chunks]),
                    horizon=config.horizon,
                )
            else:
                log = EventLog(
                    np.empty(0), np.empty(0, np.int8), np.empty(0, np.int64),
                    horizon=config.horizon,
                )
        snaps = [
            Snapshot(
                time=float(snap_t[i]),
                size=int(snap_n[i]),
                births_total=int(snap_s[i]),
                max_id=-1,
                returns_to_floor=int(snap_ret[i]),
            )
            for i in range(snap_pos)
        ]
        return CountsResult(
            config=config,
            final_time=final_time,
            size=int(n),
            births_total=int(total_births),
            returns_to_floor=int(returns),
            events_total=int(events_total),
            log=log,
            snapshots=snaps,
        )

    while True:
        (status, t, n, total_births, returns, events_total, ev_count,
         snap_pos) = kernel(
            rng, config.lam, config.horizon, config.max_events,
            config.max_population, t, n, total_births, returns, events_total,
            ev_t, ev_k, ev_id, keep_events, snap_t, snap_pos, snap_n, snap_s,
            snap_ret,
        )
        if keep_events and ev_count:
            chunks.append((ev_t[:ev_count].copy(), ev_k[:ev_count].copy(), ev_id[:ev_count].copy()))
        if status == _kernels.STATUS_EVENTS_FULL:
            continue
        if status == _kernels.STATUS_HORIZON:
            return build(config.horizon)
        if status == _kernels.STATUS_MAX_EVENTS:
            raise ExplosionError(
                f"event cap exceeded: max_events={config.max_events} at t={t:.6g}",
                cap_name="max_events",
                cap_value=config.max_events,
                partial=build(t),
            )
        if status == _kernels.STATUS_MAX_POP:
            raise ExplosionError(
                f"population cap exceeded: max_population={config.max_population} "
                f"at t={t:.6g}",
                cap_name="max_population",
                cap_value=config.max_population,
                partial=build(t),
            )
        raise InvariantViolationError(f"unknown kernel status {status}")  # pragma: no cover


def snapshot_counts(log: EventLog, times: Sequence[float]) -> list[tuple[int, int]]:
    """(size, births_total) at each query time, reconstructed from a log.

    The count at time ``s`` includes every event with time <= ``s`` (the
    trajectory is right-continuous between events).
    """
    times_arr = np.asarray(times, dtype=np.float64)
    if times_arr.ndim != 1:
        raise ValueError("times must be one-dimensional")
    if times_arr.size and np.any(np.diff(times_arr) < 0):
        raise ValueError("times must be sorted ascending")
    if times_arr.size and times_arr[0] < 0:
        raise ValueError("times must be non-negative")
    if (
        log.horizon is not None
        and times_arr.size
        and times_arr[-1] > log.horizon
    ):
        raise ValueError("times must not exceed the log horizon")
    births = np.cumsum(log.kinds == _kernels.KIND_BIRTH)
    deaths = np.cumsum(log.kinds == _kernels.KIND_DEATH)
    idx = np.searchsorted(log.times, times_arr, side="right") - 1
    out = []
    for i in idx:
        if i < 0:
            out.append((1, 1))
        else:
            out.append((int(1 + births[i] - deaths[i]), int(1 + births[i])))
    return out
