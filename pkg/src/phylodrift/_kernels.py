"""Event-loop kernels for the ranked-fitness birth-death process.

Each kernel exists once as a plain function and is compiled with numba when
available.  Kernels consume the generator stream exactly like the object-level
reference path in :mod:`phylodrift.population` (uniform draws only, waiting
times by inverse CDF), so a given seed yields bit-identical trajectories on
either engine; a test pins that equivalence.

The full kernel is resumable: it returns a status code whenever an output
buffer fills or a working array needs to grow, and the caller re-enters it
with the carried scalar state.  Resume points sit before any draw, so chunk
sizes never perturb the stream.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


# Kernel exit statuses.
STATUS_HORIZON = 0      # clean stop: next event would cross the horizon
STATUS_EVENTS_FULL = 1  # event buffer filled; resume with a fresh buffer
STATUS_GROW = 2         # heap/ledger capacity reached; resume after growing
STATUS_MAX_EVENTS = 3   # explosion: event cap exceeded
STATUS_MAX_POP = 4      # explosion: population cap exceeded

KIND_BIRTH = 0
KIND_DEATH = 1


def _full_kernel_impl(
    rng,
    lam,
    horizon,
    max_events,
    max_population,
    t,
    n,
    total_births,
    maxf,
    maxi,
    returns,
    events_total,
    heap_f,
    heap_i,
    heap_bt,
    led_f,
    led_bt,
    led_dt,
    record_ledger,
    ev_t,
    ev_k,
    ev_id,
    record_events,
    snap_t,
    snap_pos,
    snap_n,
    snap_s,
    snap_maxi,
    snap_ret,
):
    """Advance one trajectory; the live population is a (fitness, id) min-heap.

    ``n`` doubles as the heap size.  Ties in fitness break toward the smaller
    id, which is the type that dies first.  Returns the carried scalar state
    plus the number of events written into the buffer this call.
    """
    violations = 0
    ev_count = 0
    n_snaps = snap_t.shape[0]
    capacity = heap_f.shape[0]
    p_birth = lam / (1.0 + lam)
    while True:
        if total_births + 1 > capacity:
            return (STATUS_GROW, t, n, total_births, maxf, maxi, returns,
                    events_total, ev_count, snap_pos, violations)
        if record_events and ev_count >= ev_t.shape[0]:
            return (STATUS_EVENTS_FULL, t, n, total_births, maxf, maxi, returns,
                    events_total, ev_count, snap_pos, violations)
        # one atomic (wait, kind) draw; direction only exists from size >= 2
        rate = lam if n == 1 else n * (1.0 + lam)
        wait = -np.log1p(-rng.random()) / rate
        birth = True
        if n >= 2:
            birth = rng.random() < p_birth
        te = t + wait
        if te > horizon:
            while snap_pos < n_snaps:
                snap_n[snap_pos] = n
                snap_s[snap_pos] = total_births
                snap_maxi[snap_pos] = maxi
                snap_ret[snap_pos] = returns
                snap_pos += 1
            return (STATUS_HORIZON, t, n, total_births, maxf, maxi, returns,
                    events_total, ev_count, snap_pos, violations)
        if events_total >= max_events:
            return (STATUS_MAX_EVENTS, t, n, total_births, maxf, maxi, returns,
                    events_total, ev_count, snap_pos, violations)
        while snap_pos < n_snaps and snap_t[snap_pos] < te:
            snap_n[snap_pos] = n
            snap_s[snap_pos] = total_births
            snap_maxi[snap_pos] = maxi
            snap_ret[snap_pos] = returns
            snap_pos += 1
        t = te
        if birth:
            if n + 1 > max_population:
                return (STATUS_MAX_POP, t, n, total_births, maxf, maxi, returns,
                        events_total, ev_count, snap_pos, violations)
            f = rng.random()
            i = n
            heap_f[i] = f
            heap_i[i] = total_births
            heap_bt[i] = t
            while i > 0:
                par = (i - 1) >> 1
                if heap_f[i] < heap_f[par] or (
                    heap_f[i] == heap_f[par] and heap_i[i] < heap_i[par]
                ):
                    heap_f[i], heap_f[par] = heap_f[par], heap_f[i]
                    heap_i[i], heap_i[par] = heap_i[par], heap_i[i]
                    heap_bt[i], heap_bt[par] = heap_bt[par], heap_bt[i]
                    i = par
                else:
                    break
            if f > maxf:
                maxf = f
                maxi = total_births
            if record_ledger:
                led_f[total_births] = f
                led_bt[total_births] = t
                led_dt[total_births] = np.nan
            if record_events:
                ev_t[ev_count] = t
                ev_k[ev_count] = KIND_BIRTH
                ev_id[ev_count] = total_births
                ev_count += 1
            total_births += 1
            n += 1
        else:
            vid = heap_i[0]
            n -= 1
            heap_f[0] = heap_f[n]
            heap_i[0] = heap_i[n]
            heap_bt[0] = heap_bt[n]
            i = 0
            while True:
                left = 2 * i + 1
                if left >= n:
                    break
                m = left
                right = left + 1
                if right < n and (
                    heap_f[right] < heap_f[left]
                    or (heap_f[right] == heap_f[left] and heap_i[right] < heap_i[left])
                ):
                    m = right
                if heap_f[m] < heap_f[i] or (
                    heap_f[m] == heap_f[i] and heap_i[m] < heap_i[i]
                ):
                    heap_f[i], heap_f[m] = heap_f[m], heap_f[i]
                    heap_i[i], heap_i[m] = heap_i[m], heap_i[i]
                    heap_bt[i], heap_bt[m] = heap_bt[m], heap_bt[i]
                    i = m
                else:
                    break
            if vid == maxi:
                violations += 1
            if record_ledger:
                led_dt[vid] = t
            if record_events:
                ev_t[ev_count] = t
                ev_k[ev_count] = KIND_DEATH
                ev_id[ev_count] = vid
                ev_count += 1
            if n == 1:
                returns += 1
        events_total += 1


def _counts_kernel_impl(
    rng,
    lam,
    horizon,
    max_events,
    max_population,
    t,
    n,
    total_births,
    returns,
    events_total,
    ev_t,
    ev_k,
    ev_id,
    record_events,
    snap_t,
    snap_pos,
    snap_n,
    snap_s,
    snap_ret,
):
    """Population-size skeleton only: no fitness draws, no heap, no ledger.

    The (n, S) law matches the full kernel because fitness never feeds back
    into the rates; only the draw alignment differs.  Death events carry
    type id -1 since victims are not identified here.
    """
    ev_count = 0
    n_snaps = snap_t.shape[0]
    p_birth = lam / (1.0 + lam)
    while True:
        if record_events and ev_count >= ev_t.shape[0]:
            return (STATUS_EVENTS_FULL, t, n, total_births, returns,
                    events_total, ev_count, snap_pos)
        rate = lam if n == 1 else n * (1.0 + lam)
        wait = -np.log1p(-rng.random()) / rate
        birth = True
        if n >= 2:
            birth = rng.random() < p_birth
        te = t + wait
        if te > horizon:
            while snap_pos < n_snaps:
                snap_n[snap_pos] = n
                snap_s[snap_pos] = total_births
                snap_ret[snap_pos] = returns
                snap_pos += 1
            return (STATUS_HORIZON, t, n, total_births, returns,
                    events_total, ev_count, snap_pos)
        if events_total >= max_events:
            return (STATUS_MAX_EVENTS, t, n, total_births, returns,
                    events_total, ev_count, snap_pos)
        while snap_pos < n_snaps and snap_t[snap_pos] < te:
            snap_n[snap_pos] = n
            snap_s[snap_pos] = total_births
            snap_ret[snap_pos] = returns
            snap_pos += 1
        t = te
        if birth:
            if n + 1 > max_population:
                return (STATUS_MAX_POP, t, n, total_births, returns,
                        events_total, ev_count, snap_pos)
            if record_events:
                ev_t[ev_count] = t
                ev_k[ev_count] = KIND_BIRTH
                ev_id[ev_count] = total_births
                ev_count += 1
            total_births += 1
            n += 1
        else:
            if record_events:
                ev_t[ev_count] = t
                ev_k[ev_count] = KIND_DEATH
                ev_id[ev_count] = -1
                ev_count += 1
            n -= 1
            if n == 1:
                returns += 1
        events_total += 1


def _hit_kernel_impl(rng, lam, n0, target, max_events):
    """Run the size process from ``n0`` until it first equals ``target``.

    Returns (elapsed time, births seen, events seen, capped flag).
    """
    t = 0.0
    n = n0
    births = 0
    steps = 0
    p_birth = lam / (1.0 + lam)
    while n != target:
        if steps >= max_events:
            return (t, births, steps, True)
        rate = lam if n == 1 else n * (1.0 + lam)
        wait = -np.log1p(-rng.random()) / rate
        birth = True
        if n >= 2:
            birth = rng.random() < p_birth
        t += wait
        if birth:
            n += 1
            births += 1
        else:
            n -= 1
        steps += 1
    return (t, births, steps, False)


def _cycle_kernel_impl(rng, lam, max_events):
    """One floor-to-floor cycle: hold at size 1, then excurse back to 1.

    Returns (cycle duration, births in cycle, events in cycle, capped flag).
    The birth that leaves the floor counts toward births.
    """
    t = -np.log1p(-rng.random()) / lam
    births = 1
    steps = 1
    n = 2
    p_birth = lam / (1.0 + lam)
    while n != 1:
        if steps >= max_events:
            return (t, births, steps, True)
        wait = -np.log1p(-rng.random()) / (n * (1.0 + lam))
        birth = rng.random() < p_birth
        t += wait
        if birth:
            n += 1
            births += 1
        else:
            n -= 1
        steps += 1
    return (t, births, steps, False)


if HAVE_NUMBA:
    full_kernel = njit(cache=True)(_full_kernel_impl)
    counts_kernel = njit(cache=True)(_counts_kernel_impl)
    hit_kernel = njit(cache=True)(_hit_kernel_impl)
    cycle_kernel = njit(cache=True)(_cycle_kernel_impl)
else:  # pragma: no cover - exercised only without numba
    full_kernel = _full_kernel_impl
    counts_kernel = _counts_kernel_impl
    hit_kernel = _hit_kernel_impl
    cycle_kernel = _cycle_kernel_impl
