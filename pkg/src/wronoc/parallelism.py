"""Phase 1: maximise the minimum per-radius carrier count.

Pick exactly ``n_radii`` ring radii and, for each, a set of mutually
compatible resonances, so that no chosen carrier conflicts with any
resonance of another chosen radius.  The objective is max-min: the
network-wide parallelism is bounded by the selected radius with the
fewest usable carriers.

The search is depth-first branch and bound over radius subsets.  Radii
are pre-ordered by descending standalone capacity.  Along a branch, each
chosen radius keeps a bitmask of resonances still usable against the
other chosen radii; adding a radius can only shrink these masks, so the
running minimum of the per-radius capacities is a valid upper bound for
every completion of the branch.  A branch dies when that bound cannot
beat the incumbent, when a chosen radius drops to zero capacity, or when
too few viable candidates remain.

Among equally good optima the solver returns the lexicographically
smallest solution (by sorted radius ids, then per-radius selections).
Branch and bound in capacity order cannot promise that on its own, so a
second, cheap pass re-derives the canonical subset: a threshold search in
ascending id order for the first subset sustaining the proven optimum.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations

from .conflict import ConflictSet, max_compatible_count, usable_resonances
from .model import Instance

OPTIMAL = "optimal"
INCUMBENT_TIMEOUT = "incumbent-timeout"
INFEASIBLE = "infeasible"

METHOD_BNB = "bnb"
METHOD_EXHAUSTIVE = "exhaustive"


@dataclass(frozen=True)
class SolveConfig:
    """Knobs shared by both solve phases."""

    time_limit: float = 0.0  # seconds of wall time; 0 disables the limit
    method: str = METHOD_BNB
    trim_to_p: bool = False

    def __post_init__(self):
        if self.time_limit < 0:
            raise ValueError("time_limit must be >= 0")
        if self.method not in (METHOD_BNB, METHOD_EXHAUSTIVE):
            raise ValueError(f"unknown method {self.method!r}")

    def deadline(self) -> float | None:
        return time.monotonic() + self.time_limit if self.time_limit else None


@dataclass(frozen=True)
class ParallelismSolution:
    selected_radii: tuple[int, ...]
    selections: dict[int, tuple[int, ...]] = field(default_factory=dict)
    counts: dict[int, int] = field(default_factory=dict)
    parallelism: int | None = None
    status: str = OPTIMAL


class _Timeout(Exception):
    pass


class _Workspace:
    """Per-solve tables: resonance intervals, usable-index bitmasks, MIS cache."""

    def __init__(self, instance: Instance, conflicts: ConflictSet):
        self.instance = instance
        self.conflicts = conflicts
        self.ids = sorted(e.id for e in instance.radii)
        self.full: dict[int, int] = {}
        self.by_lmax: dict[int, list[tuple[int, int, int]]] = {}  # (lmin, lmax, idx)
        for e in instance.radii:
            self.full[e.id] = (1 << len(e.resonances)) - 1
            order = sorted(
                ((r.lmin, r.lmax, j) for j, r in enumerate(e.resonances)),
                key=lambda t: (t[1], t[2]),
            )
            self.by_lmax[e.id] = order
        self._mis_cache: dict[tuple[int, int], int] = {}

    def mis(self, rid: int, mask: int) -> int:
        key = (rid, mask)
        hit = self._mis_cache.get(key)
        if hit is not None:
            return hit
        count, end = 0, None
        for lmin, lmax, idx in self.by_lmax[rid]:
            if mask >> idx & 1 and (end is None or lmin > end):
                count += 1
                end = lmax
        self._mis_cache[key] = count
        return count

    def usable_mask(self, rid: int, others) -> int:
        mask = self.full[rid]
        for o in others:
            mask &= ~self.conflicts.cross_blocked_mask(rid, o)
        return mask

    def capacity(self, rid: int) -> int:
        return self.mis(rid, self.full[rid])


def evaluate_subset(
    instance: Instance, conflicts: ConflictSet, subset: set[int] | frozenset[int]
) -> dict[int, tuple[int, tuple[int, ...]]]:
    """For each radius in `subset`, its usable-carrier capacity and a witness.

    A capacity of zero makes the subset inadmissible: every selected
    radius must carry at least one resonance.
    """
    if not subset:
        raise ValueError("subset must be non-empty")
    out: dict[int, tuple[int, tuple[int, ...]]] = {}
    for rid in sorted(subset):
        usable = usable_resonances(instance, conflicts, set(subset), rid)
        out[rid] = max_compatible_count(instance, conflicts, usable, rid)
    return out


def _check_deadline(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise _Timeout


def _bnb_best_value(
    ws: _Workspace, n_radii: int, deadline: float | None
) -> tuple[int, list[int] | None, bool]:
    """Best achievable min-capacity over size-n subsets, plus one witness subset.

    The third element reports whether the deadline cut the search short;
    the incumbent found so far is still returned.
    """
    order = sorted(ws.ids, key=lambda r: (-ws.capacity(r), r))
    best = 0
    best_subset: list[int] | None = None

    def dfs(pool: list[int], chosen: list[int], masks: list[int]) -> None:
        nonlocal best, best_subset
        need = n_radii - len(chosen)
        for i, rid in enumerate(pool):
            _check_deadline(deadline)
            if len(pool) - i < need:
                return
            new_masks = []
            bound = None
            viable = True
            for c, m in zip(chosen, masks):
                m2 = m & ~ws.conflicts.cross_blocked_mask(c, rid)
                q = ws.mis(c, m2)
                if q <= best:
                    viable = False
                    break
                new_masks.append(m2)
                bound = q if bound is None else min(bound, q)
            if not viable:
                continue
            mask_r = ws.usable_mask(rid, chosen)
            q_r = ws.mis(rid, mask_r)
            if q_r <= best:
                continue
            new_masks.append(mask_r)
            bound = q_r if bound is None else min(bound, q_r)
            new_chosen = chosen + [rid]
            if need == 1:
                best = bound
                best_subset = sorted(new_chosen)
                continue
            child_pool = [
                r2
                for r2 in pool[i + 1:]
                if ws.mis(r2, ws.usable_mask(r2, new_chosen)) > best
            ]
            if len(child_pool) >= need - 1:
                dfs(child_pool, new_chosen, new_masks)

    try:
        dfs(order, [], [])
    except _Timeout:
        return best, best_subset, True
    return best, best_subset, False


def _threshold_search(
    ws: _Workspace, n_radii: int, target: int, deadline: float | None
) -> list[int] | None:
    """First subset, in ascending-id order, with every capacity >= target.

    Enumerating candidates in ascending id order makes the first hit the
    lexicographically smallest qualifying subset.
    """

    def dfs(pool: list[int], chosen: list[int], masks: list[int]) -> list[int] | None:
        need = n_radii - len(chosen)
        for i, rid in enumerate(pool):
            _check_deadline(deadline)
            if len(pool) - i < need:
                return None
            new_masks = []
            viable = True
            for c, m in zip(chosen, masks):
                m2 = m & ~ws.conflicts.cross_blocked_mask(c, rid)
                if ws.mis(c, m2) < target:
                    viable = False
                    break
                new_masks.append(m2)
            if not viable:
                continue
            mask_r = ws.usable_mask(rid, chosen)
            if ws.mis(rid, mask_r) < target:
                continue
            new_chosen = chosen + [rid]
            if need == 1:
                return new_chosen
            new_masks.append(mask_r)
            child_pool = [
                r2
                for r2 in pool[i + 1:]
                if ws.mis(r2, ws.usable_mask(r2, new_chosen)) >= target
            ]
            if len(child_pool) >= need - 1:
                found = dfs(child_pool, new_chosen, new_masks)
                if found is not None:
                    return found
        return None

    root = [r for r in ws.ids if ws.capacity(r) >= target]
    if len(root) < n_radii:
        return None
    return dfs(root, [], [])


def _exhaustive_best(
    ws: _Workspace, n_radii: int, deadline: float | None
) -> tuple[int, list[int] | None, bool]:
    """Evaluate every size-n subset in ascending-id order; keep strict improvements."""
    best = 0
    best_subset: list[int] | None = None
    for subset in combinations(ws.ids, n_radii):
        try:
            _check_deadline(deadline)
        except _Timeout:
            return best, best_subset, True
        worst = None
        for rid in subset:
            mask = ws.usable_mask(rid, (o for o in subset if o != rid))
            q = ws.mis(rid, mask)
            if worst is None or q < worst:
                worst = q
            if worst <= best:
                break
        if worst is not None and worst > best:
            best = worst
            best_subset = list(subset)
    return best, best_subset, False


def _assemble(
    instance: Instance,
    conflicts: ConflictSet,
    subset: list[int],
    trim: bool,
    status: str,
) -> ParallelismSolution:
    evaluated = evaluate_subset(instance, conflicts, set(subset))
    counts = {rid: q for rid, (q, _) in evaluated.items()}
    p = min(counts.values())
    selections: dict[int, tuple[int, ...]] = {}
    for rid in sorted(subset):
        witness = evaluated[rid][1]
        if trim:
            witness = witness[:p]
            counts[rid] = p
        selections[rid] = witness
    return ParallelismSolution(tuple(sorted(subset)), selections, counts, p, status)


def solve_max_parallelism(
    instance: Instance,
    conflicts: ConflictSet,
    n_radii: int,
    config: SolveConfig | None = None,
) -> ParallelismSolution:
    """Exact solve of the max-min carrier-count problem.

    Returns status ``optimal`` with the lexicographically smallest
    optimal solution, ``infeasible`` when no size-``n_radii`` subset keeps
    every chosen radius at capacity >= 1 (this covers ``n_radii`` larger
    than the instance), or ``incumbent-timeout`` with the best incumbent
    (possibly empty) when the time limit expires.
    """
    if config is None:
        config = SolveConfig()
    if n_radii < 1:
        raise ValueError("n_radii must be >= 1")
    if n_radii > len(instance.radii):
        return ParallelismSolution((), {}, {}, None, INFEASIBLE)
    deadline = config.deadline()
    ws = _Workspace(instance, conflicts)
    if config.method == METHOD_EXHAUSTIVE:
        best, subset, timed_out = _exhaustive_best(ws, n_radii, deadline)
    else:
        best, subset, timed_out = _bnb_best_value(ws, n_radii, deadline)
        if subset is not None and not timed_out:
            # Value is proven; swap in the canonical witness subset.
            try:
                canonical = _threshold_search(ws, n_radii, best, deadline)
            except _Timeout:
                canonical, timed_out = None, True
            if canonical is not None:
                subset = canonical
    if subset is None:
        status = INCUMBENT_TIMEOUT if timed_out else INFEASIBLE
        return ParallelismSolution((), {}, {}, None, status)
    status = INCUMBENT_TIMEOUT if timed_out else OPTIMAL
    return _assemble(instance, conflicts, subset, config.trim_to_p, status)


def oracle_max_parallelism(
    instance: Instance, conflicts: ConflictSet, n_radii: int
) -> ParallelismSolution:
    """Exhaustive reference solver; intended for small instances.

    Enumerates every size-``n_radii`` subset, so it is trustworthy by
    construction and shares nothing with the branch-and-bound search path
    except the per-subset evaluation it is defined by.
    """
    if n_radii < 1:
        raise ValueError("n_radii must be >= 1")
    if n_radii > len(instance.radii):
        return ParallelismSolution((), {}, {}, None, INFEASIBLE)
    ws = _Workspace(instance, conflicts)
    best, subset, _ = _exhaustive_best(ws, n_radii, None)
    if subset is None:
        return ParallelismSolution((), {}, {}, None, INFEASIBLE)
    return _assemble(instance, conflicts, subset, trim=False, status=OPTIMAL)
