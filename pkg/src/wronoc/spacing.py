"""Phase 2: spread the selected carriers as evenly as possible.

Given the carrier count per radius (``n_lambda``, typically the Phase-1
optimum), pick ``n_radii`` radii and an ``n_radii x n_lambda`` carrier
matrix maximising the minimum spacing ``dist_pm`` between nominal
wavelengths.  Two rule sets are supported:

* ``base``: all carriers must be pairwise at least ``dist_pm`` apart, and
  a carrier must not *equal* any resonance of another selected radius
  (pure equality exclusion, independent of the distance).
* ``refined``: a carrier must additionally be at least ``dist_pm`` away
  from every resonance of every other selected radius, selected as a
  carrier or not.  Same-radius non-selected resonances stay
  unconstrained: the same ring routes identically, so proximity to its
  own spectrum cannot misroute.

Exactness comes from a ladder argument: the optimum distance is always a
realised pairwise distance among resonance nominals of the chosen radii
(or the single-carrier sentinel), so a feasibility search binary-searched
over that ladder finds the exact optimum without a continuous search.

Solutions are canonical: rows are built left to right, rows open in
ascending first-carrier order, and ties break toward smaller wavelength
then smaller radius id, so repeated runs are byte-identical.

Two documented modelling alternatives for the refined rules (treating a
carrier as centred on its guard interval, or giving non-selected
resonances full-length guard intervals of their own) are intentionally
not implemented: the first propagates poorly and the second forbids
non-selected resonances from crowding each other, which the hardware does
not require and which would cut off optimal solutions.
"""

from __future__ import annotations

import time
from bisect import bisect_left, bisect_right, insort
from dataclasses import dataclass
from itertools import combinations, product

from .model import Instance
from .parallelism import INCUMBENT_TIMEOUT, INFEASIBLE, OPTIMAL, SolveConfig

BASE = "base"
REFINED = "refined"


@dataclass(frozen=True)
class SpacingProblem:
    n_radii: int
    n_lambda: int
    mode: str = BASE

    def __post_init__(self):
        if self.n_radii < 1:
            raise ValueError("n_radii must be >= 1")
        if self.n_lambda < 1:
            raise ValueError("n_lambda must be >= 1")
        if self.mode not in (BASE, REFINED):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class SpacingSolution:
    """Rows are in ascending first-carrier order; ``selected_radii[i]`` is
    the radius of ``matrix[i]`` and each row holds ascending resonance
    indices into that radius."""

    selected_radii: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...] = ()
    dist_pm: int | None = None
    status: str = OPTIMAL


class _Timeout(Exception):
    pass


def distance_ladder(
    instance: Instance, selected, n_lambda: int | None = None
) -> tuple[int, ...]:
    """All candidate optimum distances for a radius subset: 0 plus every
    pairwise |difference| among the nominals of the selected radii.

    Any feasible matrix has its binding gap between two such nominals (in
    base mode between two carriers, in refined mode possibly between a
    carrier and a non-selected resonance), so the optimum always lies on
    this ladder.  ``n_lambda`` does not change the candidate set; the
    parameter is kept so callers can pass the problem through unchanged.
    """
    noms: list[int] = []
    for rid in set(selected):
        noms.extend(instance.entry(rid).nominals())
    noms.sort()
    ladder = {0}
    for i in range(len(noms)):
        for j in range(i + 1, len(noms)):
            ladder.add(noms[j] - noms[i])
    return tuple(sorted(ladder))


def dist_upper_bound(instance: Instance, selected, n_lambda: int) -> int:
    """Even-spacing bound: (count-1) * dist cannot exceed the spectrum span
    of the selected radii, so dist <= floor(span / (count-1))."""
    total = len(set(selected)) * n_lambda
    if total < 2:
        raise ValueError("bound undefined for a single carrier")
    noms = [n for rid in set(selected) for n in instance.entry(rid).nominals()]
    return (max(noms) - min(noms)) // (total - 1)


def cross_constraint_ok(
    instance: Instance,
    selected,
    carrier: tuple[int, int],
    dist_pm: int,
    mode: str,
) -> bool:
    """Check one carrier against the spectra of the other selected radii."""
    rid, idx = carrier
    sel = set(selected)
    if rid not in sel:
        raise ValueError(f"carrier radius {rid} is not selected")
    value = instance.entry(rid).resonances[idx].nominal
    for other in sel:
        if other == rid:
            continue
        for res in instance.entry(other).resonances:
            if mode == BASE:
                if res.nominal == value:
                    return False
            elif abs(res.nominal - value) < dist_pm:
                return False
    return True


class _RowSearch:
    """Depth-first construction of a canonical witness matrix.

    Rows are opened in ascending first-carrier order and filled left to
    right; at every slot candidates are tried in ascending (wavelength,
    radius id) order, so the first complete assignment is the
    lexicographically smallest feasible matrix.
    """

    def __init__(self, instance, selected, n_lambda, dist, mode, deadline):
        self.n_lambda = n_lambda
        self.dist = dist
        self.mode = mode
        self.deadline = deadline
        self.sel = sorted(set(selected))
        self.vals = {r: list(instance.entry(r).nominals()) for r in self.sel}
        self.other_set = {}
        self.other_sorted = {}
        for r in self.sel:
            others = [v for o in self.sel if o != r for v in self.vals[o]]
            self.other_set[r] = set(others)
            self.other_sorted[r] = sorted(others)
        self.placed: list[int] = []  # sorted nominal values of placed carriers
        self.rows: list[tuple[int, list[int]]] = []
        self.used: set[int] = set()
        self._steps = 0

    def _tick(self):
        self._steps += 1
        if (
            self.deadline is not None
            and self._steps % 256 == 0
            and time.monotonic() > self.deadline
        ):
            raise _Timeout

    def _ok(self, rid: int, value: int) -> bool:
        if self.dist > 0 and self.placed:
            i = bisect_left(self.placed, value)
            if i < len(self.placed) and self.placed[i] - value < self.dist:
                return False
            if i > 0 and value - self.placed[i - 1] < self.dist:
                return False
        if self.mode == BASE:
            return value not in self.other_set[rid]
        if self.dist > 0:
            others = self.other_sorted[rid]
            i = bisect_left(others, value)
            if i < len(others) and others[i] - value < self.dist:
                return False
            if i > 0 and value - others[i - 1] < self.dist:
                return False
        return True

    def run(self) -> list[tuple[int, tuple[int, ...]]] | None:
        if any(len(self.vals[r]) < self.n_lambda for r in self.sel):
            return None
        return self._open_row(None)

    def _open_row(self, min_first: int | None):
        if len(self.rows) == len(self.sel):
            return [(r, tuple(idxs)) for r, idxs in self.rows]
        tail = self.n_lambda - 1
        cands: list[tuple[int, int, int]] = []
        for r in self.sel:
            if r in self.used:
                continue
            lst = self.vals[r]
            start = 0 if min_first is None else bisect_left(lst, min_first)
            for j in range(start, len(lst)):
                if len(lst) - j - 1 < tail:
                    break
                v = lst[j]
                if self.dist and lst[-1] - v < tail * self.dist:
                    break
                cands.append((v, r, j))
        cands.sort()
        for v, r, j in cands:
            self._tick()
            if not self._ok(r, v):
                continue
            insort(self.placed, v)
            self.rows.append((r, [j]))
            self.used.add(r)
            found = self._fill_row(r, j, 1)
            if found is not None:
                return found
            self.used.remove(r)
            self.rows.pop()
            self.placed.pop(bisect_left(self.placed, v))
        return None

    def _fill_row(self, rid: int, last_j: int, count: int):
        if count == self.n_lambda:
            first_value = self.vals[rid][self.rows[-1][1][0]]
            return self._open_row(first_value + self.dist)
        lst = self.vals[rid]
        tail = self.n_lambda - count - 1
        start = bisect_left(lst, lst[last_j] + self.dist, last_j + 1)
        for j in range(start, len(lst)):
            if len(lst) - j - 1 < tail:
                break
            v = lst[j]
            if self.dist and lst[-1] - v < tail * self.dist:
                break
            self._tick()
            if not self._ok(rid, v):
                continue
            insort(self.placed, v)
            self.rows[-1][1].append(j)
            found = self._fill_row(rid, j, count + 1)
            if found is not None:
                return found
            self.rows[-1][1].pop()
            self.placed.pop(bisect_left(self.placed, v))
        return None


def feasible(
    instance: Instance,
    selected,
    n_lambda: int,
    dist_pm: int,
    mode: str,
) -> list[tuple[int, tuple[int, ...]]] | None:
    """Find a carrier matrix for the given radii at spacing >= dist_pm.

    Returns canonical witness rows ``(radius_id, indices)`` in ascending
    first-carrier order, or None when no assignment satisfies the mode's
    constraints at this distance.
    """
    if dist_pm < 0:
        raise ValueError("dist_pm must be >= 0")
    return _RowSearch(instance, selected, n_lambda, dist_pm, mode, None).run()


def _subset_span_bound(min_nom: int, max_nom: int, total: int) -> int:
    return (max_nom - min_nom) // (total - 1)


def _sentinel_solution(instance: Instance) -> SpacingSolution:
    # A single carrier has no pairwise distance; report the instance span
    # and the canonical witness (lowest radius id, its lowest resonance).
    noms = instance.all_nominals()
    span = max(noms) - min(noms)
    rid = min(instance.ids())
    return SpacingSolution((rid,), ((0,),), span, OPTIMAL)


def solve_spacing(
    instance: Instance, problem: SpacingProblem, config: SolveConfig | None = None
) -> SpacingSolution:
    """Exact max-min spacing over all radius subsets and carrier matrices.

    Search plan: depth-first over radius subsets in ascending id order,
    pruning any branch whose even-spacing bound cannot beat the
    incumbent, then for each surviving subset a binary search for the
    largest feasible ladder distance.  First strict improvement wins, so
    the reported optimum is the lexicographically smallest one.
    """
    if config is None:
        config = SolveConfig()
    if config.method == "exhaustive":
        # Oracle-grade enumeration on request; exact and identically
        # tie-broken, but it ignores the time limit and only suits small
        # inputs.
        return oracle_spacing(instance, problem)
    if problem.n_radii > len(instance.radii):
        return SpacingSolution((), (), None, INFEASIBLE)
    if problem.n_radii * problem.n_lambda == 1:
        return _sentinel_solution(instance)
    deadline = config.deadline()
    total = problem.n_radii * problem.n_lambda
    eligible = [
        e.id
        for e in sorted(instance.radii, key=lambda e: e.id)
        if len(e.resonances) >= problem.n_lambda
    ]
    if len(eligible) < problem.n_radii:
        return SpacingSolution((), (), None, INFEASIBLE)

    bounds = {
        e.id: (min(e.nominals()), max(e.nominals())) for e in instance.radii
    }
    # Two extra admissible caps: a radius hosting n_lambda carriers needs
    # (n_lambda - 1) gaps inside its own comb, and in refined mode one of
    # its carriers must clear the entire spectrum of every co-selected
    # radius, so dist can never exceed its deepest spectral hole there.
    row_cap: dict[int, int] | None = None
    if problem.n_lambda >= 2:
        row_cap = {
            rid: (hi - lo) // (problem.n_lambda - 1)
            for rid, (lo, hi) in bounds.items()
        }
    pair_cap: dict[tuple[int, int], int] = {}
    if problem.mode == REFINED:
        spectra = {rid: instance.entry(rid).nominals() for rid in eligible}

        def deepest_hole(values, others) -> int:
            best = 0
            k = 0
            for v in values:
                while k + 1 < len(others) and others[k + 1] <= v:
                    k += 1
                nearest = abs(others[k] - v)
                if k + 1 < len(others):
                    nearest = min(nearest, others[k + 1] - v)
                if nearest > best:
                    best = nearest
            return best

        for a in eligible:
            for b in eligible:
                if a != b:
                    pair_cap[a, b] = deepest_hole(spectra[a], spectra[b])

    def subset_cap(subset) -> int | None:
        cap: int | None = None
        if row_cap is not None:
            cap = min(row_cap[rid] for rid in subset)
        if pair_cap:
            for a in subset:
                for b in subset:
                    if a != b and (cap is None or pair_cap[a, b] < cap):
                        cap = pair_cap[a, b]
        return cap

    best_d: int | None = None
    best_rows: list[tuple[int, tuple[int, ...]]] | None = None

    def banded_ladder(subset: list[int], floor: int, hi: int) -> list[int]:
        # Candidate distances in (floor, hi] only; building the full
        # quadratic ladder per subset would dominate the whole search.
        noms = sorted(
            n for rid in subset for n in instance.entry(rid).nominals()
        )
        out = {0} if floor < 0 <= hi else set()
        for i, v in enumerate(noms):
            start = bisect_right(noms, v + floor, i + 1)
            stop = bisect_right(noms, v + hi, start)
            for j in range(start, stop):
                out.add(noms[j] - v)
        return sorted(out)

    def leaf(subset: list[int]) -> None:
        nonlocal best_d, best_rows
        ub = dist_upper_bound(instance, subset, problem.n_lambda)
        cap = subset_cap(subset)
        if cap is not None:
            ub = min(ub, cap)
        if best_d is not None and ub <= best_d:
            return
        floor = -1 if best_d is None else best_d
        ladder = banded_ladder(subset, floor, ub)
        if not ladder:
            return
        probe = _RowSearch(
            instance, subset, problem.n_lambda, ladder[0], problem.mode, deadline
        ).run()
        if probe is None:
            return
        lo, hi = 0, len(ladder) - 1
        witness = probe
        while lo < hi:
            mid = (lo + hi + 1) // 2
            w = _RowSearch(
                instance, subset, problem.n_lambda, ladder[mid], problem.mode, deadline
            ).run()
            if w is None:
                hi = mid - 1
            else:
                lo = mid
                witness = w
        best_d = ladder[lo]
        best_rows = witness

    def dfs(pool: list[int], chosen: list[int], lo: int, hi: int) -> None:
        need = problem.n_radii - len(chosen)
        if need == 0:
            leaf(chosen)
            return
        for i, rid in enumerate(pool):
            if deadline is not None and time.monotonic() > deadline:
                raise _Timeout
            rest = pool[i + 1:]
            if len(rest) + 1 < need:
                return
            if best_d is not None:
                if row_cap is not None and row_cap[rid] <= best_d:
                    continue
                if pair_cap and any(
                    pair_cap[rid, c] <= best_d or pair_cap[c, rid] <= best_d
                    for c in chosen
                ):
                    continue
            r_lo, r_hi = bounds[rid]
            new_lo = r_lo if lo == -1 else min(lo, r_lo)
            new_hi = r_hi if hi == -1 else max(hi, r_hi)
            if best_d is not None:
                # Completions draw only from `rest`; bound their reachable span.
                pool_lo, pool_hi = new_lo, new_hi
                for r2 in rest:
                    b = bounds[r2]
                    pool_lo = min(pool_lo, b[0])
                    pool_hi = max(pool_hi, b[1])
                if _subset_span_bound(pool_lo, pool_hi, total) <= best_d:
                    continue
            dfs(rest, chosen + [rid], new_lo, new_hi)

    try:
        dfs(eligible, [], -1, -1)
    except _Timeout:
        if best_rows is None:
            return SpacingSolution((), (), None, INCUMBENT_TIMEOUT)
        rows = tuple(idxs for _, idxs in best_rows)
        radii = tuple(r for r, _ in best_rows)
        return SpacingSolution(radii, rows, best_d, INCUMBENT_TIMEOUT)
    if best_rows is None:
        return SpacingSolution((), (), None, INFEASIBLE)
    rows = tuple(idxs for _, idxs in best_rows)
    radii = tuple(r for r, _ in best_rows)
    return SpacingSolution(radii, rows, best_d, OPTIMAL)


def _matrix_key(rows_ordered, vals):
    """Canonical comparison key: the interleaved (value, radius, values...)
    sequence the depth-first witness search decides in."""
    key: list[int] = []
    for rid, idxs in rows_ordered:
        key.append(vals[rid][idxs[0]])
        key.append(rid)
        key.extend(vals[rid][j] for j in idxs[1:])
    return tuple(key)


def oracle_spacing(instance: Instance, problem: SpacingProblem) -> SpacingSolution:
    """Brute-force reference solver: enumerate every radius subset and every
    carrier matrix, score each directly from the definitions.

    Intended for small inputs (a handful of radii, n_radii * n_lambda up
    to about 8).  Shares nothing with the search path of `solve_spacing`;
    ties break identically (first subset in ascending-id order, then the
    canonical matrix key).
    """
    if problem.n_radii > len(instance.radii):
        return SpacingSolution((), (), None, INFEASIBLE)
    if problem.n_radii * problem.n_lambda == 1:
        return _sentinel_solution(instance)
    vals = {e.id: list(e.nominals()) for e in instance.radii}
    eligible = sorted(r for r in instance.ids() if len(vals[r]) >= problem.n_lambda)
    best_d: int | None = None
    best_rows = None

    for subset in combinations(eligible, problem.n_radii):
        sub_best: int | None = None
        sub_key = None
        sub_rows = None
        others = {
            r: [v for o in subset if o != r for v in vals[o]] for r in subset
        }
        others_set = {r: set(lst) for r, lst in others.items()}
        index_choices = [
            list(combinations(range(len(vals[r])), problem.n_lambda)) for r in subset
        ]
        for pick in product(*index_choices):
            rows = list(zip(subset, pick))
            carriers = [(vals[r][j], r) for r, idxs in rows for j in idxs]
            if problem.mode == BASE and any(
                v in others_set[r] for v, r in carriers
            ):
                continue
            # Binding gap: min pairwise carrier distance, plus in refined
            # mode the distance from each carrier to every resonance of
            # the other selected radii.  The scan aborts as soon as the
            # running minimum falls below the subset incumbent, since the
            # final gap can then no longer win or tie.
            values = sorted(v for v, _ in carriers)
            gap = min(b - a for a, b in zip(values, values[1:]))
            if sub_best is not None and gap < sub_best:
                continue
            if problem.mode == REFINED:
                for v, r in carriers:
                    for w in others[r]:
                        d = abs(v - w)
                        if d < gap:
                            gap = d
                    if sub_best is not None and gap < sub_best:
                        break
                if sub_best is not None and gap < sub_best:
                    continue
            ordered = sorted(rows, key=lambda row: (vals[row[0]][row[1][0]], row[0]))
            key = _matrix_key(ordered, vals)
            if sub_best is None or gap > sub_best or (gap == sub_best and key < sub_key):
                sub_best, sub_key, sub_rows = gap, key, ordered
        if sub_best is not None and (best_d is None or sub_best > best_d):
            best_d = sub_best
            best_rows = sub_rows
    if best_rows is None:
        return SpacingSolution((), (), None, INFEASIBLE)
    radii = tuple(r for r, _ in best_rows)
    rows = tuple(tuple(idxs) for _, idxs in best_rows)
    return SpacingSolution(radii, rows, best_d, OPTIMAL)
