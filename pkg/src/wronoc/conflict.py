"""Conflict relation between resonances and per-radius carrier capacity.

Two resonances conflict when their closed uncertainty intervals
[lmin, lmax] intersect.  Cross-radius conflicts are what cause routing
faults: selecting a carrier that (nearly) coincides with any resonance of
another selected ring would divert the signal onto the wrong path.
Within-radius conflicts limit how many carriers one ring can host at the
same time.

Under a symmetric half-width policy this means two nominals conflict when
they are at most ``2 * half_width`` apart, since both intervals widen by
the half width.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Instance

CROSS = "cross"
WITHIN = "within"


@dataclass(frozen=True, order=True)
class ConflictPair:
    """One conflicting pair; endpoints are (radius id, resonance index)."""

    kind: str
    first: tuple[int, int]
    second: tuple[int, int]


class ConflictSet:
    """Immutable collection of conflict pairs with adjacency indexes.

    Besides the raw pairs, it answers the two queries the solvers need in
    their hot paths: for resonance (r, j), which other resonances does it
    touch; and for an ordered radius pair (r, r'), which indices of r are
    blocked by *any* resonance of r' (as a bitmask over indices of r).
    """

    __slots__ = ("pairs", "_adjacency", "_cross_block")

    def __init__(self, pairs: frozenset[ConflictPair]):
        self.pairs = frozenset(pairs)
        adjacency: dict[tuple[int, int], list[tuple[int, int]]] = {}
        cross_block: dict[tuple[int, int], int] = {}
        for p in self.pairs:
            adjacency.setdefault(p.first, []).append(p.second)
            adjacency.setdefault(p.second, []).append(p.first)
            if p.kind == CROSS:
                (r1, i1), (r2, i2) = p.first, p.second
                cross_block[r1, r2] = cross_block.get((r1, r2), 0) | (1 << i1)
                cross_block[r2, r1] = cross_block.get((r2, r1), 0) | (1 << i2)
        self._adjacency = {k: tuple(sorted(v)) for k, v in adjacency.items()}
        self._cross_block = cross_block

    def neighbors(self, radius_id: int, index: int) -> tuple[tuple[int, int], ...]:
        return self._adjacency.get((radius_id, index), ())

    def cross_blocked_mask(self, radius_id: int, other_id: int) -> int:
        """Bitmask over indices of `radius_id` blocked by resonances of `other_id`."""
        return self._cross_block.get((radius_id, other_id), 0)

    def cross_pairs(self) -> list[ConflictPair]:
        return sorted(p for p in self.pairs if p.kind == CROSS)

    def within_pairs(self) -> list[ConflictPair]:
        return sorted(p for p in self.pairs if p.kind == WITHIN)

    def __len__(self) -> int:
        return len(self.pairs)


def conflicts_of(instance: Instance) -> ConflictSet:
    """Compute all cross- and within-radius conflict pairs of an instance.

    A pair is present iff the two closed intervals intersect; equal
    nominals always conflict since both intervals contain the nominal.
    Uses a sweep over intervals sorted by lmin, so the cost is
    O(n log n + pairs) rather than a full pairwise scan.
    """
    items: list[tuple[int, int, int, int]] = []  # (lmin, lmax, rid, idx)
    for e in instance.radii:
        for j, r in enumerate(e.resonances):
            items.append((r.lmin, r.lmax, e.id, j))
    items.sort()
    pairs: set[ConflictPair] = set()
    n = len(items)
    for i in range(n):
        lmin_i, lmax_i, rid_i, idx_i = items[i]
        for k in range(i + 1, n):
            lmin_k, lmax_k, rid_k, idx_k = items[k]
            if lmin_k > lmax_i:
                break
            a, b = (rid_i, idx_i), (rid_k, idx_k)
            if a > b:
                a, b = b, a
            pairs.add(ConflictPair(WITHIN if rid_i == rid_k else CROSS, a, b))
    return ConflictSet(frozenset(pairs))


def usable_resonances(
    instance: Instance,
    conflicts: ConflictSet,
    selected: set[int] | frozenset[int],
    radius_id: int,
) -> list[int]:
    """Indices of `radius_id` selectable when `selected` radii are all chosen.

    A resonance is usable iff it has no cross conflict with *any*
    resonance of any other selected radius (selecting it would otherwise
    force that radius out of the selection entirely).
    """
    if radius_id not in selected:
        raise ValueError(f"radius {radius_id} is not in the selected set")
    entry = instance.entry(radius_id)
    mask = (1 << len(entry.resonances)) - 1
    for other in selected:
        if other != radius_id:
            mask &= ~conflicts.cross_blocked_mask(radius_id, other)
    return [j for j in range(len(entry.resonances)) if mask >> j & 1]


def max_compatible_count(
    instance: Instance,
    conflicts: ConflictSet,
    usable: list[int],
    radius_id: int,
) -> tuple[int, tuple[int, ...]]:
    """Largest pairwise conflict-free subset of `usable` indices of one radius.

    Within one radius the conflict graph is an interval graph (each
    resonance is the interval [lmin, lmax] on the wavelength axis), so the
    maximum independent set is found exactly by the greedy activity
    selection scan over intervals in ascending lmax order; the brute-force
    oracle in the test suite guards that claim.  The returned witness is
    the lexicographically smallest maximum-cardinality subset (by index),
    which keeps solver output canonical.
    """
    entry = instance.entry(radius_id)
    res = entry.resonances
    indices = sorted(set(usable))
    for j in indices:
        if not 0 <= j < len(res):
            raise ValueError(f"index {j} out of range for radius {radius_id}")

    def greedy_count(cands: list[int], floor: int) -> int:
        # cands: indices with lmin > floor allowed; scan in ascending lmax.
        count, end = 0, floor
        for j in sorted(cands, key=lambda j: (res[j].lmax, j)):
            if res[j].lmin > end:
                count += 1
                end = res[j].lmax
        return count

    total = greedy_count(indices, -1)
    witness: list[int] = []
    end = -1
    remaining_needed = total
    for pos, j in enumerate(indices):
        if remaining_needed == 0:
            break
        if res[j].lmin <= end:
            continue
        new_end = max(end, res[j].lmax)
        tail = [k for k in indices[pos + 1:] if res[k].lmin > new_end]
        if 1 + greedy_count(tail, new_end) >= remaining_needed:
            witness.append(j)
            end = new_end
            remaining_needed -= 1
    return total, tuple(witness)
