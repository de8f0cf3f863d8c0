"""Seeded local-search graph bipartition.

Fiduccia-Mattheyses-style single-vertex moves over a weighted adjacency
map: every vertex is moved at most once per pass, the best prefix of
the move sequence is kept, and passes repeat until no improvement.
Balance enters as a soft penalty, so the search can wander through
imbalanced states but settles inside the window.  Restarts with fresh
seeds run independently; the best (objective, then seed) wins, keeping
results reproducible.
"""

from __future__ import annotations

import heapq
import random

Adjacency = dict[int, dict[int, int]]  # u -> {v: shared-index count}

_BALANCE_PENALTY = 4.0  # per vertex outside the window; > max plausible edge gain


def _grow_blob(side, adj, rr, locked_a, target, movable):
    """Randomized BFS growth of side 1 up to ``target`` vertices."""
    seen = {v for v in side if side[v] == 1}
    queue = list(seen)
    while len(seen) < target:
        if not queue:
            rest = [v for v in movable if v not in seen]
            if not rest:
                break
            pick = rest[rr.randrange(len(rest))]
            side[pick] = 1
            seen.add(pick)
            queue.append(pick)
            continue
        u = queue.pop(rr.randrange(len(queue)))
        for w in sorted(adj.get(u, {})):
            if w in side and w not in seen and w not in locked_a:
                side[w] = 1
                seen.add(w)
                queue.append(w)
                if len(seen) >= target:
                    break


def cut_weight(adj: Adjacency, side: dict[int, int]) -> int:
    total = 0
    for u, nbrs in adj.items():
        for v, w in nbrs.items():
            if u < v and side[u] != side[v]:
                total += w
    return total


def _objective(cut: float, size_b: int, n: int, window) -> float:
    if window is None:
        return cut
    lo, hi = window
    lo_n, hi_n = lo * n, hi * n
    over = max(0.0, lo_n - size_b, size_b - hi_n)
    return cut + _BALANCE_PENALTY * over


def _one_pass(adj, side, movable, n, window):
    """One FM pass; mutates ``side`` to the best prefix found."""
    # D[v]: cut reduction if v switches sides
    d = {}
    for v in movable:
        ext = int_ = 0
        for u, w in adj.get(v, {}).items():
            if side[u] == side[v]:
                int_ += w
            else:
                ext += w
        d[v] = ext - int_
    cut = cut_weight(adj, side)
    size_b = sum(1 for v in side if side[v] == 1)
    obj = _objective(cut, size_b, n, window)

    heap = []  # (-gain proxy, v); gains rechecked lazily on pop
    for v in movable:
        heapq.heappush(heap, (-d[v], v))
    moved: set[int] = set()
    best_obj = obj
    trail: list[int] = []
    best_len = 0
    counts = {0: n - size_b, 1: size_b}

    while heap:
        negd, v = heapq.heappop(heap)
        if v in moved:
            continue
        if -negd != d[v]:  # stale entry; reinsert the current gain
            heapq.heappush(heap, (-d[v], v))
            continue
        src = side[v]
        if counts[src] <= 1:  # never empty a side
            moved.add(v)
            continue
        new_size_b = size_b + (1 if src == 0 else -1)
        new_cut = cut - d[v]
        new_obj = _objective(new_cut, new_size_b, n, window)
        side[v] = 1 - src
        counts[src] -= 1
        counts[1 - src] += 1
        moved.add(v)
        trail.append(v)
        cut, size_b, obj = new_cut, new_size_b, new_obj
        for u, w in adj.get(v, {}).items():
            if u in d and u not in moved:
                # v just switched onto u's side: their edge became internal
                d[u] += -2 * w if side[u] == side[v] else 2 * w
                heapq.heappush(heap, (-d[u], u))
        d[v] = -d[v]
        if obj < best_obj - 1e-12:
            best_obj = obj
            best_len = len(trail)

    for v in reversed(trail[best_len:]):  # roll back past the best prefix
        side[v] = 1 - side[v]
    return best_obj


def bipartition(
    nodes: list[int],
    adj: Adjacency,
    locked_a: set[int],
    locked_b: set[int],
    rng: random.Random,
    restarts: int = 8,
    balance_window: tuple[float, float] | None = (0.25, 0.75),
    max_passes: int = 12,
    grow_b: bool = False,
) -> tuple[set[int], set[int], int]:
    """Split ``nodes`` into (A, B) minimizing the weighted cut.

    Locked vertices never move.  With ``grow_b`` the initial B side is
    grown from ``locked_b`` by randomized BFS (used for the head/tail
    cut, where B should hug the open-output region); otherwise the
    start is a random split inside the balance window.
    """
    nodes = sorted(nodes)
    n = len(nodes)
    movable = [v for v in nodes if v not in locked_a and v not in locked_b]
    best = None
    for r in range(max(1, restarts)):
        seed = rng.randrange(1 << 30)
        rr = random.Random(seed)
        side = {v: 0 for v in nodes}
        for v in locked_b:
            side[v] = 1
        if grow_b:
            target = len(locked_b) + (
                rr.randrange(max(1, len(movable) // 2 + 1)) if movable else 0
            )
            if not locked_b and movable:
                side[movable[rr.randrange(len(movable))]] = 1
            _grow_blob(side, adj, rr, locked_a, target, movable)
        else:
            # graph-growing start: a BFS blob reaching the target size
            # refines far better than a random scatter
            lo, hi = balance_window if balance_window else (0.3, 0.7)
            want = rr.randint(int(lo * n), max(int(lo * n), int(hi * n)))
            if movable and not any(side[v] == 1 for v in nodes):
                side[movable[rr.randrange(len(movable))]] = 1
            _grow_blob(side, adj, rr, locked_a, want, movable)
        if not any(s == 1 for s in side.values()) or all(
            side[v] == 1 for v in nodes
        ):
            continue

        prev = None
        for _ in range(max_passes):
            obj = _one_pass(adj, side, movable, n, balance_window)
            if prev is not None and obj >= prev - 1e-12:
                break
            prev = obj
        cut = cut_weight(adj, side)
        size_b = sum(1 for v in nodes if side[v] == 1)
        if size_b == 0 or size_b == n:
            continue
        key = (_objective(cut, size_b, n, balance_window), cut, size_b, r)
        if best is None or key < best[0]:
            best = (key, dict(side), cut)
    if best is None:
        # degenerate fallback: the locked split, padded with one movable
        # vertex if B would otherwise be empty
        b = set(locked_b)
        if not b and movable:
            b.add(movable[0])
        side = {v: (1 if v in b else 0) for v in nodes}
        return (
            {v for v in nodes if side[v] == 0},
            {v for v in nodes if side[v] == 1},
            cut_weight(adj, side),
        )
    _, side, cut = best
    a = {v for v in nodes if side[v] == 0}
    b = {v for v in nodes if side[v] == 1}
    return a, b, cut
