"""Reachable counter values of +0/+1 one-counter automata as AP unions.

A one-counter automaton with only +0/+1 updates is a unary NFA: +1 rules are
letters, +0 rules epsilon moves.  The set of counter values reachable at a
target state from source(0) is a finite union of arithmetic progressions
a + b*N.  Construction: singletons below |Q|^2 by layered search, plus one
progression per (cyclic state s, residue r): period = shortest cycle length
through s, offset = minimal weight of an accepted walk through s with that
weight residue.  Any accepted weight >= |Q|^2 has a witness revisiting some
state, so it falls into one of these progressions; minimal offsets stay
below 2|Q|^2 because a longer minimal witness would contain an excisable
cycle-multiple on one side of its s-visit.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

from .automata import POCA, AddConst


class CapViolation(Exception):
    """The construction exceeded the advertised caps; indicates a bug."""


@dataclass(frozen=True)
class APSet:
    """Normalized finite union of arithmetic progressions.

    Pairs (a, b) with period b >= 1 denote {a, a+b, a+2b, ...}; period 0
    encodes the singleton {a}.  Normal form: sorted, no pair subsumed by
    another.
    """

    pairs: tuple

    @classmethod
    def from_pairs(cls, pairs) -> "APSet":
        return cls(_normalize(pairs))

    def __contains__(self, t: int) -> bool:
        return apset_member(self, t)

    def is_empty(self) -> bool:
        return not self.pairs

    def max_offset(self) -> int:
        return max((a for a, _ in self.pairs), default=0)

    def periods(self) -> tuple:
        return tuple(sorted({b for _, b in self.pairs if b >= 1}))


def _subsumed(pair, other) -> bool:
    a, b = pair
    a2, b2 = other
    if pair == other:
        return False
    if b2 < 1:
        return False
    if b != 0 and b % b2 != 0:
        return False
    return a >= a2 and (a - a2) % b2 == 0


def _normalize(pairs) -> tuple:
    todo = sorted(set(pairs))
    kept = []
    for pair in todo:
        if any(_subsumed(pair, other) for other in todo if other != pair):
            continue
        kept.append(pair)
    return tuple(kept)


def apset_member(s: APSet, t: int) -> bool:
    if t < 0:
        return False
    for a, b in s.pairs:
        if b == 0:
            if t == a:
                return True
        elif t >= a and (t - a) % b == 0:
            return True
    return False


def apset_contains_zero(s: APSet) -> bool:
    return apset_member(s, 0)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def _letter_graph(oca: POCA):
    """Left-epsilon-closed letter edges plus epsilon ancestry per state.

    Returns (succ, eps_reach) where succ[s] is the set of states reachable
    with exactly one +1 rule after any number of +0 rules, and eps_reach[s]
    the states reachable by +0 rules alone (including s).
    """
    eps, ones = {}, {}
    for rule in oca.rules:
        if not isinstance(rule.op, AddConst) or rule.op.value not in (0, 1):
            raise ValueError(f"unsupported operation for a +0/+1 automaton: {rule.op}")
        target = ones if rule.op.value == 1 else eps
        target.setdefault(rule.src, set()).add(rule.dst)

    eps_reach = {}
    for s in oca.states:
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v in eps.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        eps_reach[s] = seen

    succ = {
        s: {w for u in eps_reach[s] for w in ones.get(u, ())} for s in oca.states
    }
    return succ, eps_reach


def _restrict(succ, sources, accept):
    """States reachable from the sources and co-reachable to the accept set."""
    fwd = set(sources)
    queue = deque(fwd)
    while queue:
        u = queue.popleft()
        for v in succ[u]:
            if v not in fwd:
                fwd.add(v)
                queue.append(v)
    pred = {}
    for u in fwd:
        for v in succ[u]:
            if v in fwd:
                pred.setdefault(v, set()).add(u)
    bwd = set(accept) & fwd
    queue = deque(bwd)
    while queue:
        v = queue.popleft()
        for u in pred.get(v, ()):
            if u not in bwd:
                bwd.add(u)
                queue.append(u)
    return fwd & bwd


def _shortest_cycle_lengths(succ, nodes) -> dict:
    """Length of the shortest letter-cycle through each node (absent if none)."""
    out = {}
    for s in nodes:
        dist = {s: 0}
        queue = deque([s])
        best = None
        while queue:
            u = queue.popleft()
            for v in succ[u]:
                if v == s:
                    cand = dist[u] + 1
                    best = cand if best is None else min(best, cand)
                elif v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        if best is not None:
            out[s] = best
    return out


def _min_weight_per_residue(edges, start_set, modulus, node_set):
    """Minimal letter-walk weight per (node, weight mod modulus) class."""
    dist = {}
    heap = []
    for s in start_set:
        if s in node_set and (s, 0) not in dist:
            dist[(s, 0)] = 0
            heap.append((0, s, 0))
    heapq.heapify(heap)
    while heap:
        d, u, r = heapq.heappop(heap)
        if dist.get((u, r)) != d:
            continue
        r2 = (r + 1) % modulus
        for v in edges[u]:
            if v not in node_set:
                continue
            key = (v, r2)
            if d + 1 < dist.get(key, float("inf")):
                dist[key] = d + 1
                heapq.heappush(heap, (d + 1, v, r2))
    return dist


def reach_lengths(oca: POCA, source: str, target: str) -> APSet:
    """The set {n : source(0) reaches target(n)} as a normalized APSet.

    The input must have +0/+1 updates only (no tests, no parameters).
    Enforced caps relative to n = |Q|: offsets <= 2n^2, periods <= n, and at
    most 4n^2 progressions; exceeding them raises CapViolation.
    """
    if oca.params:
        raise ValueError("reach_lengths expects a parameter-free automaton")
    if source not in oca.states or target not in oca.states:
        raise ValueError("source/target must be declared states")
    succ, eps_reach = _letter_graph(oca)
    n = len(oca.states)

    accept = {s for s in oca.states if target in eps_reach[s]}
    relevant = _restrict(succ, {source}, accept)
    if source not in relevant:
        return APSet.from_pairs(())

    # Membership for weights below n^2, by layered subset search.  Weights
    # >= n^2 always admit a witness revisiting a cyclic state, so they are
    # covered by the progressions constructed below.
    singles = []
    layer = {source}
    for t in range(n * n):
        if layer & accept:
            singles.append((t, 0))
        layer = {v for u in layer for v in succ[u] if v in relevant}
        if not layer:
            break

    cycle_len = _shortest_cycle_lengths(
        {u: {v for v in succ[u] if v in relevant} for u in relevant}, relevant
    )

    pairs = list(singles)
    edges = {u: {v for v in succ[u] if v in relevant} for u in relevant}
    redges = {u: set() for u in relevant}
    for u in relevant:
        for v in edges[u]:
            redges[v].add(u)

    for b in sorted({b for b in cycle_len.values()}):
        fwd = _min_weight_per_residue(edges, {source}, b, relevant)
        bwd = _min_weight_per_residue(redges, accept & relevant, b, relevant)
        for s, b_s in cycle_len.items():
            if b_s != b:
                continue
            for rho in range(b):
                best = None
                for r1 in range(b):
                    d1 = fwd.get((s, r1))
                    d2 = bwd.get((s, (rho - r1) % b))
                    if d1 is not None and d2 is not None:
                        cand = d1 + d2
                        best = cand if best is None else min(best, cand)
                if best is not None:
                    pairs.append((best, b))

    result = APSet.from_pairs(pairs)
    _enforce_caps(result, n)
    return result


def _enforce_caps(s: APSet, n: int) -> None:
    if len(s.pairs) > 4 * n * n:
        raise CapViolation(f"{len(s.pairs)} progressions exceed 4*|Q|^2")
    for a, b in s.pairs:
        if a > 2 * n * n:
            raise CapViolation(f"offset {a} exceeds 2*|Q|^2 = {2 * n * n}")
        if b > n:
            raise CapViolation(f"period {b} exceeds |Q| = {n}")
