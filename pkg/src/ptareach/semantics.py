"""Ground-truth operational semantics and brute-force reachability oracles.

Every reduction pass in this package is validated against the step
functions and explicit-state searches defined here.  Searches are BFS so
returned witnesses are shortest, which keeps golden outputs stable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional

from .automata import (
    POCA,
    PTA,
    AddConst,
    AddParam,
    CmpConst,
    CmpParam,
    ModTest,
    PocaRule,
    PtaRule,
    ZeroOnePTA,
    cmp_holds,
)


@dataclass(frozen=True)
class PtaConfiguration:
    state: str
    valuation: tuple  # ((clock, value), ...) sorted by clock name

    @classmethod
    def make(cls, state: str, valuation: dict) -> "PtaConfiguration":
        return cls(state, tuple(sorted(valuation.items())))

    def value(self, clock: str) -> int:
        for c, v in self.valuation:
            if c == clock:
                return v
        raise KeyError(clock)

    def as_dict(self) -> dict:
        return dict(self.valuation)


@dataclass(frozen=True)
class PocaConfiguration:
    state: str
    counter: int


@dataclass(frozen=True)
class Run:
    """A run of a PTA, 0/1-PTA, or POCA.

    ``labels[i]`` describes the step from ``configs[i]`` to ``configs[i+1]``:
    (rule_index, delay) for PTAs, (rule_index, time_bit) for 0/1-PTAs and a
    bare rule_index for POCAs.  Rule indices refer to the automaton's rule
    tuple (``rules0 + rules1`` for 0/1-PTAs).
    """

    kind: str  # "pta" | "zero-one-pta" | "poca"
    configs: tuple
    labels: tuple

    def __post_init__(self):
        if len(self.configs) != len(self.labels) + 1:
            raise ValueError("a run needs exactly one more config than labels")
        if self.kind not in ("pta", "zero-one-pta", "poca"):
            raise ValueError(f"unknown run kind: {self.kind}")

    def __len__(self):
        return len(self.labels)

    # POCA-run accessors
    def counter_values(self) -> set:
        return {c.counter for c in self.configs}

    def delta(self) -> int:
        return self.configs[-1].counter - self.configs[0].counter

    def minimum(self) -> int:
        return min(self.counter_values())

    def maximum(self) -> int:
        return max(self.counter_values())

    def subrun(self, c: int, d: int) -> "Run":
        if not 0 <= c <= d <= len(self):
            raise ValueError("subrun endpoints out of range")
        return Run(self.kind, self.configs[c : d + 1], self.labels[c:d])

    def concat(self, other: "Run") -> "Run":
        if self.kind != other.kind or self.configs[-1] != other.configs[0]:
            raise ValueError("concatenation requires matching end configurations")
        return Run(self.kind, self.configs + other.configs[1:], self.labels + other.labels)


# ---------------------------------------------------------------------------
# Step functions
# ---------------------------------------------------------------------------


def pta_step(
    pta: PTA, n: int, conf: PtaConfiguration, rule: PtaRule, delay: int
) -> Optional[PtaConfiguration]:
    """One PTA step; None on guard violation, ValueError on malformed input."""
    if rule not in pta.rules:
        raise ValueError("rule does not belong to the automaton")
    if delay < 0:
        raise ValueError("delay must be non-negative")
    vals = conf.as_dict()
    if set(vals) != set(pta.clocks):
        raise ValueError("valuation must be total over the clock set")
    advanced = {c: v + delay for c, v in vals.items()}
    if not rule.guard.holds(advanced[rule.guard.clock], n):
        return None
    for c in rule.resets:
        advanced[c] = 0
    return PtaConfiguration.make(rule.dst, advanced)


def zero_one_step(
    b: ZeroOnePTA, n: int, conf: PtaConfiguration, rule: PtaRule, i: int
) -> Optional[PtaConfiguration]:
    """One 0/1-PTA step with time bit i; None on guard violation."""
    if i not in (0, 1):
        raise ValueError("time bit must be 0 or 1")
    if rule not in b.rules(i):
        raise ValueError("rule does not belong to the indicated rule set")
    vals = conf.as_dict()
    if set(vals) != set(b.clocks):
        raise ValueError("valuation must be total over the clock set")
    advanced = {c: v + i for c, v in vals.items()}
    if not rule.guard.holds(advanced[rule.guard.clock], n):
        return None
    for c in rule.resets:
        advanced[c] = 0
    return PtaConfiguration.make(rule.dst, advanced)


def apply_op(op, n: int, z: int, enforce_comparisons: bool = True) -> Optional[int]:
    """Apply one counter operation; None when an enforced test fails."""
    return _poca_apply(op, n, z, enforce_comparisons)


def _poca_apply(op, n: int, z: int, enforce_comparisons: bool) -> Optional[int]:
    if isinstance(op, AddConst):
        return z + op.value
    if isinstance(op, AddParam):
        return z + op.sign * n
    if isinstance(op, ModTest):
        return z if z % op.value == 0 else None
    if isinstance(op, CmpConst):
        if enforce_comparisons and not cmp_holds(z, op.cmp, op.value):
            return None
        return z
    if isinstance(op, CmpParam):
        if enforce_comparisons and not cmp_holds(z, op.cmp, n):
            return None
        return z
    raise ValueError(f"unknown counter operation: {op!r}")


def poca_step(
    poca: POCA, n: int, conf: PocaConfiguration, rule: PocaRule
) -> Optional[PocaConfiguration]:
    """One POCA transition; None on test violation."""
    if rule not in poca.rules:
        raise ValueError("rule does not belong to the automaton")
    if rule.src != conf.state:
        raise ValueError("rule source does not match the configuration")
    z = _poca_apply(rule.op, n, conf.counter, enforce_comparisons=True)
    return None if z is None else PocaConfiguration(rule.dst, z)


def semitransition_step(
    poca: POCA, n: int, conf: PocaConfiguration, rule: PocaRule
) -> Optional[PocaConfiguration]:
    """Like poca_step but comparison tests always pass; modulo still enforced."""
    if rule not in poca.rules:
        raise ValueError("rule does not belong to the automaton")
    if rule.src != conf.state:
        raise ValueError("rule source does not match the configuration")
    z = _poca_apply(rule.op, n, conf.counter, enforce_comparisons=False)
    return None if z is None else PocaConfiguration(rule.dst, z)


# ---------------------------------------------------------------------------
# Brute-force oracles
# ---------------------------------------------------------------------------


def _saturate(vals: dict, cap: int) -> tuple:
    return tuple(sorted((c, min(v, cap)) for c, v in vals.items()))


def pta_reach_bruteforce(pta: PTA, n: int, clock_cap: int) -> Optional[Run]:
    """BFS reachability for a PTA at parameter value n.

    Clock values saturate at clock_cap during the search; the returned run is
    replayed under exact semantics, which is sound because no guard can
    distinguish values >= clock_cap when clock_cap > max(n, max consts).
    """
    consts = pta.consts()
    needed = max(n, max(consts, default=0)) + 1
    if clock_cap < needed:
        raise ValueError(f"clock_cap {clock_cap} below required {needed}")

    clocks = sorted(pta.clocks)
    start = tuple((c, 0) for c in clocks)
    init = (pta.initial, start)
    parents = {init: None}
    queue = deque([init])
    goal = None
    if pta.initial in pta.finals:
        goal = init
    while queue and goal is None:
        state, vals = queue.popleft()
        base = dict(vals)
        for ridx, rule in enumerate(pta.rules):
            if rule.src != state:
                continue
            for delay in range(clock_cap + 1):
                advanced = {c: min(v + delay, clock_cap) for c, v in base.items()}
                if not rule.guard.holds(advanced[rule.guard.clock], n):
                    continue
                for c in rule.resets:
                    advanced[c] = 0
                nxt = (rule.dst, _saturate(advanced, clock_cap))
                if nxt not in parents:
                    parents[nxt] = ((state, vals), (ridx, delay))
                    if rule.dst in pta.finals:
                        goal = nxt
                        break
                    queue.append(nxt)
            if goal is not None:
                break
    if goal is None:
        return None

    labels = []
    node = goal
    while parents[node] is not None:
        prev, label = parents[node]
        labels.append(label)
        node = prev
    labels.reverse()

    # Replay the label sequence under exact (unsaturated) semantics.
    conf = PtaConfiguration.make(pta.initial, {c: 0 for c in clocks})
    configs = [conf]
    for ridx, delay in labels:
        conf = pta_step(pta, n, conf, pta.rules[ridx], delay)
        assert conf is not None, "saturated witness failed exact replay"
        configs.append(conf)
    return Run("pta", tuple(configs), tuple(labels))


def zero_one_reach_bruteforce(b: ZeroOnePTA, n: int, clock_cap: int) -> Optional[Run]:
    """BFS reachability for a 0/1-PTA with clock saturation at clock_cap."""
    consts = {c for c in b.consts()}
    needed = max(n, max(consts, default=0)) + 1
    if clock_cap < needed:
        raise ValueError(f"clock_cap {clock_cap} below required {needed}")

    clocks = sorted(b.clocks)
    all_rules = b.rules0 + b.rules1
    init = (b.initial, tuple((c, 0) for c in clocks))
    parents = {init: None}
    queue = deque([init])
    goal = init if b.initial in b.finals else None
    while queue and goal is None:
        state, vals = queue.popleft()
        base = dict(vals)
        for i in (0, 1):
            offset = 0 if i == 0 else len(b.rules0)
            for j, rule in enumerate(b.rules(i)):
                if rule.src != state:
                    continue
                advanced = {c: min(v + i, clock_cap) for c, v in base.items()}
                if not rule.guard.holds(advanced[rule.guard.clock], n):
                    continue
                for c in rule.resets:
                    advanced[c] = 0
                nxt = (rule.dst, tuple(sorted(advanced.items())))
                if nxt not in parents:
                    parents[nxt] = ((state, vals), (offset + j, i))
                    if rule.dst in b.finals:
                        goal = nxt
                        break
                    queue.append(nxt)
            if goal is not None:
                break
    if goal is None:
        return None

    labels = []
    node = goal
    while parents[node] is not None:
        prev, label = parents[node]
        labels.append(label)
        node = prev
    labels.reverse()

    conf = PtaConfiguration.make(b.initial, {c: 0 for c in clocks})
    configs = [conf]
    for ridx, i in labels:
        conf = zero_one_step(b, n, conf, all_rules[ridx], i)
        assert conf is not None, "saturated witness failed exact replay"
        configs.append(conf)
    return Run("zero-one-pta", tuple(configs), tuple(labels))


def zero_one_reach_configs(
    b: ZeroOnePTA,
    n: int,
    start: PtaConfiguration,
    coord_cap: int,
    rule_filter: Optional[Callable[[PtaRule], bool]] = None,
    valuation_pred: Optional[Callable[[dict], bool]] = None,
) -> set:
    """Exact-configuration forward reachability for bounded 0/1-PTA searches.

    Explores configurations with every clock value <= coord_cap, optionally
    restricted to rules passing rule_filter and valuations passing
    valuation_pred.  Returns the set of reached (state, valuation) pairs.
    """
    if valuation_pred is not None and not valuation_pred(start.as_dict()):
        return set()
    seen = {(start.state, start.valuation)}
    queue = deque(seen)
    while queue:
        state, vals = queue.popleft()
        base = dict(vals)
        for i in (0, 1):
            for rule in b.rules(i):
                if rule.src != state:
                    continue
                if rule_filter is not None and not rule_filter(rule):
                    continue
                advanced = {c: v + i for c, v in base.items()}
                if max(advanced.values(), default=0) > coord_cap:
                    continue
                if not rule.guard.holds(advanced[rule.guard.clock], n):
                    continue
                for c in rule.resets:
                    advanced[c] = 0
                if valuation_pred is not None and not valuation_pred(advanced):
                    continue
                nxt = (rule.dst, tuple(sorted(advanced.items())))
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return seen


def poca_reach_bounded(poca: POCA, n: int, lo: int, hi: int) -> Optional[Run]:
    """Shortest accepting run with all counter values inside [lo, hi].

    Accepting means: starts at initial(0), ends in a final state.  No
    counter-zero normalization is imposed here.
    """
    if not lo <= 0 <= hi:
        raise ValueError("window must satisfy lo <= 0 <= hi")

    by_src = {}
    for idx, rule in enumerate(poca.rules):
        by_src.setdefault(rule.src, []).append((idx, rule))

    init = (poca.initial, 0)
    parents = {init: None}
    queue = deque([init])
    goal = init if poca.initial in poca.finals else None
    while queue and goal is None:
        state, z = queue.popleft()
        for idx, rule in by_src.get(state, ()):
            z2 = _poca_apply(rule.op, n, z, enforce_comparisons=True)
            if z2 is None or not lo <= z2 <= hi:
                continue
            nxt = (rule.dst, z2)
            if nxt not in parents:
                parents[nxt] = ((state, z), idx)
                if rule.dst in poca.finals:
                    goal = nxt
                    break
                queue.append(nxt)
    if goal is None:
        return None

    labels = []
    node = goal
    while parents[node] is not None:
        prev, label = parents[node]
        labels.append(label)
        node = prev
    labels.reverse()
    configs = [PocaConfiguration(poca.initial, 0)]
    for idx in labels:
        configs.append(
            PocaConfiguration(poca.rules[idx].dst, _poca_apply(poca.rules[idx].op, n, configs[-1].counter, True))
        )
    return Run("poca", tuple(configs), tuple(labels))


# ---------------------------------------------------------------------------
# Run validation
# ---------------------------------------------------------------------------


def validate_run(run: Run, automaton, n: int) -> tuple:
    """Replay a run through exact semantics.

    Returns (True, None) or (False, first_failing_step_index).
    """
    for i, label in enumerate(run.labels):
        conf = run.configs[i]
        try:
            if run.kind == "pta":
                ridx, delay = label
                nxt = pta_step(automaton, n, conf, automaton.rules[ridx], delay)
            elif run.kind == "zero-one-pta":
                ridx, bit = label
                all_rules = automaton.rules0 + automaton.rules1
                nxt = zero_one_step(automaton, n, conf, all_rules[ridx], bit)
            else:
                nxt = poca_step(automaton, n, conf, automaton.rules[label])
        except (ValueError, IndexError):
            return (False, i)
        if nxt is None or nxt != run.configs[i + 1]:
            return (False, i)
    return (True, None)
