"""Automaton syntax: guards, PTAs, 0/1-PTAs, counter operations, POCAs.

Also houses the size/constant computations and the derived constants
(Z, Gamma, Upsilon, M) used by the run-surgery layer and the solver.
All constant arithmetic is exact big-integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Union

COMPARISONS = ("<", "<=", "=", ">=", ">")

_CMP_ALIASES = {"≤": "<=", "≥": ">=", "==": "="}


def normalize_cmp(sym: str) -> str:
    """Map a comparison symbol to its canonical form, rejecting unknowns."""
    sym = _CMP_ALIASES.get(sym, sym)
    if sym not in COMPARISONS:
        raise ValueError(f"unknown comparison symbol: {sym!r}")
    return sym


def cmp_holds(lhs: int, sym: str, rhs: int) -> bool:
    if sym == "<":
        return lhs < rhs
    if sym == "<=":
        return lhs <= rhs
    if sym == "=":
        return lhs == rhs
    if sym == ">=":
        return lhs >= rhs
    if sym == ">":
        return lhs > rhs
    raise ValueError(f"unknown comparison symbol: {sym!r}")


def bitlen(n: int) -> int:
    """Smallest number of bits to write n in binary: min{i+1 | n <= 2^i}.

    bitlen(0) = bitlen(1) = 1, bitlen(4) = 3.
    """
    if n < 0:
        raise ValueError("bitlen is defined on non-negative integers")
    if n <= 1:
        return 1
    return (n - 1).bit_length() + 1


def lcm_set(values: Iterable[int]) -> int:
    """LCM of a finite set of positive integers; empty set yields 1."""
    vals = list(values)
    if any(v < 1 for v in vals):
        raise ValueError("lcm_set requires every element >= 1")
    return math.lcm(*vals) if vals else 1


def lcm_range(j: int) -> int:
    """LCM of {1, ..., j}."""
    if j < 1:
        raise ValueError("lcm_range requires j >= 1")
    return math.lcm(*range(1, j + 1))


# ---------------------------------------------------------------------------
# Timed automata
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Guard:
    """A single comparison ``clock cmp rhs`` with rhs a constant or parameter."""

    clock: str
    cmp: str
    rhs: Union[int, str]

    def __post_init__(self):
        object.__setattr__(self, "cmp", normalize_cmp(self.cmp))
        if isinstance(self.rhs, bool) or (isinstance(self.rhs, int) and self.rhs < 0):
            raise ValueError("guard constant must be a non-negative integer")

    @property
    def parametric(self) -> bool:
        return isinstance(self.rhs, str)

    def size(self) -> int:
        return 1 if self.parametric else bitlen(self.rhs)

    def holds(self, value: int, n: int) -> bool:
        """Evaluate against a clock value, with parameter value n."""
        rhs = n if self.parametric else self.rhs
        return cmp_holds(value, self.cmp, rhs)

    def __str__(self):
        return f"{self.clock} {self.cmp} {self.rhs}"


@dataclass(frozen=True, order=True)
class PtaRule:
    src: str
    guard: Guard
    resets: frozenset = field(default_factory=frozenset)
    dst: str = ""

    def __post_init__(self):
        object.__setattr__(self, "resets", frozenset(self.resets))


def _check_rule(rule: PtaRule, states, clocks, params) -> None:
    if rule.src not in states or rule.dst not in states:
        raise ValueError(f"rule endpoint not a declared state: {rule}")
    if rule.guard.clock not in clocks:
        raise ValueError(f"guard clock not declared: {rule.guard}")
    if rule.guard.parametric and rule.guard.rhs not in params:
        raise ValueError(f"guard parameter not declared: {rule.guard}")
    if not rule.resets <= frozenset(clocks):
        raise ValueError(f"reset set mentions undeclared clock: {rule}")


@dataclass(frozen=True)
class PTA:
    """Parametric timed automaton (Q, clocks, params, rules, initial, finals)."""

    states: frozenset
    clocks: frozenset
    params: frozenset
    rules: tuple
    initial: str
    finals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "clocks", frozenset(self.clocks))
        object.__setattr__(self, "params", frozenset(self.params))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "finals", frozenset(self.finals))
        if not self.states or not self.clocks:
            raise ValueError("PTA needs a non-empty state set and clock set")
        if self.initial not in self.states:
            raise ValueError("initial state not declared")
        if not self.finals <= self.states:
            raise ValueError("final states must be declared states")
        for rule in self.rules:
            _check_rule(rule, self.states, self.clocks, self.params)

    def parametric_clocks(self) -> frozenset:
        """Clocks compared against a parameter in at least one rule."""
        return frozenset(
            r.guard.clock for r in self.rules if r.guard.parametric
        )

    def classification(self) -> tuple:
        """(m, n): number of parametric clocks and number of parameters."""
        return (len(self.parametric_clocks()), len(self.params))

    def consts(self) -> frozenset:
        return frozenset(
            r.guard.rhs for r in self.rules if not r.guard.parametric
        )

    def size(self) -> int:
        return (
            len(self.states)
            + len(self.clocks)
            + len(self.params)
            + len(self.rules)
            + sum(r.guard.size() for r in self.rules)
        )


@dataclass(frozen=True)
class ZeroOnePTA:
    """0/1 timed automaton: each rule fixes whether one time unit elapses."""

    states: frozenset
    clocks: frozenset
    params: frozenset
    rules0: tuple
    rules1: tuple
    initial: str
    finals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "clocks", frozenset(self.clocks))
        object.__setattr__(self, "params", frozenset(self.params))
        object.__setattr__(self, "rules0", tuple(self.rules0))
        object.__setattr__(self, "rules1", tuple(self.rules1))
        object.__setattr__(self, "finals", frozenset(self.finals))
        if not self.states or not self.clocks:
            raise ValueError("0/1-PTA needs non-empty state and clock sets")
        if self.initial not in self.states:
            raise ValueError("initial state not declared")
        if not self.finals <= self.states:
            raise ValueError("final states must be declared states")
        for rule in self.rules0 + self.rules1:
            _check_rule(rule, self.states, self.clocks, self.params)

    def rules(self, i: int) -> tuple:
        if i == 0:
            return self.rules0
        if i == 1:
            return self.rules1
        raise ValueError("rule set index must be 0 or 1")

    def consts(self) -> frozenset:
        return frozenset(
            r.guard.rhs
            for r in self.rules0 + self.rules1
            if not r.guard.parametric
        )

    def size(self) -> int:
        fixed = len(self.states) + len(self.clocks) + len(self.params)
        return (
            2 * fixed
            + len(self.rules0)
            + len(self.rules1)
            + sum(r.guard.size() for r in self.rules0 + self.rules1)
        )


# ---------------------------------------------------------------------------
# Counter operations and POCAs
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class AddConst:
    """Counter update by a constant in {-1, 0, +1}."""

    value: int

    def __post_init__(self):
        if self.value not in (-1, 0, 1):
            raise ValueError("constant update must lie in {-1, 0, +1}")

    def size(self) -> int:
        return 1

    def __str__(self):
        return f"{self.value:+d}" if self.value else "+0"


@dataclass(frozen=True, order=True)
class AddParam:
    """Counter update by +p or -p."""

    sign: int
    param: str

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("parameter update sign must be +1 or -1")

    def size(self) -> int:
        return 1

    def __str__(self):
        return ("+" if self.sign > 0 else "-") + self.param


@dataclass(frozen=True, order=True)
class ModTest:
    """Divisibility test: counter = 0 mod value."""

    value: int

    def __post_init__(self):
        if self.value < 1:
            raise ValueError("modulo constant must be >= 1")

    def size(self) -> int:
        return bitlen(self.value)

    def __str__(self):
        return f"mod {self.value}"


@dataclass(frozen=True, order=True)
class CmpConst:
    """Comparison test against a non-negative constant."""

    cmp: str
    value: int

    def __post_init__(self):
        object.__setattr__(self, "cmp", normalize_cmp(self.cmp))
        if self.value < 0:
            raise ValueError("comparison constant must be >= 0")

    def size(self) -> int:
        return bitlen(self.value)

    def __str__(self):
        return f"{self.cmp} {self.value}"


@dataclass(frozen=True, order=True)
class CmpParam:
    """Comparison test against a parameter."""

    cmp: str
    param: str

    def __post_init__(self):
        object.__setattr__(self, "cmp", normalize_cmp(self.cmp))

    def size(self) -> int:
        return 1

    def __str__(self):
        return f"{self.cmp} {self.param}"


CounterOp = Union[AddConst, AddParam, ModTest, CmpConst, CmpParam]

#: Operations that change the counter; the rest are tests.
UPDATE_OPS = (AddConst, AddParam)


@dataclass(frozen=True, order=True)
class PocaRule:
    src: str
    op: CounterOp
    dst: str


@dataclass(frozen=True)
class POCA:
    """Parametric one-counter automaton (Q, params, rules, initial, finals)."""

    states: frozenset
    params: frozenset
    rules: tuple
    initial: str
    finals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "params", frozenset(self.params))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "finals", frozenset(self.finals))
        if not self.states:
            raise ValueError("POCA needs a non-empty state set")
        if self.initial not in self.states:
            raise ValueError("initial state not declared")
        if not self.finals <= self.states:
            raise ValueError("final states must be declared states")
        for rule in self.rules:
            if rule.src not in self.states or rule.dst not in self.states:
                raise ValueError(f"rule endpoint not a declared state: {rule}")
            if isinstance(rule.op, AddParam) and rule.op.param not in self.params:
                raise ValueError(f"rule parameter not declared: {rule}")
            if isinstance(rule.op, CmpParam) and rule.op.param not in self.params:
                raise ValueError(f"rule parameter not declared: {rule}")

    def consts(self) -> frozenset:
        """Constants appearing in modulo and constant-comparison operations."""
        out = set()
        for rule in self.rules:
            if isinstance(rule.op, ModTest):
                out.add(rule.op.value)
            elif isinstance(rule.op, CmpConst):
                out.add(rule.op.value)
        return frozenset(out)

    def size(self) -> int:
        return (
            len(self.states)
            + len(self.params)
            + len(self.rules)
            + sum(r.op.size() for r in self.rules)
        )


# ---------------------------------------------------------------------------
# Derived constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DerivedConstants:
    """The quadruple (Z, Gamma, Upsilon, M) attached to a POCA.

    ``formula_exact`` distinguishes values obtained from the defining formulas
    from test-scale overrides; property tests may legally shrink the latter.
    """

    z: int
    gamma: int
    upsilon: int
    m: int
    formula_exact: bool = True

    def __post_init__(self):
        if min(self.z, self.gamma, self.upsilon, self.m) < 1:
            raise ValueError("derived constants must be positive")
        if self.gamma % self.z != 0:
            raise ValueError("Gamma must be a multiple of Z")

    @classmethod
    def from_poca(cls, poca: POCA) -> "DerivedConstants":
        """Evaluate the defining formulas exactly for a POCA."""
        consts = [c for c in poca.consts() if c >= 1]
        z = lcm_set(consts)
        k = 17 * len(poca.states)
        big_lcm = lcm_range(k)
        gamma = big_lcm * z
        upsilon = k * big_lcm * (k * z + 2)
        m = 30 * (upsilon + gamma + 1)
        return cls(z=z, gamma=gamma, upsilon=upsilon, m=m, formula_exact=True)

    @classmethod
    def scaled(cls, k: int, z: int, upsilon: int) -> "DerivedConstants":
        """Test-scale constants: K replaces 17*|Q|, Gamma = LCM(K) * Z."""
        if k < 1 or z < 1 or upsilon < 1:
            raise ValueError("scaled constants must be positive")
        gamma = lcm_range(k) * z
        m = 30 * (upsilon + gamma + 1)
        return cls(z=z, gamma=gamma, upsilon=upsilon, m=m, formula_exact=False)


def derive_constants(poca: POCA) -> DerivedConstants:
    return DerivedConstants.from_poca(poca)
