"""Finite two-valued domains over a universe of individuals.

A value of type ``r1 -> ... -> rm -> o`` is stored as an integer bitmask over
the cells of the argument product, first argument most significant.  The
mask's integer value doubles as the element's enumeration index, so domains
are enumerated as ``range(2**cells)`` and applying a relation to an argument
is a shift and a mask.  Individuals are stored as their universe index and
truth values as 0/1 (a one-cell mask).
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator

from .errors import DomainExplosion, HodlError
from .syntax import Arrow, Bool, Iota, Type, format_type, type_args

DEFAULT_LIMIT = 1 << 20
HUGE = 1 << 64          # saturation value for sizes that are astronomically large


class Universe:
    """Ordered, duplicate-free tuple of individual constants."""

    def __init__(self, constants: Iterable[str]):
        seen: dict[str, int] = {}
        for c in constants:
            seen.setdefault(c, len(seen))
        self.constants: tuple[str, ...] = tuple(seen)
        self.index = seen

    @property
    def n(self) -> int:
        return len(self.constants)

    def __len__(self) -> int:
        return len(self.constants)

    def __eq__(self, other) -> bool:
        return isinstance(other, Universe) and other.constants == self.constants

    def __hash__(self) -> int:
        return hash(self.constants)

    def __repr__(self) -> str:
        return f"Universe({list(self.constants)})"


# ------------------------------------------------------------ sizes

@functools.lru_cache(maxsize=None)
def domain_size(t: Type, n: int) -> int:
    """|[[t]]| over n individuals, saturating at HUGE."""
    if isinstance(t, Iota):
        return n
    c = cells(t, n)
    if c >= 64:
        return HUGE
    return 1 << c


@functools.lru_cache(maxsize=None)
def cells(t: Type, n: int) -> int:
    """Number of argument tuples of a predicate type (1 for o), saturating."""
    if isinstance(t, Iota):
        raise TypeError("i has no cells")
    c = 1
    for a in type_args(t):
        c *= domain_size(a, n)
        if c >= HUGE:
            return HUGE
    return c


@functools.lru_cache(maxsize=None)
def radices(t: Type, n: int) -> tuple[int, ...]:
    return tuple(domain_size(a, n) for a in type_args(t))


@functools.lru_cache(maxsize=None)
def block_sizes(t: Type, n: int) -> tuple[int, ...]:
    """Cell stride of each argument position (first argument most significant)."""
    rs = radices(t, n)
    out = []
    acc = 1
    for r in reversed(rs):
        out.append(acc)
        acc *= r
    return tuple(reversed(out))


def cell_index(t: Type, n: int, args: Iterable[int]) -> int:
    idx = 0
    for a, r in zip(args, radices(t, n)):
        idx = idx * r + a
    return idx


def cell_args(t: Type, n: int, idx: int) -> tuple[int, ...]:
    rs = radices(t, n)
    out = [0] * len(rs)
    for i in range(len(rs) - 1, -1, -1):
        idx, out[i] = divmod(idx, rs[i])
    return tuple(out)


def check_limit(t: Type, n: int, limit: int) -> int:
    size = domain_size(t, n)
    if size > limit:
        raise DomainExplosion(format_type(t), size, limit)
    return size


def check_cells(t: Type, n: int, limit: int) -> int:
    c = cells(t, n)
    if c > limit:
        raise DomainExplosion(f"cells of {format_type(t)}", c, limit)
    return c


# ---------------------------------------------------------- raw codes

def apply_code(t: Type, n: int, f: int, x: int) -> int:
    """Select the block of ``f`` whose first argument is ``x``."""
    b = block_sizes(t, n)[0]
    return (f >> (x * b)) & ((1 << b) - 1)


def apply_codes(t: Type, n: int, f: int, xs: tuple[int, ...]) -> int:
    """Apply ``f`` to a prefix ``xs`` of its arguments."""
    bs = block_sizes(t, n)
    off = 0
    for x, b in zip(xs, bs):
        off += x * b
    width = bs[len(xs) - 1] if xs else cells(t, n)
    return (f >> off) & ((1 << width) - 1)


def leq_code(t: Type, a: int, b: int) -> bool:
    if isinstance(t, Iota):
        return a == b
    return a & ~b == 0


def top_code(t: Type, n: int) -> int:
    return (1 << cells(t, n)) - 1


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def interval(l: int, u: int) -> Iterator[int]:
    """All codes d with l <= d <= u (as sets); empty when l is not below u."""
    if l & ~u:
        return
    free = u & ~l
    bits = [1 << i for i in iter_bits(free)]
    for r in range(len(bits) + 1):
        for combo in itertools.combinations(bits, r):
            yield l | sum(combo)


def interval_size(l: int, u: int) -> int:
    if l & ~u:
        return 0
    return 1 << bin(u & ~l).count("1")


# ------------------------------------------------------------ SemVal

@dataclass(frozen=True)
class SemVal:
    """An element of a two-valued domain: individual, truth value or relation."""
    type: Type
    code: int
    universe: Universe

    def __post_init__(self):
        n = self.universe.n
        if isinstance(self.type, Iota):
            if not 0 <= self.code < n:
                raise HodlError(f"individual index {self.code} outside universe")
        elif self.code < 0 or self.code >> cells(self.type, n):
            raise HodlError(f"code {self.code} outside domain of {format_type(self.type)}")

    @property
    def is_relation(self) -> bool:
        return isinstance(self.type, Arrow)

    def tuples(self) -> list[tuple]:
        """Canonically sorted argument tuples of a relation (components as SemVals)."""
        if not isinstance(self.type, Arrow):
            raise HodlError("not a relation")
        n = self.universe.n
        args = type_args(self.type)
        out = []
        for idx in iter_bits(self.code):
            digits = cell_args(self.type, n, idx)
            out.append(tuple(SemVal(a, d, self.universe) for a, d in zip(args, digits)))
        return out

    def to_python(self):
        """Constant name, bool, or frozenset of tuples (singletons unwrapped)."""
        if isinstance(self.type, Iota):
            return self.universe.constants[self.code]
        if isinstance(self.type, Bool):
            return bool(self.code)
        out = set()
        for tup in self.tuples():
            vals = tuple(v.to_python() for v in tup)
            out.add(vals[0] if len(vals) == 1 else vals)
        return frozenset(out)

    def __str__(self) -> str:
        if isinstance(self.type, Iota):
            return self.universe.constants[self.code]
        if isinstance(self.type, Bool):
            return "true" if self.code else "false"
        parts = []
        for tup in self.tuples():
            s = [str(v) for v in tup]
            parts.append(s[0] if len(s) == 1 else "(" + ",".join(s) + ")")
        return "{" + ",".join(parts) + "}"


def const(u: Universe, name: str) -> SemVal:
    from .syntax import IOTA
    return SemVal(IOTA, u.index[name], u)


def from_python(t: Type, u: Universe, value) -> SemVal:
    """Inverse of SemVal.to_python."""
    if isinstance(t, Iota):
        return SemVal(t, u.index[value], u)
    if isinstance(t, Bool):
        return SemVal(t, int(bool(value)), u)
    args = type_args(t)
    code = 0
    for item in value:
        tup = (item,) if len(args) == 1 else tuple(item)
        digits = [from_python(a, u, x).code for a, x in zip(args, tup)]
        code |= 1 << cell_index(t, u.n, digits)
    return SemVal(t, code, u)


@functools.lru_cache(maxsize=256)
def _enumerate(t: Type, u: Universe) -> tuple[SemVal, ...]:
    return tuple(SemVal(t, c, u) for c in range(domain_size(t, u.n)))


def enumerate_domain(t: Type, u: Universe, limit: int = DEFAULT_LIMIT) -> tuple[SemVal, ...]:
    """All elements of [[t]] in code order; memoized per (t, universe)."""
    if u.n == 0:
        raise HodlError("empty universe: the domain of i is empty")
    check_limit(t, u.n, limit)
    return _enumerate(t, u)


def leq(x: SemVal, y: SemVal) -> bool:
    if x.type != y.type:
        raise HodlError(f"cannot compare {format_type(x.type)} with {format_type(y.type)}")
    return leq_code(x.type, x.code, y.code)


def bot(t: Type, u: Universe) -> SemVal:
    if isinstance(t, Iota):
        raise HodlError("i has no bottom element")
    return SemVal(t, 0, u)


def top(t: Type, u: Universe, limit: int = DEFAULT_LIMIT) -> SemVal:
    if isinstance(t, Iota):
        raise HodlError("i has no top element")
    check_cells(t, u.n, limit)
    return SemVal(t, top_code(t, u.n), u)


def apply_sem(f: SemVal, x: SemVal) -> SemVal:
    if not isinstance(f.type, Arrow) or f.type.arg != x.type:
        raise HodlError(f"cannot apply {format_type(f.type)} to {format_type(x.type)}")
    return SemVal(f.type.result, apply_code(f.type, f.universe.n, f.code, x.code), f.universe)


def dump_values(values: Iterable[SemVal]) -> str:
    return "".join(f"{v}\n" for v in values)


# ------------------------------------------------- three-valued values

class ThreeVal(IntEnum):
    """Truth order false < undef < true."""
    FALSE = 0
    UNDEF = 1
    TRUE = 2

    def __str__(self) -> str:
        return self.name.lower()


def info_leq3(a: ThreeVal, b: ThreeVal) -> bool:
    """undef is below both false and true in the information order."""
    return a == ThreeVal.UNDEF or a == b


@dataclass(frozen=True)
class PairValue:
    lo: SemVal
    hi: SemVal

    def __post_init__(self):
        if not leq(self.lo, self.hi):
            raise HodlError(f"inconsistent pair ({self.lo}, {self.hi})")


def three_valued_domain(t: Type, u: Universe) -> list:
    """All three-valued meanings of a predicate type.

    For ``o`` these are ThreeVal members; for ``r -> p`` they are tuples
    indexed by the enumeration index of the (two-valued) argument.
    """
    if isinstance(t, Bool):
        return list(ThreeVal)
    assert isinstance(t, Arrow)
    sub = three_valued_domain(t.result, u)
    return [tuple(c) for c in itertools.product(sub, repeat=domain_size(t.arg, u.n))]


def leq3(t: Type, a, b) -> bool:
    if isinstance(t, Bool):
        return a <= b
    return all(leq3(t.result, x, y) for x, y in zip(a, b))


def info_leq(t: Type, a, b) -> bool:
    if isinstance(t, Bool):
        return info_leq3(a, b)
    return all(info_leq(t.result, x, y) for x, y in zip(a, b))


def _tau_codes(t: Type, n: int, v) -> tuple[int, int]:
    if isinstance(t, Bool):
        if not isinstance(v, ThreeVal):
            raise HodlError(f"expected a truth value, got {v!r}")
        return (int(v == ThreeVal.TRUE), int(v != ThreeVal.FALSE))
    b = block_sizes(t, n)[0]
    if not isinstance(v, tuple) or len(v) != domain_size(t.arg, n):
        raise HodlError(f"value does not have the shape of {format_type(t)}")
    lo = hi = 0
    for d, sub in enumerate(v):
        l, h = _tau_codes(t.result, n, sub)
        lo |= l << (d * b)
        hi |= h << (d * b)
    return lo, hi


def tau(v, t: Type, u: Universe) -> PairValue:
    """Three-valued meaning to consistent pair of two-valued meanings."""
    lo, hi = _tau_codes(t, u.n, v)
    return PairValue(SemVal(t, lo, u), SemVal(t, hi, u))


def _tau_inv_codes(t: Type, n: int, lo: int, hi: int):
    if isinstance(t, Bool):
        if lo and not hi:
            raise HodlError("inconsistent pair (true, false)")
        return ThreeVal.TRUE if lo else (ThreeVal.UNDEF if hi else ThreeVal.FALSE)
    return tuple(_tau_inv_codes(t.result, n, apply_code(t, n, lo, d), apply_code(t, n, hi, d))
                 for d in range(domain_size(t.arg, n)))


def tau_inv(p: PairValue | tuple, t: Type | None = None, u: Universe | None = None):
    """Consistent pair to three-valued meaning; accepts a PairValue or raw codes."""
    if isinstance(p, PairValue):
        t, u = p.lo.type, p.lo.universe
        lo, hi = p.lo.code, p.hi.code
    else:
        lo, hi = p
    if lo & ~hi:
        raise HodlError("inconsistent pair: lo is not below hi")
    return _tau_inv_codes(t, u.n, lo, hi)
