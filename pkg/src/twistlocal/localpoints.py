"""Verdict engine: local solvability of a polyquadratic twist, prime by prime.

A twist is described by pairwise-coprime squarefree level factors m_i (their
product is the level) and squarefree twist values d_i defining the fields
Q(sqrt(d_i)). For a prime p the engine reports Yes / No / Unknown together
with a trace of the criteria it tried. No is only ever produced by the two
exact (if-and-only-if) criteria: the ramified-prime CM-lift test and the
inert-bad-prime congruence test. Every other criterion is sufficient only,
so its failure downgrades to Unknown, never to No.

everywhere_local aggregates over the finite set of primes that can possibly
fail: divisors of the level, primes ramified in the compositum, and good
primes below 4*genus^2. All remaining primes are solvable by the point-count
bound and are recorded as a single trailing trace entry.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from math import gcd, isqrt, prod

from .classpoly import has_root_mod_p
from .errors import DispatchError, DomainError, SpecError
from .ntkernel import (
    SplitType,
    factor,
    genus_x0,
    is_prime,
    is_squarefree,
    kronecker_symbol,
    primes_below,
    splitting,
)

# criterion ids used in verdict traces (stable external vocabulary)
SPLIT_ALL = "split-in-all-fields"
INERT_ALL = "inert-in-all-fields"
WEIL_BOUND = "weil-bound"
SUPERSINGULAR_SYMBOL = "supersingular-symbol"
ORDINARY_CM_LIFT = "ordinary-cm-lift"
RAMIFIED_CM_LIFT = "ramified-cm-lift"
TWO_ADIC_CM_LIFT = "two-adic-cm-lift"
BAD_SPLIT_ALL = "bad-split-in-all-fields"
BAD_RAMIFIED = "bad-ramified-in-some-field"
BAD_INERT_ODD = "bad-inert-odd"
BAD_INERT_TWO = "bad-inert-two"
BAD_SPLIT_STRUCTURE = "bad-split-structure"
WEIL_TAIL = "weil-bound-tail"


class Status(enum.Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class TwistSpec:
    """Level factors m and twist values d, index-aligned.

    Validated on construction: the m_i are squarefree, pairwise coprime and
    at least 2; the d_i are squarefree, outside {0, 1}, pairwise coprime, and
    no nonempty sub-product of them is a perfect square (so the compositum of
    the quadratic fields has full degree 2^k).
    """

    m: tuple[int, ...]
    d: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))
        m, d = self.m, self.d
        if not m or len(m) != len(d):
            raise SpecError("m and d must be nonempty and of equal length")
        for x in m:
            if x < 2:
                raise SpecError(f"level factor {x} must be at least 2")
            if not is_squarefree(x):
                raise SpecError(f"level factor {x} is not squarefree")
        for i, j in combinations(range(len(m)), 2):
            if gcd(m[i], m[j]) != 1:
                raise SpecError(f"level factors {m[i]} and {m[j]} share a prime")
        for x in d:
            if x in (0, 1):
                raise SpecError(f"twist value {x} does not define a quadratic field")
            if not is_squarefree(x):
                raise SpecError(f"twist value {x} is not squarefree")
        for i, j in combinations(range(len(d)), 2):
            if gcd(d[i], d[j]) != 1:
                raise SpecError(f"twist values {d[i]} and {d[j]} share a prime")
        for r in range(1, len(d) + 1):
            for sub in combinations(d, r):
                v = prod(sub)
                if v > 0 and isqrt(v) ** 2 == v:
                    raise SpecError(
                        f"twist values {sub} multiply to a perfect square; the field tower collapses"
                    )

    @property
    def level(self) -> int:
        return prod(self.m)

    def to_json(self) -> dict:
        return {"m": list(self.m), "d": list(self.d)}


@dataclass(frozen=True)
class InertProfile:
    """How a prime sits in the k quadratic fields of a spec.

    inert / ramified / split partition the index set {0..k-1}; inert_level is
    the product of the level factors at the inert indices (1 when none are).
    """

    p: int
    inert: frozenset[int]
    ramified: frozenset[int]
    split: frozenset[int]
    inert_level: int


def inert_profile(spec: TwistSpec, p: int) -> InertProfile:
    inert, ramified, split = set(), set(), set()
    for i, dv in enumerate(spec.d):
        t = splitting(p, dv)
        (inert if t is SplitType.INERT else ramified if t is SplitType.RAMIFIED else split).add(i)
    level = prod(spec.m[i] for i in inert) if inert else 1
    return InertProfile(p, frozenset(inert), frozenset(ramified), frozenset(split), level)


@dataclass(frozen=True)
class PrimeVerdict:
    p: int
    status: Status
    trace: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not self.trace:
            raise DomainError("a verdict must carry at least one trace entry")

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "status": self.status.value,
            "trace": [{"criterion": c, "outcome": o} for c, o in self.trace],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PrimeVerdict":
        return cls(
            int(obj["p"]),
            Status(obj["status"]),
            tuple((e["criterion"], e["outcome"]) for e in obj["trace"]),
        )


def verdict_good_unramified(spec: TwistSpec, p: int) -> PrimeVerdict:
    """Criteria chain for p coprime to the level and unramified everywhere.

    Tried in order: complete splitting; complete inertness; the point-count
    bound p > 4g^2; the supersingular symbol condition at the level primes
    whose index splits; the ordinary CM lift (quadratic symbol plus a class
    polynomial root, with the literal inert-level-7 clause at p = 2). All are
    sufficient only, so the fall-through is Unknown.
    """
    prof = inert_profile(spec, p)
    if spec.level % p == 0:
        raise DispatchError(f"{p} divides the level {spec.level}; use verdict_bad")
    if prof.ramified:
        raise DispatchError(f"{p} ramifies in the tower; use verdict_good_ramified")
    trace: list[tuple[str, str]] = []
    inert, lvl = prof.inert, prof.inert_level
    if not inert:
        trace.append((SPLIT_ALL, f"holds: {p} splits in every field, so the twist is locally trivial"))
        return PrimeVerdict(p, Status.YES, tuple(trace))
    trace.append((SPLIT_ALL, f"fails: {p} is inert at indices {sorted(inert)}"))
    if inert == frozenset(range(len(spec.m))):
        trace.append((INERT_ALL, f"holds: {p} is inert in every field"))
        return PrimeVerdict(p, Status.YES, tuple(trace))
    trace.append((INERT_ALL, "fails: splitting behaviour is mixed"))
    g = genus_x0(spec.level)
    if p > 4 * g * g:
        trace.append((WEIL_BOUND, f"holds: {p} > 4*{g}^2 = {4 * g * g}"))
        return PrimeVerdict(p, Status.YES, tuple(trace))
    trace.append((WEIL_BOUND, f"fails: {p} <= 4*{g}^2 = {4 * g * g}"))
    outside = factor(spec.level // lvl).primes
    obstructions = sorted(q for q in outside if kronecker_symbol(-p * lvl, q) != 1)
    if not obstructions:
        trace.append(
            (SUPERSINGULAR_SYMBOL, f"holds: symbol of {-p * lvl} is +1 at every prime of {spec.level // lvl}")
        )
        return PrimeVerdict(p, Status.YES, tuple(trace))
    trace.append((SUPERSINGULAR_SYMBOL, f"fails: symbol of {-p * lvl} is not +1 at {obstructions}"))
    if p == 2:
        if lvl == 7:
            trace.append((ORDINARY_CM_LIFT, "holds: inert level part is 7, the two-adic ordinary case"))
            return PrimeVerdict(p, Status.YES, tuple(trace))
        trace.append((ORDINARY_CM_LIFT, f"fails: inert level part {lvl} is not 7 at p = 2"))
    elif kronecker_symbol(-lvl, p) == 1 and has_root_mod_p(-4 * lvl, p):
        trace.append((ORDINARY_CM_LIFT, f"holds: ({-lvl}|{p}) = 1 and H({-4 * lvl}) has a root mod {p}"))
        return PrimeVerdict(p, Status.YES, tuple(trace))
    else:
        trace.append(
            (ORDINARY_CM_LIFT, f"fails: needs ({-lvl}|{p}) = 1 and a root of H({-4 * lvl}) mod {p}")
        )
    return PrimeVerdict(p, Status.UNKNOWN, tuple(trace))


def verdict_good_ramified(spec: TwistSpec, p: int) -> PrimeVerdict:
    """Exact criterion for odd p coprime to the level, ramified in one field.

    With the other fields all split, solvability is equivalent to the class
    polynomial of the twisted level factor having a root mod p, so this is
    the one good-prime route that can return No. At p = 2 the lift always
    exists by an external lemma (trace says so); with an inert companion
    field or multiple ramification the hypotheses fail and the verdict is
    Unknown.
    """
    prof = inert_profile(spec, p)
    if spec.level % p == 0:
        raise DispatchError(f"{p} divides the level {spec.level}; use verdict_bad")
    if not prof.ramified:
        raise DispatchError(f"{p} is unramified in every field; use verdict_good_unramified")
    if len(prof.ramified) > 1:
        # pairwise-coprime twist values allow this only at p = 2
        return PrimeVerdict(
            p,
            Status.UNKNOWN,
            ((RAMIFIED_CM_LIFT, f"outside hypotheses: {p} ramifies at indices {sorted(prof.ramified)}"),),
        )
    (i0,) = prof.ramified
    if prof.inert:
        return PrimeVerdict(
            p,
            Status.UNKNOWN,
            (
                (
                    RAMIFIED_CM_LIFT,
                    f"outside hypotheses: {p} ramifies at index {i0} but is inert at {sorted(prof.inert)}",
                ),
            ),
        )
    mi = spec.m[i0]
    if p == 2:
        return PrimeVerdict(
            p,
            Status.YES,
            (
                (
                    TWO_ADIC_CM_LIFT,
                    f"holds: 2 ramifies at index {i0} and splits elsewhere; "
                    "the two-adic lift is granted by the cited external lifting lemma",
                ),
            ),
        )
    disc = -4 * mi
    if has_root_mod_p(disc, p):
        return PrimeVerdict(
            p,
            Status.YES,
            ((RAMIFIED_CM_LIFT, f"holds: H({disc}) has a root mod {p} (twisted level factor {mi})"),),
        )
    return PrimeVerdict(
        p,
        Status.NO,
        (
            (
                RAMIFIED_CM_LIFT,
                f"fails (criterion exact): H({disc}) has no root mod {p} (twisted level factor {mi})",
            ),
        ),
    )


def verdict_bad(spec: TwistSpec, p: int) -> PrimeVerdict:
    """Criteria for primes dividing the level.

    Complete splitting is an unconditional Yes; any ramification is outside
    scope (Unknown). When p is inert in its own field's direction the odd
    case is an exact congruence criterion (can return No); the two-adic case
    and the split-direction structural cases are sufficient only.
    """
    if spec.level % p != 0:
        raise DispatchError(f"{p} does not divide the level {spec.level}")
    prof = inert_profile(spec, p)
    i0 = next(i for i, mi in enumerate(spec.m) if mi % p == 0)
    if not prof.inert and not prof.ramified:
        return PrimeVerdict(
            p, Status.YES, ((BAD_SPLIT_ALL, f"holds: {p} splits in every field"),)
        )
    if prof.ramified:
        return PrimeVerdict(
            p,
            Status.UNKNOWN,
            (
                (
                    BAD_RAMIFIED,
                    f"outside scope: {p} divides the level and ramifies at indices {sorted(prof.ramified)}",
                ),
            ),
        )
    inert = prof.inert
    odd_rest = tuple(q for q in factor(spec.level).primes if q != p and q % 2 == 1)
    if i0 in inert:
        if p % 2 == 1:
            failures = []
            if inert != frozenset({i0}):
                failures.append(f"inert indices {sorted(inert)} exceed {{{i0}}}")
            if spec.m[i0] != p:
                failures.append(f"level factor {spec.m[i0]} at index {i0} is not the bare prime {p}")
            if p % 4 != 3:
                failures.append(f"{p} is {p % 4} mod 4, needs 3")
            off = [q for q in odd_rest if q % 4 != 1]
            if off:
                failures.append(f"cofactor primes {off} are not 1 mod 4")
            if not failures:
                return PrimeVerdict(
                    p,
                    Status.YES,
                    (
                        (
                            BAD_INERT_ODD,
                            f"holds: {p} = 3 mod 4 inert only in its own direction, "
                            f"level factor is {p} itself, cofactor primes all 1 mod 4",
                        ),
                    ),
                )
            return PrimeVerdict(
                p,
                Status.NO,
                ((BAD_INERT_ODD, "fails (criterion exact): " + "; ".join(failures)),),
            )
        all_idx = frozenset(range(len(spec.m)))
        if all(q % 4 == 1 for q in odd_rest) and inert in (all_idx, frozenset({i0})):
            shape = "every index" if inert == all_idx else "only its own index"
            return PrimeVerdict(
                p,
                Status.YES,
                (
                    (
                        BAD_INERT_TWO,
                        f"holds: level is twice primes 1 mod 4 and 2 is inert at {shape}",
                    ),
                ),
            )
        return PrimeVerdict(
            p,
            Status.UNKNOWN,
            (
                (
                    BAD_INERT_TWO,
                    "fails: needs all odd level primes 1 mod 4 and inertness at every index or only the two-adic index",
                ),
            ),
        )
    # i0 splits at p; the twisted direction is inert elsewhere or nowhere
    structure_ok = (
        prof.inert_level == prod(odd_rest)
        and odd_rest != ()
        and all(q % 4 == 1 for q in odd_rest)
    )
    if p % 2 == 1:
        if structure_ok and p % 4 == 3:
            return PrimeVerdict(
                p,
                Status.YES,
                (
                    (
                        BAD_SPLIT_STRUCTURE,
                        f"holds: {p} = 3 mod 4 splits in its own direction; the inert level part "
                        f"{prof.inert_level} carries every other odd prime, all 1 mod 4",
                    ),
                ),
            )
        return PrimeVerdict(
            p,
            Status.UNKNOWN,
            (
                (
                    BAD_SPLIT_STRUCTURE,
                    f"fails: needs {p} = 3 mod 4 and the inert level part to be exactly the "
                    "product of the other odd level primes, all 1 mod 4",
                ),
            ),
        )
    if structure_ok and spec.level == 2 * prof.inert_level:
        return PrimeVerdict(
            p,
            Status.YES,
            (
                (
                    BAD_SPLIT_STRUCTURE,
                    f"holds: level = 2 * {prof.inert_level} with the odd part inert and all its primes 1 mod 4",
                ),
            ),
        )
    return PrimeVerdict(
        p,
        Status.UNKNOWN,
        (
            (
                BAD_SPLIT_STRUCTURE,
                "fails: needs level = 2 * (inert odd part) with every odd prime 1 mod 4",
            ),
        ),
    )


def verdict_at_prime(spec: TwistSpec, p: int) -> PrimeVerdict:
    """Route (spec, p) to exactly one of the three verdict operations."""
    if not is_prime(p):
        raise DomainError(f"verdict_at_prime: {p} is not prime")
    if spec.level % p == 0:
        return verdict_bad(spec, p)
    if inert_profile(spec, p).ramified:
        return verdict_good_ramified(spec, p)
    return verdict_good_unramified(spec, p)


@dataclass(frozen=True)
class EverywhereLocal:
    """Aggregate of the finite prime list plus the tail argument."""

    spec: TwistSpec
    status: Status
    verdicts: tuple[PrimeVerdict, ...]
    tail: tuple[str, str]

    @property
    def checked_primes(self) -> tuple[int, ...]:
        return tuple(v.p for v in self.verdicts)

    @property
    def unknown_primes(self) -> tuple[int, ...]:
        return tuple(v.p for v in self.verdicts if v.status is Status.UNKNOWN)

    @property
    def failing_primes(self) -> tuple[int, ...]:
        return tuple(v.p for v in self.verdicts if v.status is Status.NO)

    def to_json(self, include_verdicts: bool = False) -> dict:
        out = {
            "status": self.status.value,
            "unknown_primes": list(self.unknown_primes),
            "checked_primes": list(self.checked_primes),
            "trace": [{"criterion": self.tail[0], "outcome": self.tail[1]}],
        }
        if include_verdicts:
            out["verdicts"] = [v.to_json() for v in self.verdicts]
        return out


def everywhere_local(spec: TwistSpec) -> EverywhereLocal:
    """Decide solvability at every prime at once.

    The only primes that can fail are divisors of the level, primes ramified
    in some Q(sqrt(d_i)) (divisors of d_i, plus 2 when some d_i is not 1 mod
    4), and unramified good primes below 4*genus^2; everything else clears
    the point-count bound. Aggregate: No if any No, Yes if all Yes, else
    Unknown.
    """
    g = genus_x0(spec.level)
    test = set(primes_below(4 * g * g))
    test.update(factor(spec.level).primes)
    for dv in spec.d:
        test.update(factor(dv).primes)
        if dv % 4 != 1:
            test.add(2)
    verdicts = tuple(verdict_at_prime(spec, p) for p in sorted(test))
    tail = (
        WEIL_TAIL,
        f"all remaining primes are unramified, coprime to the level, and exceed 4*genus^2 = {4 * g * g}; "
        "each is Yes by the point-count bound",
    )
    statuses = {v.status for v in verdicts}
    if Status.NO in statuses:
        agg = Status.NO
    elif statuses <= {Status.YES}:
        agg = Status.YES
    else:
        agg = Status.UNKNOWN
    return EverywhereLocal(spec, agg, verdicts, tail)
