"""Cuspidal class computations and the degree-one divisor class verdicts.

Three layers, all exact:

* orders of the cuspidal divisor class (0) - (infinity) on X_0(N) for prime
  and for the supported composite levels;
* verdicts on whether the degree-one divisor class set over Q_p can be empty,
  driven by congruence conditions on the level and the parity of the cusp
  order;
* a solver for involution relations in a cyclic cuspidal group, and the
  abstract intersection step of the Mordell-Weil sieve on externally
  supplied group data.

The sieve consumes reductions that the caller computed elsewhere (Jacobian
arithmetic is out of scope here); this module owns only the exact
set-intersection logic.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from math import gcd, prod

from .errors import BoundExceededError, DomainError
from .ntkernel import is_prime

CUSPIDAL_SCAN_LIMIT = 10**6
MAX_SUBGROUP = 10**7


def cusp_order_prime(N: int) -> int:
    """Order of the class of (0) - (infinity) on X_0(N) for prime N > 3:
    the numerator of (N-1)/12 in lowest terms."""
    if N <= 3 or not is_prime(N):
        raise DomainError(f"level {N} must be a prime greater than 3")
    return (N - 1) // gcd(N - 1, 12)


def cusp_order_composite(p: int, qs: tuple[int, ...]) -> int:
    """Order of the class of (0) - (infinity) on X_0(p*q_1*...*q_r).

    Only the stated case is supported: some q_i not 1 mod 4 and some q_j not
    1 mod 3, where the order is (p-1) * prod(q_i + 1) / 12. The divisibility
    is required to be exact; anything else is outside the stated case.
    """
    if p <= 3 or not is_prime(p):
        raise DomainError(f"level factor {p} must be a prime greater than 3")
    if not qs:
        raise DomainError("composite level needs at least one extra prime")
    qs = tuple(int(q) for q in qs)
    for q in qs:
        if not is_prime(q):
            raise DomainError(f"level factor {q} must be prime")
    if len(set(qs)) != len(qs) or p in qs:
        raise DomainError("level factors must be distinct primes")
    if all(q % 4 == 1 for q in qs):
        raise DomainError("outside stated case: every extra prime is 1 mod 4")
    if all(q % 3 == 1 for q in qs):
        raise DomainError("outside stated case: every extra prime is 1 mod 3")
    big_q = prod(q + 1 for q in qs)
    if (big_q * (p - 1)) % 12:
        raise DomainError("outside stated case: 12 does not divide Q*(p-1)")
    return big_q * (p - 1) // 12


class Pic1Status(enum.Enum):
    EMPTY = "Empty"
    NONEMPTY_CLASS = "NonemptyClass"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Pic1Verdict:
    status: Pic1Status
    note: str

    def to_json(self) -> dict:
        return {"status": self.status.value, "note": self.note}


def pic1_verdict_prime(N: int, inert_at_N: bool) -> Pic1Verdict:
    """Can the degree-one divisor classes over Q_N be nonempty, prime level N?

    With N inert in the twisting field the answer is a biconditional on
    N mod 24. Without inertness the only handle is the parity of the cusp
    order; an odd order promotes a rational divisor class of odd degree to
    one of degree one, contingent on local points existing everywhere, which
    is the caller's responsibility and is recorded in the note.
    """
    order = cusp_order_prime(N)
    if inert_at_N:
        if N % 24 in (1, 17):
            return Pic1Verdict(Pic1Status.EMPTY, f"N = {N % 24} mod 24 with N inert")
        return Pic1Verdict(Pic1Status.NONEMPTY_CLASS, f"N = {N % 24} mod 24 with N inert")
    if order % 2 == 1:
        return Pic1Verdict(
            Pic1Status.NONEMPTY_CLASS,
            f"cusp order {order} is odd; contingent on local points everywhere, "
            "which this verdict does not check",
        )
    return Pic1Verdict(Pic1Status.UNKNOWN, f"cusp order {order} is even and N is not inert")


def pic1_verdict_composite(p: int, qs: tuple[int, ...], inert_at_p: bool) -> Pic1Verdict:
    """Composite-level emptiness criterion over Q_p: applicable only when p is
    inert and the extra primes witness both q_i = 3 mod 4 and q_j = 2 mod 3."""
    if p <= 3 or not is_prime(p):
        raise DomainError(f"level factor {p} must be a prime greater than 3")
    if not qs:
        raise DomainError("composite level needs at least one extra prime")
    qs = tuple(int(q) for q in qs)
    has_3mod4 = any(q % 4 == 3 for q in qs)
    has_2mod3 = any(q % 3 == 2 for q in qs)
    if inert_at_p and has_3mod4 and has_2mod3:
        witnesses = (
            next(q for q in qs if q % 4 == 3),
            next(q for q in qs if q % 3 == 2),
        )
        return Pic1Verdict(
            Pic1Status.EMPTY,
            f"p inert; witnesses {witnesses[0]} = 3 mod 4 and {witnesses[1]} = 2 mod 3",
        )
    if not inert_at_p:
        return Pic1Verdict(Pic1Status.UNKNOWN, "criterion needs p inert")
    return Pic1Verdict(Pic1Status.UNKNOWN, "no congruence witness among the extra primes")


@dataclass(frozen=True)
class CuspidalModel:
    """Cyclic cuspidal group Z/n with involutions acting as multipliers.

    Labels pair each involution with its cuspidal target: the relation for
    label L with multiplier u and target t asks for P with (1 - u)*P = t in
    Z/n. The action on cuspidal classes is taken trivial; other conventions
    are testable by supplying different targets.
    """

    n: int
    involutions: tuple[tuple[str, int], ...]
    targets: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("group order must be positive")
        object.__setattr__(
            self, "involutions", tuple((str(l), int(u) % self.n) for l, u in self.involutions)
        )
        object.__setattr__(
            self, "targets", tuple((str(l), int(t) % self.n) for l, t in self.targets)
        )
        inv_labels = [l for l, _ in self.involutions]
        tgt_labels = [l for l, _ in self.targets]
        if len(set(inv_labels)) != len(inv_labels):
            raise DomainError("duplicate involution label")
        if sorted(inv_labels) != sorted(tgt_labels):
            raise DomainError("involution labels and target labels must match")
        for label, u in self.involutions:
            if (u * u) % self.n != 1 % self.n:
                raise DomainError(f"multiplier {u} for {label!r} is not an involution mod {self.n}")

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "CuspidalModel":
        """Build from (multiplier, target) pairs with generated labels."""
        pairs = tuple(pairs)
        invs = tuple((f"r{i}", u) for i, (u, _) in enumerate(pairs))
        tgts = tuple((f"r{i}", t) for i, (_, t) in enumerate(pairs))
        return cls(n, invs, tgts)

    @property
    def relations(self) -> tuple[tuple[str, int, int], ...]:
        by_label = dict(self.targets)
        return tuple((label, u, by_label[label]) for label, u in self.involutions)


def solve_cuspidal_relations(model: CuspidalModel) -> frozenset[int]:
    """All P in Z/n satisfying every relation (1 - u)*P = t, by exhaustive
    scan. Empty output is a meaningful result, not an error."""
    if model.n > CUSPIDAL_SCAN_LIMIT:
        raise BoundExceededError(f"group order {model.n} exceeds scan limit {CUSPIDAL_SCAN_LIMIT}")
    rels = [((1 - u) % model.n, t) for _, u, t in model.relations]
    out = [P for P in range(model.n) if all((c * P - t) % model.n == 0 for c, t in rels)]
    return frozenset(out)


class SieveOutcome(enum.Enum):
    OBSTRUCTED = "Obstructed"
    NOT_OBSTRUCTED = "NotObstructed"


@dataclass(frozen=True)
class LocalBlock:
    """Reductions at one prime: the group's cyclic factor orders, the set of
    curve-point images, one image per Mordell-Weil generator, and the image
    of the basepoint."""

    prime: int
    factors: tuple[int, ...]
    curve_image: frozenset[tuple[int, ...]]
    mw_images: tuple[tuple[int, ...], ...]
    basepoint: tuple[int, ...]

    def __post_init__(self):
        if not self.factors or any(f < 1 for f in self.factors):
            raise DomainError(f"prime {self.prime}: cyclic factor orders must be positive")
        width = len(self.factors)

        def reduce(vec, what):
            vec = tuple(int(x) for x in vec)
            if len(vec) != width:
                raise DomainError(
                    f"prime {self.prime}: {what} has {len(vec)} coordinates, expected {width}"
                )
            return tuple(x % f for x, f in zip(vec, self.factors))

        object.__setattr__(
            self, "curve_image", frozenset(reduce(v, "curve image element") for v in self.curve_image)
        )
        object.__setattr__(
            self, "mw_images", tuple(reduce(v, "generator image") for v in self.mw_images)
        )
        object.__setattr__(self, "basepoint", reduce(self.basepoint, "basepoint"))
        if not self.curve_image:
            raise DomainError(f"prime {self.prime}: curve image must be nonempty")

    @property
    def group_size(self) -> int:
        return prod(self.factors)


@dataclass(frozen=True)
class SieveData:
    blocks: tuple[LocalBlock, ...]

    def __post_init__(self):
        if not self.blocks:
            raise DomainError("sieve data needs at least one prime")
        primes = [b.prime for b in self.blocks]
        if len(set(primes)) != len(primes):
            raise DomainError("duplicate prime in sieve data")
        widths = {len(b.mw_images) for b in self.blocks}
        if len(widths) != 1:
            raise DomainError("every prime must list one image per Mordell-Weil generator")

    @property
    def generator_count(self) -> int:
        return len(self.blocks[0].mw_images)


def parse_sieve_data(source) -> SieveData:
    """Parse the JSON sieve format: {"primes": [...], "<p>": {"factors": [...],
    "curve_image": [[...]], "mw_images": [[...]], "basepoint": [...]}, ...}.

    Accepts a JSON string or an already-decoded dict.
    """
    obj = json.loads(source) if isinstance(source, str) else source
    if not isinstance(obj, dict) or "primes" not in obj:
        raise DomainError("sieve data must be an object with a 'primes' array")
    blocks = []
    for p in obj["primes"]:
        entry = obj.get(str(p))
        if not isinstance(entry, dict):
            raise DomainError(f"missing per-prime entry for {p}")
        try:
            blocks.append(
                LocalBlock(
                    prime=int(p),
                    factors=tuple(entry["factors"]),
                    curve_image=frozenset(tuple(v) for v in entry["curve_image"]),
                    mw_images=tuple(tuple(v) for v in entry["mw_images"]),
                    basepoint=tuple(entry["basepoint"]),
                )
            )
        except KeyError as exc:
            raise DomainError(f"prime {p}: missing field {exc.args[0]!r}") from None
    return SieveData(tuple(blocks))


def _subgroup_closure(gens: list[tuple[int, ...]], moduli: tuple[int, ...]) -> set[tuple[int, ...]]:
    zero = (0,) * len(moduli)
    seen = {zero}
    stack = [zero]
    while stack:
        x = stack.pop()
        for g in gens:
            y = tuple((a + b) % m for a, b, m in zip(x, g, moduli))
            if y not in seen:
                if len(seen) >= MAX_SUBGROUP:
                    raise BoundExceededError(
                        f"generated subgroup exceeds {MAX_SUBGROUP} elements"
                    )
                seen.add(y)
                stack.append(y)
    return seen


def mw_sieve_check(data: SieveData) -> SieveOutcome:
    """Obstructed iff the basepoint coset of the generated subgroup misses the
    product of curve images.

    Primes whose curve image is the whole local group impose no constraint
    and are pruned first; this is exact. The coset of the remaining product
    group is then enumerated outright, bounded by MAX_SUBGROUP.
    """
    blocks = [b for b in data.blocks if len(b.curve_image) < b.group_size]
    if not blocks:
        return SieveOutcome.NOT_OBSTRUCTED
    moduli = tuple(f for b in blocks for f in b.factors)
    gens = [
        tuple(x for b in blocks for x in b.mw_images[j]) for j in range(data.generator_count)
    ]
    base = tuple(x for b in blocks for x in b.basepoint)
    spans = []
    start = 0
    for b in blocks:
        spans.append((b, slice(start, start + len(b.factors))))
        start += len(b.factors)
    subgroup = _subgroup_closure(gens, moduli)
    for h in subgroup:
        x = tuple((a + c) % m for a, c, m in zip(base, h, moduli))
        if all(x[sl] in b.curve_image for b, sl in spans):
            return SieveOutcome.NOT_OBSTRUCTED
    return SieveOutcome.OBSTRUCTED
