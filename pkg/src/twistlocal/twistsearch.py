"""Twist enumeration and the admissible-prime density experiment.

search_twists enumerates twist-value tuples for a fixed level tuple whose
per-prime verdicts come out Yes everywhere, by filtering congruence
conditions first and re-verifying every candidate with the full verdict
engine. The re-verification is load-bearing: any tuple that passes the
filters but does not verify is suppressed and counted, and the test suite
treats a nonzero suppression count as a bug.

The density side estimates the natural density of "admissible" primes (class
polynomial root for the second level factor plus a quadratic-residue
condition for the first twist value) and counts the squarefree twist values
up to X built entirely from admissible primes, reporting the trajectory of
the normalised constant count * (log X)^(1-alpha) / X at three checkpoints.
"""

from __future__ import annotations

import hashlib
import json
import math
from array import array
from dataclasses import dataclass
from itertools import combinations, product
from math import gcd, isqrt, prod
from typing import Iterator

from .classpoly import has_root_mod_p, has_simple_root_mod_p
from .errors import DomainError, PreflightError, SpecError
from .localpoints import Status, TwistSpec, everywhere_local
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

MIN_SAMPLE_BOUND = 10**5


@dataclass(frozen=True)
class SearchConfig:
    """Level tuple, twist-value magnitude bound, optional emission limit."""

    m: tuple[int, ...]
    bound: int
    limit: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        if not self.m:
            raise SpecError("level tuple must be nonempty")
        for x in self.m:
            if x < 2 or not is_squarefree(x):
                raise SpecError(f"level factor {x} must be a squarefree integer >= 2")
        for i, j in combinations(range(len(self.m)), 2):
            if gcd(self.m[i], self.m[j]) != 1:
                raise SpecError(f"level factors {self.m[i]} and {self.m[j]} share a prime")
        if self.bound < 2:
            raise DomainError("bound must be at least 2")
        if self.limit is not None and self.limit < 1:
            raise DomainError("limit must be at least 1")


@dataclass
class SearchDiagnostics:
    candidates: int = 0
    emitted: int = 0
    suppressed_unknown: int = 0
    suppressed_no: int = 0

    @property
    def suppressed(self) -> int:
        return self.suppressed_unknown + self.suppressed_no


@dataclass(frozen=True)
class SearchHit:
    d: tuple[int, ...]
    verdict: str
    trace_digest: str

    def to_json(self) -> dict:
        return {"d": list(self.d), "verdict": self.verdict, "trace_digest": self.trace_digest}


def _digest(report) -> str:
    payload = json.dumps(report.to_json(include_verdicts=True), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def _candidate_values(level_primes: tuple[int, ...], bound: int) -> list[int]:
    """Twist values |d| <= bound, squarefree, outside {0,1}, with every prime
    of the level split in Q(sqrt(d)). Ordered by (|d|, d)."""
    out = []
    for dv in range(-bound, bound + 1):
        if dv in (0, 1) or not is_squarefree(dv):
            continue
        if all(splitting(q, dv) is SplitType.SPLIT for q in level_primes):
            out.append(dv)
    out.sort(key=lambda dv: (abs(dv), dv))
    return out


def _passes_tuple_filters(
    m: tuple[int, ...], combo: tuple[int, ...], small: list[int], level: int
) -> bool:
    k = len(combo)
    # no prime may ramify in two fields: coprime values, at most one not 1 mod 4
    for i in range(k):
        for j in range(i + 1, k):
            if gcd(combo[i], combo[j]) != 1:
                return False
    if sum(1 for dv in combo if dv % 4 != 1) > 1:
        return False
    # small good primes must be unramified with uniform splitting across the tuple
    for p in small:
        kinds = {splitting(p, dv) for dv in combo}
        if SplitType.RAMIFIED in kinds or len(kinds) > 1:
            return False
    # each ramified prime must split in the other fields, and for odd ones the
    # class polynomial of the twisted level factor must have a root
    for i, dv in enumerate(combo):
        ram = set(factor(dv).primes)
        if dv % 4 != 1:
            ram.add(2)
        for p in sorted(ram):
            if level % p == 0:
                return False
            for j, other in enumerate(combo):
                if j != i and splitting(p, other) is not SplitType.SPLIT:
                    return False
            if p != 2 and not has_root_mod_p(-4 * m[i], p):
                return False
    return True


def search_twists(
    config: SearchConfig, diagnostics: SearchDiagnostics | None = None
) -> Iterator[SearchHit]:
    """Stream twist tuples that re-verify to Yes everywhere.

    Candidates run through the congruence filters, then through the verdict
    engine; suppressed candidates (Unknown or No on re-verification) are
    tallied in `diagnostics`. An empty stream is a normal outcome.
    """
    diag = diagnostics if diagnostics is not None else SearchDiagnostics()
    level = prod(config.m)
    level_primes = factor(level).primes
    g = genus_x0(level)
    small = [p for p in primes_below(4 * g * g) if level % p]
    values = _candidate_values(level_primes, config.bound)
    emitted = 0
    for combo in product(values, repeat=len(config.m)):
        diag.candidates += 1
        if not _passes_tuple_filters(config.m, combo, small, level):
            continue
        try:
            spec = TwistSpec(config.m, combo)
        except SpecError:
            continue  # e.g. a sub-product of the values is a perfect square
        agg = everywhere_local(spec)
        if agg.status is Status.YES:
            diag.emitted += 1
            emitted += 1
            yield SearchHit(combo, agg.status.value, _digest(agg))
            if config.limit is not None and emitted >= config.limit:
                return
        elif agg.status is Status.NO:
            diag.suppressed_no += 1
        else:
            diag.suppressed_unknown += 1


# ---------------------------------------------------------------------------
# density experiment


def is_admissible_prime(m2: int, d1: int, p: int) -> bool:
    """Admissible: d1 is a nonzero square mod p and the class polynomial of
    the order of discriminant -4*m2 has a simple root mod p.

    The root must be simple so that it lifts p-adically and embeds the real
    field it generates into Q_p. That field contains sqrt(m2) (genus theory
    for the order), so membership forces m2 to be a square mod p and, by
    reciprocity, p to be a square mod m2; that is what keeps the level prime
    m2 split in every twist field assembled from admissible primes. At the
    finitely many primes dividing the polynomial discriminant a multiple root
    can exist while p is inert over sqrt(m2); counting those would admit
    twists with no local points at m2.
    """
    return kronecker_symbol(d1, p) == 1 and has_simple_root_mod_p(-4 * m2, p)


@dataclass(frozen=True)
class AlphaSample:
    alpha_hat: float
    sample_bound: int
    admissible: int
    primes: int

    def to_json(self) -> dict:
        return {
            "alpha_hat": self.alpha_hat,
            "sample_bound": self.sample_bound,
            "admissible": self.admissible,
            "primes": self.primes,
        }


def chebotarev_sample(m2: int, d1: int, sample_bound: int) -> AlphaSample:
    """Empirical density of admissible primes up to sample_bound."""
    if sample_bound < MIN_SAMPLE_BOUND:
        raise DomainError(f"sample bound must be at least {MIN_SAMPLE_BOUND}")
    if m2 < 2 or not is_squarefree(m2):
        raise DomainError(f"second level factor {m2} must be squarefree and >= 2")
    if d1 in (0, 1) or not is_squarefree(d1):
        raise DomainError(f"twist value {d1} does not define a quadratic field")
    ps = primes_below(sample_bound + 1)
    hits = sum(1 for p in ps if is_admissible_prime(m2, d1, p))
    return AlphaSample(hits / len(ps), sample_bound, hits, len(ps))


@dataclass(frozen=True)
class PreflightCheck:
    name: str
    ok: bool
    detail: str


def density_preflight(m1: int, m2: int, d1: int) -> list[PreflightCheck]:
    """Verify the experiment's standing hypotheses, reporting each one."""
    checks: list[PreflightCheck] = []

    def add(name: str, ok: bool, detail: str) -> bool:
        checks.append(PreflightCheck(name, bool(ok), detail))
        return bool(ok)

    factors_ok = add(
        "level factors are distinct primes congruent to 1 mod 4",
        is_prime(m1) and is_prime(m2) and m1 != m2 and m1 % 4 == 1 and m2 % 4 == 1,
        f"m1={m1}, m2={m2}",
    )
    add("level factors agree mod 8", m1 % 8 == m2 % 8, f"{m1} = {m1 % 8}, {m2} = {m2 % 8} (mod 8)")
    d1_prime = add("first twist value is a positive prime", d1 > 1 and is_prime(d1), f"d1={d1}")
    add(
        "first twist value is a square modulo both level factors",
        kronecker_symbol(d1, m1) == 1 and kronecker_symbol(d1, m2) == 1,
        f"(d1|m1)={kronecker_symbol(d1, m1)}, (d1|m2)={kronecker_symbol(d1, m2)}",
    )
    add(
        "minus twice the first level factor is a square modulo the second",
        kronecker_symbol(-2 * m1, m2) == 1,
        f"({-2 * m1}|{m2})={kronecker_symbol(-2 * m1, m2)}",
    )
    if d1_prime:
        ok = has_root_mod_p(-4 * m1, d1)
        add(
            "class polynomial of the first level factor has a root modulo the first twist value",
            ok,
            f"H({-4 * m1}) {'has a root' if ok else 'has no root'} mod {d1}",
        )
    else:
        add(
            "class polynomial of the first level factor has a root modulo the first twist value",
            False,
            "skipped: d1 is not a positive prime",
        )
    if factors_ok:
        g = genus_x0(m1 * m2)
        small = primes_below(4 * g * g)
        failing = [p for p in small if splitting(p, d1) is not SplitType.SPLIT]
        two_note = (
            f"2 splits (d1 = {d1 % 8} mod 8)" if 2 not in failing else f"2 fails (d1 = {d1 % 8} mod 8)"
        )
        add(
            "every prime below 4*genus^2 splits in the first twist field",
            not failing,
            f"threshold {4 * g * g}; {two_note}; failing: {failing or 'none'}",
        )
    else:
        add(
            "every prime below 4*genus^2 splits in the first twist field",
            False,
            "skipped: level factors invalid",
        )
    return checks


@dataclass(frozen=True)
class DensityReport:
    """Measured density data; the asymptotic constant itself is not computed,
    only the stability of its empirical trajectory."""

    alpha_hat: float
    sample_bound: int
    counts: tuple[tuple[int, int], ...]
    c_trajectory: tuple[tuple[int, float], ...]
    note: str
    smallest: tuple[int, ...]

    @property
    def count(self) -> int:
        return self.counts[-1][1]

    def to_csv(self) -> str:
        lines = ["X,count,c_hat"]
        by_x = dict(self.c_trajectory)
        for x, cnt in self.counts:
            lines.append(f"{x},{cnt},{by_x[x]:.6f}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "alpha_hat": self.alpha_hat,
            "sample_bound": self.sample_bound,
            "counts": [list(t) for t in self.counts],
            "c_trajectory": [[x, c] for x, c in self.c_trajectory],
            "note": self.note,
            "smallest": list(self.smallest),
        }


def _smallest_factor_sieve(limit: int) -> array:
    spf = array("l", range(limit + 1))
    for i in range(2, isqrt(limit) + 1):
        if spf[i] == i:
            for j in range(i * i, limit + 1, i):
                if spf[j] == j:
                    spf[j] = i
    return spf


def count_admissible_twists(
    m1: int, m2: int, d1: int, X: int, alpha_bound: int | None = None, collect: int = 10
) -> tuple[int, DensityReport]:
    """Count squarefree twist values up to X smooth over the admissible primes.

    Counted values are 1 mod 4, greater than 1, coprime to the level and to
    d1, with every prime factor admissible. Hypotheses are preflighted first;
    a failure raises PreflightError carrying the full per-hypothesis report.
    """
    report = density_preflight(m1, m2, d1)
    bad = [c for c in report if not c.ok]
    if bad:
        raise PreflightError(
            "density hypotheses failed: " + "; ".join(c.name for c in bad), report
        )
    if X < 100:
        raise DomainError("X must be at least 100 to place checkpoints")
    sample_bound = alpha_bound if alpha_bound is not None else max(X, MIN_SAMPLE_BOUND)
    sample = chebotarev_sample(m2, d1, sample_bound)
    alpha = sample.alpha_hat

    pool = set()
    for p in primes_below(X + 1):
        if is_admissible_prime(m2, d1, p):
            pool.add(p)
    excluded = set(factor(m1 * m2 * d1).primes)
    spf = _smallest_factor_sieve(X)

    checkpoints = sorted({X // 10, X // 3, X})
    counts: list[tuple[int, int]] = []
    smallest: list[int] = []
    running = 0
    ci = 0
    for n in range(5, X + 1, 4):
        while ci < len(checkpoints) and n > checkpoints[ci]:
            counts.append((checkpoints[ci], running))
            ci += 1
        v = n
        ok = True
        while v > 1:
            p = spf[v]
            v //= p
            if v % p == 0 or p not in pool or p in excluded:
                ok = False
                break
        if ok:
            running += 1
            if len(smallest) < collect:
                smallest.append(n)
    while ci < len(checkpoints):
        counts.append((checkpoints[ci], running))
        ci += 1

    trajectory = tuple(
        (x, cnt * math.log(x) ** (1 - alpha) / x if x > 1 else 0.0) for x, cnt in counts
    )
    note = (
        "counted twist values are squarefree, 1 mod 4, greater than 1, coprime to the "
        "level and to the first twist value, and smooth over the admissible primes"
    )
    result = DensityReport(alpha, sample_bound, tuple(counts), trajectory, note, tuple(smallest))
    return result.count, result
