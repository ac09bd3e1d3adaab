"""Hilbert class polynomials of imaginary quadratic orders, exactly.

reduced_forms enumerates the primitive reduced binary quadratic forms of a
negative discriminant; hilbert_class_poly evaluates the modular j-function at
each form's CM point through sparse Jacobi theta series (gmpy2 arbitrary
precision), expands prod (X - j) and rounds to integers, retrying at doubled
precision until the rounding residual is below 2^-10. Root detection mod p
and an append-only disk cache round the module out.

The class number h(D) equals the number of reduced forms, so degree checks
against them are structural; the honest cross checks live in the test suite
(brute-force form search, mpmath evaluation, frozen literature values).
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from math import gcd, isqrt
from pathlib import Path

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import BoundExceededError, DomainError, PrecisionError
from .ntkernel import is_prime, kronecker_symbol

log = logging.getLogger(__name__)

# rounding residual accepted when turning float coefficients into integers
RESIDUAL_LIMIT = 2.0**-10
MAX_PRECISION_DOUBLINGS = 6
EXHAUSTIVE_ROOT_LIMIT = 10**4
DISC_BOUND = 10**6

DEFAULT_CACHE_DIR = ".twistlocal-cache"
CACHE_ENV_VAR = "TWISTLOCAL_CACHE"
CACHE_FILE_NAME = "classpoly.txt"


def _check_disc(disc: int) -> None:
    if disc >= 0 or disc % 4 not in (0, 1):
        raise DomainError(f"not an imaginary quadratic discriminant: {disc}")


def reduced_forms(disc: int) -> list[tuple[int, int, int]]:
    """Primitive reduced forms (a, b, c) of discriminant disc < 0.

    Reduced: |b| <= a <= c, with b >= 0 whenever |b| = a or a = c;
    primitive: gcd(a, b, c) = 1. Sorted lexicographically.
    """
    _check_disc(disc)
    out: list[tuple[int, int, int]] = []
    b = disc & 1
    while 3 * b * b <= -disc:
        m = (b * b - disc) // 4  # = a*c, integral because b = disc mod 2
        a = max(b, 1)
        while a * a <= m:
            if m % a == 0:
                c = m // a
                if gcd(gcd(a, b), c) == 1:
                    out.append((a, b, c))
                    if 0 < b < a < c:
                        out.append((a, -b, c))
            a += 1
        b += 2
    return sorted(out)


def class_number(disc: int) -> int:
    return len(reduced_forms(disc))


@dataclass(frozen=True)
class HilbertClassPoly:
    """Monic integer polynomial, coefficients in descending degree order."""

    disc: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[0] != 1:
            raise DomainError("HilbertClassPoly must be monic")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: int) -> int:
        v = 0
        for c in self.coeffs:
            v = v * x + c
        return v

    def record_line(self) -> str:
        """Cache line: disc, degree, then the degree non-leading coefficients."""
        return " ".join(str(t) for t in (self.disc, self.degree, *self.coeffs[1:]))

    def pretty(self) -> str:
        parts: list[str] = []
        n = self.degree
        for i, c in enumerate(self.coeffs):
            k = n - i
            if c == 0 and not (k == 0 and n == 0):
                continue
            mag = abs(c)
            if k == 0:
                term = str(mag)
            else:
                xs = "X" if k == 1 else f"X^{k}"
                term = xs if mag == 1 else f"{mag}*{xs}"
            if not parts:
                parts.append(term if c >= 0 else f"-{term}")
            else:
                parts.append(f"+ {term}" if c >= 0 else f"- {term}")
        return " ".join(parts) if parts else "0"


def _eval_j(a: int, b: int, disc: int, prec: int) -> mpc:
    """j((-b + sqrt(disc)) / (2a)) by theta series in the nome w = exp(pi i tau).

    j = 32 (t2^8 + t3^8 + t4^8)^3 / (t2 t3 t4)^8. Each theta needs only
    O(sqrt(prec)) terms because the exponents grow quadratically.
    """
    old = gmpy2.get_context()
    gmpy2.set_context(gmpy2.context(precision=prec, allow_complex=True))
    try:
        sq = gmpy2.sqrt(mpfr(-disc))
        pi = gmpy2.const_pi()
        modulus = gmpy2.exp(-pi * sq / (2 * a))
        angle = -pi * mpfr(b) / (2 * a)
        w = mpc(modulus * gmpy2.cos(angle), modulus * gmpy2.sin(angle))
        log_inv_w = math.pi * math.sqrt(-disc) / (2 * a)
        kmax = isqrt(int((prec + 24) * math.log(2) / log_inv_w)) + 2
        w2 = w * w
        t3 = mpc(1)
        t4 = mpc(1)
        t2 = mpc(1)  # sum of w^(k^2+k), k >= 0; prefactor restored below
        w_odd = w  # w^(2k+1)
        w_sq = mpc(1)  # w^(k^2)
        w_step = w2  # w^(2k+2)
        w_tri = mpc(1)  # w^(k^2+k)
        sign = -1
        for _ in range(kmax):
            w_sq = w_sq * w_odd
            w_odd = w_odd * w2
            t3 += 2 * w_sq
            t4 += sign * 2 * w_sq
            sign = -sign
            w_tri = w_tri * w_step
            w_step = w_step * w2
            t2 += w_tri
        t2_8 = t2 * t2
        t2_8 = t2_8 * t2_8
        t2_8 = 256 * w2 * (t2_8 * t2_8)  # theta2^8 = 2^8 w^2 (sum)^8
        t3_8 = t3 * t3
        t3_8 = t3_8 * t3_8
        t3_8 = t3_8 * t3_8
        t4_8 = t4 * t4
        t4_8 = t4_8 * t4_8
        t4_8 = t4_8 * t4_8
        e4 = t2_8 + t3_8 + t4_8
        return 32 * e4 * e4 * e4 / (t2_8 * t3_8 * t4_8)
    finally:
        gmpy2.set_context(old)


def _base_precision(disc: int, forms: list[tuple[int, int, int]]) -> int:
    # Largest coefficient of H_D has about pi sqrt(|D|) sum(1/a) / ln 2 bits;
    # 6 percent headroom plus a per-degree allowance, floor of 64 bits.
    s = sum(1.0 / a for a, _, _ in forms)
    est = math.pi * math.sqrt(-disc) * s / math.log(2)
    return max(64, int(est * 1.06) + 10 * len(forms) + 48)


def _expand(disc: int, forms: list[tuple[int, int, int]], prec: int) -> tuple[list[int], float]:
    """One expansion pass; returns (ascending integer coefficients, residual)."""
    real_roots: list[mpc] = []
    pair_roots: list[mpc] = []
    for a, b, c in forms:
        if b < 0:
            continue  # conjugate of the (a, +b, c) root
        j = _eval_j(a, b, disc, prec)
        if b == 0 or a == b or a == c:
            real_roots.append(j)  # ambiguous form, j is real
        else:
            pair_roots.append(j)
    old = gmpy2.get_context()
    gmpy2.set_context(gmpy2.context(precision=prec))
    try:
        residual = mpfr(0)
        poly: list[mpfr] = [mpfr(1)]  # ascending
        for j in real_roots:
            residual = max(residual, abs(j.imag))
            r = j.real
            prev = poly
            n = len(prev)
            poly = [
                (prev[i - 1] if i >= 1 else mpfr(0)) - r * (prev[i] if i < n else mpfr(0))
                for i in range(n + 1)
            ]
        for j in pair_roots:
            tr = 2 * j.real
            nm = j.real * j.real + j.imag * j.imag
            prev = poly
            n = len(prev)
            poly = [
                (prev[i - 2] if i >= 2 else mpfr(0))
                - tr * (prev[i - 1] if 1 <= i <= n else mpfr(0))
                + nm * (prev[i] if i < n else mpfr(0))
                for i in range(n + 2)
            ]
        ints: list[int] = []
        for cf in poly:
            v = gmpy2.rint(cf)
            residual = max(residual, abs(cf - v))
            ints.append(int(v))
        return ints, float(residual)
    finally:
        gmpy2.set_context(old)


class ClassPolyCache:
    """Append-only disk cache of computed polynomials.

    One record per line: `D degree c_{h-1} ... c_0` (monic, leading 1 omitted),
    single spaces. Directory resolves from the TWISTLOCAL_CACHE environment
    variable, default ./.twistlocal-cache relative to the working directory.
    Concurrent readers are safe; writers must be serialized by the caller
    (each record is appended with a single write). Malformed lines are skipped
    with a logged warning, never rewritten: the file only ever grows.
    """

    def __init__(self, directory: str | os.PathLike | None = None):
        if directory is None:
            directory = os.environ.get(CACHE_ENV_VAR, DEFAULT_CACHE_DIR)
        self.directory = Path(directory)
        self.path = self.directory / CACHE_FILE_NAME
        self._memory: dict[int, HilbertClassPoly] = {}
        self._loaded = False

    def _load(self) -> None:
        if self._loaded:
            return
        self._loaded = True
        if not self.path.exists():
            return
        for lineno, line in enumerate(self.path.read_text().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                tokens = [int(t) for t in line.split()]
                disc, degree, rest = tokens[0], tokens[1], tokens[2:]
                if degree < 1 or len(rest) != degree:
                    raise ValueError("token count does not match degree")
                _check_disc(disc)
                poly = HilbertClassPoly(disc, (1, *rest))
            except (ValueError, IndexError, DomainError) as exc:
                log.warning("%s:%d: skipping malformed cache line (%s)", self.path, lineno, exc)
                continue
            self._memory.setdefault(poly.disc, poly)

    def get(self, disc: int) -> HilbertClassPoly | None:
        self._load()
        return self._memory.get(disc)

    def put(self, poly: HilbertClassPoly) -> None:
        self._load()
        if poly.disc in self._memory:
            return
        self._memory[poly.disc] = poly
        self.directory.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a") as fh:
            fh.write(poly.record_line() + "\n")


_default_caches: dict[str, ClassPolyCache] = {}


def default_cache() -> ClassPolyCache:
    """Process-wide cache for the directory currently named by the environment."""
    directory = os.environ.get(CACHE_ENV_VAR, DEFAULT_CACHE_DIR)
    cache = _default_caches.get(directory)
    if cache is None:
        cache = _default_caches[directory] = ClassPolyCache(directory)
    return cache


def hilbert_class_poly(
    disc: int,
    cache: ClassPolyCache | None = None,
    precision_scale: int = 1,
    use_cache: bool = True,
    bound: int = DISC_BOUND,
) -> HilbertClassPoly:
    """Hilbert class polynomial H_disc as exact integers.

    precision_scale multiplies the base working precision; the result must be
    identical for every scale >= 1 (asserted in tests). Cached results are
    reused unless use_cache is False (precision_scale > 1 always recomputes).
    |disc| above `bound` is refused rather than attempted.
    """
    _check_disc(disc)
    if -disc > bound:
        raise BoundExceededError(f"|{disc}| exceeds the class polynomial bound {bound}, too large")
    if precision_scale < 1:
        raise DomainError("precision_scale must be >= 1")
    cache = cache if cache is not None else default_cache()
    fresh = precision_scale > 1 or not use_cache
    if not fresh:
        hit = cache.get(disc)
        if hit is not None:
            return hit
    forms = reduced_forms(disc)
    if not forms:
        raise DomainError(f"no primitive forms of discriminant {disc}")  # pragma: no cover
    prec = _base_precision(disc, forms) * precision_scale
    for _ in range(MAX_PRECISION_DOUBLINGS + 1):
        ints, residual = _expand(disc, forms, prec)
        if residual < RESIDUAL_LIMIT:
            poly = HilbertClassPoly(disc, tuple(reversed(ints)))
            if use_cache and precision_scale == 1:
                cache.put(poly)
            return poly
        prec *= 2
    raise PrecisionError(
        f"class polynomial for {disc} did not stabilise below residual "
        f"{RESIDUAL_LIMIT} after {MAX_PRECISION_DOUBLINGS} precision doublings"
    )


# ---------------------------------------------------------------------------
# roots modulo p


def _polymod(coeffs: tuple[int, ...], p: int) -> list[int]:
    """Monic descending coeffs reduced mod p (stays monic: leading 1)."""
    return [c % p for c in coeffs]


def _polymulmod(u: list[int], v: list[int], h: list[int], p: int) -> list[int]:
    """(u * v) mod (h, p); all ascending coefficient lists, h monic."""
    out = [0] * (len(u) + len(v) - 1)
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                out[i + j] = (out[i + j] + a * b) % p
    # reduce by monic h
    dh = len(h) - 1
    for i in range(len(out) - 1, dh - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(dh):
                out[i - dh + j] = (out[i - dh + j] - c * h[j]) % p
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _gcd_poly(u: list[int], v: list[int], p: int) -> list[int]:
    """gcd in F_p[X]; ascending lists, result not normalised."""
    while any(v):
        # u mod v
        inv = pow(v[-1], -1, p)
        u = u[:]
        while len(u) >= len(v) and any(u):
            if u[-1] == 0:
                u.pop()
                continue
            f = u[-1] * inv % p
            off = len(u) - len(v)
            for j in range(len(v)):
                u[off + j] = (u[off + j] - f * v[j]) % p
            u.pop()
        while len(u) > 1 and u[-1] == 0:
            u.pop()
        if not u:
            u = [0]
        u, v = v, u
    return u


def _poly_derivative(mod: list[int], p: int) -> list[int]:
    """Formal derivative of a descending coefficient list, reduced mod p."""
    h = len(mod) - 1
    return [(h - i) * mod[i] % p for i in range(h)]


def has_simple_root_mod_p(disc: int, p: int, cache: ClassPolyCache | None = None) -> bool:
    """True iff H_disc has a simple root in F_p (a root not shared with H').

    Strictly stronger than has_root_mod_p at the finitely many primes
    dividing the polynomial discriminant, where the only roots can be
    multiple. A simple root lifts to Z_p by Hensel's lemma and therefore
    certifies a degree-one prime of the field generated by a root; a
    multiple root certifies nothing about splitting.
    """
    if not is_prime(p):
        raise DomainError(f"has_simple_root_mod_p: p={p} is not prime")
    poly = hilbert_class_poly(disc, cache=cache)
    mod = _polymod(poly.coeffs, p)
    if all(c == 0 for c in mod[1:]):  # X^h mod p: the root 0 has multiplicity h
        return len(mod) == 2
    if p < EXHAUSTIVE_ROOT_LIMIT:
        deriv = _poly_derivative(mod, p)
        for x in range(p):
            v = 0
            for c in mod:
                v = (v * x + c) % p
            if v != 0:
                continue
            w = 0
            for c in deriv:
                w = (w * x + c) % p
            if w != 0:
                return True
        return False
    if len(mod) == 2:
        return True  # monic linear: the single root is always simple
    if len(mod) == 3:
        # p odd here: two simple roots iff the discriminant is a nonzero
        # square; discriminant zero gives only the double root
        b, c = mod[1], mod[2]
        return kronecker_symbol(b * b - 4 * c, p) == 1
    h = list(reversed(mod))  # ascending, monic
    result = [1]
    base = [0, 1] if len(h) > 2 else _polymulmod([0, 1], [1], h, p)
    e = p
    while e:
        if e & 1:
            result = _polymulmod(result, base, h, p)
        e >>= 1
        if e:
            base = _polymulmod(base, base, h, p)
    frob = result[:]
    while len(frob) < 2:
        frob.append(0)
    frob[1] = (frob[1] - 1) % p
    while len(frob) > 1 and frob[-1] == 0:
        frob.pop()
    if not any(frob):
        # X^p = X mod h: h divides X^p - X, so h is squarefree with all
        # roots rational; every root is simple
        return True
    rational = _gcd_poly(h, frob, p)  # distinct rational roots, each once
    if len(rational) <= 1:
        return False
    deriv = list(reversed(_poly_derivative(mod, p)))
    shared = _gcd_poly(rational, deriv, p)  # rational roots that are multiple
    while len(shared) > 1 and shared[-1] == 0:
        shared.pop()
    return len(rational) > len(shared)


def has_root_mod_p(disc: int, p: int, cache: ClassPolyCache | None = None) -> bool:
    """True iff H_disc has a root in F_p.

    Exhaustive evaluation below 10^4 keeps small primes (including 2 and 3)
    on the direct route; larger primes use gcd(H, X^p - X) computed through
    X^p mod H by binary exponentiation.
    """
    if not is_prime(p):
        raise DomainError(f"has_root_mod_p: p={p} is not prime")
    poly = hilbert_class_poly(disc, cache=cache)
    mod = _polymod(poly.coeffs, p)
    if all(c == 0 for c in mod[1:]):  # X^h mod p
        return True
    if p < EXHAUSTIVE_ROOT_LIMIT:
        for x in range(p):
            v = 0
            for c in mod:
                v = (v * x + c) % p
            if v == 0:
                return True
        return False
    if len(mod) == 2:
        return True  # monic linear polynomial always has its root
    if len(mod) == 3:
        # monic quadratic over F_p, p odd here: roots exist iff the
        # discriminant is a square or zero mod p
        b, c = mod[1], mod[2]
        return kronecker_symbol(b * b - 4 * c, p) != -1
    h = list(reversed(mod))  # ascending, monic
    # X^p mod h
    result = [1]
    base = [0, 1] if len(h) > 2 else _polymulmod([0, 1], [1], h, p)
    e = p
    while e:
        if e & 1:
            result = _polymulmod(result, base, h, p)
        e >>= 1
        if e:
            base = _polymulmod(base, base, h, p)
    # X^p - X
    frob = result[:]
    while len(frob) < 2:
        frob.append(0)
    frob[1] = (frob[1] - 1) % p
    while len(frob) > 1 and frob[-1] == 0:
        frob.pop()
    if not any(frob):
        return True  # X^p = X mod h: every root of h lies in F_p
    g = _gcd_poly(h, frob, p)
    return len(g) > 1
