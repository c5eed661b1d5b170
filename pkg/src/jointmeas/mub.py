"""Mutually unbiased bases for prime and prime-power dimensions.

Odd characteristic uses the Wootters-Fields quadratic phases with the field
trace. Characteristic two uses the Pauli eigenbases for n = 2 and, for
n = 2^k with k >= 2, the common eigenbases of the n + 1 commuting classes of
displacement operators ``X(a) Z(lambda a)`` and ``Z(b)`` over GF(2^k).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from . import linalg
from ._config import DEFAULT
from .errors import DimensionMismatch, NotPrimePower


@dataclass(frozen=True)
class PrimePower:
    n: int
    p: int
    k: int


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    d = 2
    while d * d <= m:
        if m % d == 0:
            return False
        d += 1
    return True


def prime_power_decompose(n: int) -> PrimePower:
    """Write ``n = p**k`` with ``p`` prime, or raise :class:`NotPrimePower`."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    p = 2
    while n % p:
        p += 1
    k, m = 0, n
    while m % p == 0:
        m //= p
        k += 1
    if m != 1:
        raise NotPrimePower(
            f"n={n} is not a prime power; no complete MUB construction is known. "
            "Load an externally supplied candidate instead."
        )
    return PrimePower(n, p, k)


# -- finite fields ----------------------------------------------------------

def _poly_mod(num, den, p):
    num = list(num)
    while len(num) >= len(den) and any(num):
        if num[-1] == 0:
            num.pop()
            continue
        coef = num[-1] * pow(den[-1], -1, p) % p
        shift = len(num) - len(den)
        for i, d in enumerate(den):
            num[shift + i] = (num[shift + i] - coef * d) % p
        num.pop()
    return num


def _is_irreducible(f, p):
    k = len(f) - 1
    for deg in range(1, k // 2 + 1):
        for coeffs in product(range(p), repeat=deg):
            g = list(coeffs) + [1]
            if not any(_poly_mod(f, g, p)):
                return False
    return True


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible polynomial of degree ``k``.

    Coefficients are returned lowest degree first, leading 1 included.
    Candidates are ordered by their lower coefficients read as a base-``p``
    number with the constant term least significant.
    """
    for code in range(p ** k):
        low = [(code // p ** i) % p for i in range(k)]
        f = low + [1]
        if k == 1 or (f[0] != 0 and _is_irreducible(f, p)):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # cannot happen


class GaloisField:
    """GF(p^k) with elements encoded as integers 0..q-1 (base-p digits)."""

    def __init__(self, p: int, k: int):
        self.p, self.k, self.q = p, k, p ** k
        self.modulus = smallest_irreducible(p, k)
        q = self.q
        digits = [[(x // p ** i) % p for i in range(k)] for x in range(q)]
        enc = lambda ds: sum(d * p ** i for i, d in enumerate(ds))  # noqa: E731
        self.add = np.array([[enc([(a + b) % p for a, b in zip(digits[x], digits[y])])
                              for y in range(q)] for x in range(q)], dtype=np.int64)
        mul = np.zeros((q, q), dtype=np.int64)
        for x in range(q):
            for y in range(q):
                prod = [0] * (2 * k - 1)
                for i, a in enumerate(digits[x]):
                    for j, b in enumerate(digits[y]):
                        prod[i + j] = (prod[i + j] + a * b) % p
                red = _poly_mod(prod, list(self.modulus), p) if k > 1 else [prod[0] % p]
                red = (red + [0] * k)[:k]
                mul[x, y] = enc(red)
        self.mul = mul
        self.trace = np.array([self._trace(x) for x in range(q)], dtype=np.int64)

    def power(self, x: int, e: int) -> int:
        r = 1
        for _ in range(e):
            r = int(self.mul[r, x])
        return r

    def _trace(self, x: int) -> int:
        acc, y = 0, x
        for _ in range(self.k):
            acc = int(self.add[acc, y])
            y = self.power(y, self.p)
        if acc >= self.p:
            raise AssertionError("field trace left the prime subfield")
        return acc


# -- MUB families -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MubFamily:
    """``bases[b, j]`` is the j-th unit vector of basis ``b`` (basis 0 computational)."""

    n: int
    bases: np.ndarray

    @property
    def labels(self) -> list[int]:
        return list(range(len(self.bases)))

    @cached_property
    def report(self) -> "MubReport":
        return unbiasedness_report(self)

    def to_json(self) -> dict:
        return {
            "n": int(self.n),
            "bases": [[[[float(z.real), float(z.imag)] for z in vec] for vec in basis]
                      for basis in self.bases],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MubFamily":
        n = int(data["n"])
        bases = data["bases"]
        for basis in bases:
            if len(basis) != n:
                raise DimensionMismatch(f"basis with {len(basis)} vectors in dimension {n}")
            for vec in basis:
                if len(vec) != n:
                    raise DimensionMismatch(f"vector of length {len(vec)} in dimension {n}")
        arr = np.array([[[complex(re, im) for re, im in vec] for vec in basis]
                        for basis in bases], dtype=np.complex128)
        if arr.ndim != 3:
            raise DimensionMismatch("every basis must contain the same number of vectors")
        return cls(n, arr)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "MubFamily":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def _pauli_mubs():
    s = 1 / np.sqrt(2)
    return np.array([
        [[1, 0], [0, 1]],
        [[s, s], [s, -s]],
        [[s, 1j * s], [s, -1j * s]],
    ], dtype=np.complex128)


def _odd_mubs(field: GaloisField):
    q, p = field.q, field.p
    omega = np.exp(2j * np.pi / p)
    sq = field.mul[np.arange(q), np.arange(q)]          # k^2
    bases = [np.eye(q, dtype=np.complex128)]
    for a in range(q):
        vecs = np.empty((q, q), dtype=np.complex128)
        a_k2 = field.mul[a, sq]
        for j in range(q):
            exps = field.trace[field.add[a_k2, field.mul[j, np.arange(q)]]]
            vecs[j] = omega ** exps / np.sqrt(q)
        bases.append(vecs)
    return np.array(bases)


def _even_mubs(field: GaloisField, seed: int = 20240229):
    q = field.q
    idx = np.arange(q)

    def X(a):
        m = np.zeros((q, q), dtype=np.complex128)
        m[field.add[idx, a], idx] = 1.0
        return m

    def Z(b):
        return np.diag((-1.0) ** field.trace[field.mul[b, idx]]).astype(np.complex128)

    classes = [[Z(b) for b in range(1, q)]]
    for lam in range(q):
        classes.append([X(a) @ Z(int(field.mul[lam, a])) for a in range(1, q)])
    rng = np.random.default_rng(seed)
    bases = []
    for cls in classes:
        h = np.zeros((q, q), dtype=np.complex128)
        for d in cls:
            h += rng.normal() * (d + d.conj().T) + rng.normal() * 1j * (d - d.conj().T)
        _, vecs = linalg.herm_eig(h)
        bases.append(vecs.T.copy())
    return np.array(bases)


def build_mubs(pp: PrimePower | int) -> MubFamily:
    """Construct ``n + 1`` mutually unbiased bases in dimension ``n = p**k``."""
    if isinstance(pp, int):
        pp = prime_power_decompose(pp)
    if pp.n > 16:
        raise ValueError(f"dimension {pp.n} exceeds the supported maximum of 16")
    if pp.n == 2:
        return MubFamily(2, _pauli_mubs())
    field = GaloisField(pp.p, pp.k)
    bases = _odd_mubs(field) if pp.p % 2 else _even_mubs(field)
    return MubFamily(pp.n, bases)


@dataclass(frozen=True)
class MubReport:
    n: int
    num_bases: int
    max_intra_deviation: float
    max_cross_deviation: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "num_bases": self.num_bases,
            "max_intra_deviation": self.max_intra_deviation,
            "max_cross_deviation": self.max_cross_deviation,
            "passed": self.passed,
        }


def unbiasedness_report(m: MubFamily, atol: float = DEFAULT.mub_pass) -> MubReport:
    """Worst deviations from orthonormality and from ``|<e|f>|^2 = 1/n``."""
    bases = np.asarray(m.bases)
    if bases.ndim != 3 or bases.shape[2] != m.n:
        raise DimensionMismatch(f"vectors must have length n={m.n}, got array {bases.shape}")
    eye = np.eye(bases.shape[1])
    intra = max(float(np.abs(b.conj() @ b.T - eye).max()) for b in bases)
    cross = 0.0
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            ov = np.abs(bases[i].conj() @ bases[j].T) ** 2
            cross = max(cross, float(np.abs(ov - 1.0 / m.n).max()))
    return MubReport(m.n, len(bases), intra, cross, bool(intra < atol and cross < atol))
