"""Scalar backends for projective geometry over R and Q_p.

REAL works in double precision with a comparison tolerance.  PADIC keeps
matrices as exact rationals and measures them with the p-adic absolute
value; normalized vectors are reduced to integers modulo p^digits, which is
the working precision.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np


class FieldError(ValueError):
    pass


class SingularError(FieldError):
    """Matrix is singular at the working precision."""


def _parse_scalar(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(str(x).strip())


@dataclass(frozen=True)
class Real:
    tol: float = 1e-12

    kind = "real"

    def to_json(self) -> dict:
        return {"type": "real"}

    # -- matrices and vectors -------------------------------------------
    def mat(self, entries) -> np.ndarray:
        A = np.array([[float(_parse_scalar(x)) for x in row] for row in entries], dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise FieldError("matrix must be square")
        return A

    def vec(self, entries) -> np.ndarray:
        return np.array([float(_parse_scalar(x)) for x in entries], dtype=float)

    def identity(self, n: int) -> np.ndarray:
        return np.eye(n)

    def dim(self, A) -> int:
        return A.shape[0]

    def mul(self, A, B):
        return self.rescale(A @ B)

    def apply(self, A, v):
        return A @ v

    def inv(self, A):
        if self.is_singular(A):
            raise SingularError("matrix is singular at working precision")
        return self.rescale(np.linalg.inv(A))

    def transpose(self, A):
        return A.T.copy()

    def power(self, A, n: int):
        if n < 0:
            return self.power(self.inv(A), -n)
        out = np.eye(A.shape[0])
        base = A
        while n:
            if n & 1:
                out = self.rescale(out @ base)
            base = self.rescale(base @ base)
            n >>= 1
        return out

    def rescale(self, A):
        """Projective maps only matter up to scalars; keep entries of order one."""
        m = np.max(np.abs(A))
        return A / m if m > 0 else A

    def is_singular(self, A) -> bool:
        s = np.linalg.svd(A, compute_uv=False)
        return s[-1] <= self.tol * s[0]

    def is_scalar(self, A) -> bool:
        n = A.shape[0]
        B = A / A.flat[np.argmax(np.abs(A))]
        return bool(np.max(np.abs(B - B[0, 0] * np.eye(n))) <= 1e3 * self.tol)

    # -- norms ------------------------------------------------------------
    def absval(self, x) -> float:
        return abs(float(x))

    def norm(self, v) -> float:
        return float(np.linalg.norm(v))

    def wedge_norm(self, v, w) -> float:
        # from the 2x2 minors directly; the Gram form |v|^2|w|^2 - <v,w>^2
        # cancels catastrophically for nearby points
        M = np.outer(v, w)
        return float(np.linalg.norm(M - M.T) / math.sqrt(2))

    def dot(self, f, v) -> float:
        return float(np.dot(f, v))

    def normalize(self, v):
        n = np.linalg.norm(v)
        if n == 0:
            raise FieldError("zero vector")
        v = v / n
        # fix a sign so equal projective points get equal coordinates
        k = int(np.argmax(np.abs(v) > 1e-9))
        return -v if v[k] < 0 else v

    def is_zero(self, d) -> bool:
        return d <= self.tol

    def default_tol(self) -> float:
        return 1e-12

    def sqrt(self, x):
        return math.sqrt(float(x))

    # -- Cartan decomposition -----------------------------------------------
    def cartan(self, A):
        """(|a_1| >= ... >= |a_n|, top image direction, top input functional)."""
        U, s, Vt = np.linalg.svd(A)
        if s[-1] <= self.tol * s[0]:
            raise SingularError("matrix is singular at working precision")
        return [float(x) for x in s], self.normalize(U[:, 0]), self.normalize(Vt[0])

    # -- sampling -------------------------------------------------------------
    def random_vector(self, n: int, rng: random.Random):
        return self.normalize(np.array([rng.gauss(0.0, 1.0) for _ in range(n)]))

    def perturb(self, v, scale: float, rng: random.Random):
        return self.normalize(v + scale * np.array([rng.gauss(0.0, 1.0) for _ in range(len(v))]))

    def random_isometry(self, n: int, rng: random.Random):
        G = np.array([[rng.gauss(0.0, 1.0) for _ in range(n)] for _ in range(n)])
        Q, _ = np.linalg.qr(G)
        return Q

    def to_strings(self, A) -> list:
        if np.ndim(A) == 1:
            return [repr(float(x)) for x in A]
        return [[repr(float(x)) for x in row] for row in A]


def valuation(x: Fraction, p: int) -> float:
    if x == 0:
        return math.inf
    x = Fraction(x)
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True)
class Padic:
    p: int
    digits: int = 12

    kind = "padic"

    def __post_init__(self):
        if self.p < 2 or any(self.p % q == 0 for q in range(2, int(self.p ** 0.5) + 1)):
            raise FieldError(f"{self.p} is not prime")
        if self.digits < 1:
            raise FieldError("digits must be positive")

    def to_json(self) -> dict:
        return {"type": "padic", "p": self.p, "digits": self.digits}

    @property
    def modulus(self) -> int:
        return self.p ** self.digits

    # -- matrices and vectors -------------------------------------------
    def mat(self, entries) -> tuple:
        A = tuple(tuple(_parse_scalar(x) for x in row) for row in entries)
        if any(len(row) != len(A) for row in A):
            raise FieldError("matrix must be square")
        return A

    def vec(self, entries) -> tuple:
        return tuple(_parse_scalar(x) for x in entries)

    def identity(self, n: int) -> tuple:
        return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))

    def dim(self, A) -> int:
        return len(A)

    def mul(self, A, B):
        n = len(A)
        return tuple(tuple(sum((A[i][k] * B[k][j] for k in range(n)), Fraction(0))
                           for j in range(n)) for i in range(n))

    def apply(self, A, v):
        return tuple(sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in A)

    def inv(self, A):
        n = len(A)
        M = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
        for k in range(n):
            piv = min((i for i in range(k, n) if M[i][k] != 0),
                      key=lambda i: valuation(M[i][k], self.p), default=None)
            if piv is None:
                raise SingularError("matrix is singular")
            M[k], M[piv] = M[piv], M[k]
            c = M[k][k]
            M[k] = [x / c for x in M[k]]
            for i in range(n):
                if i != k and M[i][k] != 0:
                    f = M[i][k]
                    M[i] = [a - f * b for a, b in zip(M[i], M[k])]
        return tuple(tuple(row[n:]) for row in M)

    def transpose(self, A):
        return tuple(zip(*A))

    def power(self, A, n: int):
        if n < 0:
            return self.power(self.inv(A), -n)
        out = self.identity(len(A))
        base = A
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def rescale(self, A):
        return A

    def is_singular(self, A) -> bool:
        try:
            self.inv(A)
        except SingularError:
            return True
        return False

    def is_scalar(self, A) -> bool:
        n = len(A)
        c = A[0][0]
        return c != 0 and all(A[i][j] == (c if i == j else 0) for i in range(n) for j in range(n))

    # -- norms ------------------------------------------------------------
    def absval(self, x) -> Fraction:
        v = valuation(Fraction(x), self.p)
        if v == math.inf:
            return Fraction(0)
        return Fraction(1, self.p ** v) if v >= 0 else Fraction(self.p ** (-v))

    def norm(self, v) -> Fraction:
        return max(self.absval(x) for x in v)

    def wedge_norm(self, v, w) -> Fraction:
        n = len(v)
        return max((self.absval(v[i] * w[j] - v[j] * w[i])
                    for i in range(n) for j in range(i + 1, n)), default=Fraction(0))

    def dot(self, f, v):
        return sum((a * b for a, b in zip(f, v)), Fraction(0))

    def normalize(self, v):
        """Scale to a primitive vector and reduce modulo p^digits.

        The first coordinate of minimal valuation becomes 1, which fixes the
        representative of the projective point.
        """
        v = [Fraction(x) for x in v]
        if all(x == 0 for x in v):
            raise FieldError("zero vector")
        vals = [valuation(x, self.p) for x in v]
        k = vals.index(min(vals))
        lead = v[k]
        out = []
        M = self.modulus
        for x in v:
            y = x / lead
            out.append(Fraction((y.numerator * pow(y.denominator, -1, M)) % M))
        return tuple(out)

    def is_zero(self, d) -> bool:
        return d <= Fraction(1, self.modulus)

    def default_tol(self) -> Fraction:
        return Fraction(1, self.p ** (self.digits - 1))

    def sqrt(self, x):
        """Exact square root when x is an even power of p, else a float."""
        x = Fraction(x)
        if x == 0:
            return Fraction(0)
        v = valuation(x, self.p)
        if v % 2 == 0 and x == Fraction(self.p) ** v:
            return Fraction(self.p) ** (v // 2)
        return math.sqrt(float(x))

    # -- Cartan decomposition (elementary divisors over Z_p) --------------------
    def cartan(self, A):
        n = len(A)
        M = [list(row) for row in A]
        L = [list(r) for r in self.identity(n)]
        R = [list(r) for r in self.identity(n)]
        diag = []
        for k in range(n):
            best = None
            for i in range(k, n):
                for j in range(k, n):
                    if M[i][j] != 0:
                        v = valuation(M[i][j], self.p)
                        if best is None or v < best[0]:
                            best = (v, i, j)
            if best is None:
                raise SingularError("matrix is singular")
            _, i, j = best
            M[k], M[i] = M[i], M[k]
            L[k], L[i] = L[i], L[k]
            for row in M:
                row[k], row[j] = row[j], row[k]
            for row in R:
                row[k], row[j] = row[j], row[k]
            piv = M[k][k]
            for i in range(k + 1, n):
                f = M[i][k] / piv
                if f:
                    M[i] = [a - f * b for a, b in zip(M[i], M[k])]
                    L[i] = [a - f * b for a, b in zip(L[i], L[k])]
            for j in range(k + 1, n):
                f = M[k][j] / piv
                if f:
                    for row in M:
                        row[j] -= f * row[k]
                    for row in R:
                        row[j] -= f * row[k]
            diag.append(piv)
        Linv = self.inv(tuple(map(tuple, L)))
        Rinv = self.inv(tuple(map(tuple, R)))
        top = self.normalize([Linv[i][0] for i in range(n)])
        functional = self.normalize(Rinv[0])
        return [self.absval(d) for d in diag], top, functional

    # -- sampling -------------------------------------------------------------
    def random_vector(self, n: int, rng: random.Random):
        while True:
            v = [rng.randrange(self.modulus) for _ in range(n)]
            if any(v):
                return self.normalize(v)

    def perturb(self, v, scale, rng: random.Random):
        """A point within distance `scale` of v (scale a power of 1/p)."""
        k = 0
        while Fraction(1, self.p ** k) > scale:
            k += 1
        k = min(k, self.digits)
        pk = self.p ** k
        w = [x + pk * rng.randrange(self.modulus) for x in v]
        return self.normalize(w)

    def random_isometry(self, n: int, rng: random.Random):
        while True:
            A = tuple(tuple(Fraction(rng.randrange(self.p ** 3)) for _ in range(n)) for _ in range(n))
            # invertible over Z_p iff the determinant is a unit
            if self._det(A) % self.p != 0:
                return A

    def _det(self, A) -> Fraction:
        n = len(A)
        M = [list(r) for r in A]
        det = Fraction(1)
        for k in range(n):
            piv = next((i for i in range(k, n) if M[i][k] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != k:
                M[k], M[piv] = M[piv], M[k]
                det = -det
            det *= M[k][k]
            for i in range(k + 1, n):
                f = M[i][k] / M[k][k]
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
        return det

    def to_strings(self, A) -> list:
        if A and not isinstance(A[0], tuple):
            return [str(x) for x in A]
        return [[str(x) for x in row] for row in A]


def field_from_json(spec: dict):
    kind = spec.get("type")
    if kind == "real":
        return Real()
    if kind == "padic":
        return Padic(int(spec["p"]), int(spec.get("digits", 12)))
    raise FieldError(f"unknown field type {kind!r}")

