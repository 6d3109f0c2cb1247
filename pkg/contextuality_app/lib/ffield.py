"""
Exact arithmetic over Z_p and the symplectic group SL(2, Z_p).

Holds the coset structure of the computational-basis-preserving subgroup BP, which labels
the single-qudit mutually unbiased bases (one left coset per basis).

Called by:
    - contextuality_app.lib.weyl
    - contextuality_app.lib.stab2
    - contextuality_app.lib.run_config (prime validation)
"""

import enum
import functools
import itertools
import logging
from dataclasses import dataclass

from sympy import isprime

log = logging.getLogger(__name__)

## primes the commands accept; the library functions take any prime
SUPPORTED_PRIMES: tuple[int, ...] = (2, 3, 5, 7)


class FieldError(Exception):
    """
    Represents invalid finite-field input (non-prime modulus, zero inverse, determinant != 1).
    """


@functools.lru_cache(maxsize=None)
def require_prime(p: int) -> int:
    """
    Returns p when it is a prime >= 2; raises FieldError otherwise.
    """
    if not isinstance(p, int) or isinstance(p, bool) or not isprime(p):
        raise FieldError(f'p must be prime, got ``{p!r}``')
    return p


def inv_mod(a: int, p: int) -> int:
    """
    Multiplicative inverse of a modulo p via the extended Euclidean algorithm.
    """
    a %= p
    if a == 0:
        raise FieldError(f'zero has no inverse modulo {p}')
    old_r, r = a, p
    old_s, s = 1, 0
    while r != 0:
        quotient = old_r // r
        old_r, r = r, old_r - quotient * r
        old_s, s = s, old_s - quotient * s
    return old_s % p


@dataclass(frozen=True, slots=True)
class FpElement:
    """
    An element of Z_p; the modulus is validated prime at construction.
    """

    value: int
    modulus: int

    def __post_init__(self) -> None:
        require_prime(self.modulus)
        if not 0 <= self.value < self.modulus:
            raise FieldError(f'value ``{self.value}`` outside Z_{self.modulus}')

    @classmethod
    def of(cls, value: int, modulus: int) -> 'FpElement':
        return cls(value % modulus, modulus)

    def _coerce(self, other: 'FpElement | int') -> int:
        if isinstance(other, FpElement):
            if other.modulus != self.modulus:
                raise FieldError(f'modulus mismatch, ``{self.modulus}`` vs ``{other.modulus}``')
            return other.value
        return int(other)

    def __add__(self, other: 'FpElement | int') -> 'FpElement':
        return FpElement.of(self.value + self._coerce(other), self.modulus)

    def __sub__(self, other: 'FpElement | int') -> 'FpElement':
        return FpElement.of(self.value - self._coerce(other), self.modulus)

    def __mul__(self, other: 'FpElement | int') -> 'FpElement':
        return FpElement.of(self.value * self._coerce(other), self.modulus)

    def __truediv__(self, other: 'FpElement | int') -> 'FpElement':
        return self * fp_inv(FpElement.of(self._coerce(other), self.modulus))

    def __neg__(self) -> 'FpElement':
        return FpElement.of(-self.value, self.modulus)

    def __int__(self) -> int:
        return self.value


def fp_inv(a: FpElement) -> FpElement:
    """
    Returns the multiplicative inverse of a nonzero field element.
    """
    return FpElement(inv_mod(a.value, a.modulus), a.modulus)


class Infinity(enum.Enum):
    """
    The point at infinity of the projective line Z_p ∪ {∞}; never takes part in arithmetic.
    """

    INFINITY = '∞'

    def __repr__(self) -> str:
        return '∞'


INF = Infinity.INFINITY

## a coset label is either a residue b in Z_p or the distinguished INF
CosetLabel = int | Infinity


def coset_labels(p: int) -> list[CosetLabel]:
    """
    Returns the p+1 coset labels in stable order: 0, 1, ..., p-1, ∞.
    """
    require_prime(p)
    labels: list[CosetLabel] = list(range(p))
    labels.append(INF)
    return labels


def coset_sort_key(b: CosetLabel, p: int) -> int:
    return p if b is INF else int(b)


def label_to_json(b: CosetLabel) -> int | str:
    return 'inf' if b is INF else int(b)


def label_from_json(raw: int | str) -> CosetLabel:
    if raw in ('inf', '∞'):
        return INF
    return int(raw)


@dataclass(frozen=True, slots=True)
class SympMatrix:
    """
    A 2x2 matrix (alpha beta; gamma eps) over Z_p with determinant 1.

    Entries are stored as residues in {0, ..., p-1}.
    """

    alpha: int
    beta: int
    gamma: int
    eps: int
    p: int

    def __post_init__(self) -> None:
        require_prime(self.p)
        for entry in (self.alpha, self.beta, self.gamma, self.eps):
            if not 0 <= entry < self.p:
                raise FieldError(f'entry ``{entry}`` not reduced modulo {self.p}')
        if (self.alpha * self.eps - self.beta * self.gamma) % self.p != 1:
            raise FieldError(f'determinant of {self.as_tuple()} is not 1 modulo {self.p}')

    @classmethod
    def of(cls, alpha: int, beta: int, gamma: int, eps: int, p: int) -> 'SympMatrix':
        """
        Builds a matrix from unreduced integers.
        """
        return cls(alpha % p, beta % p, gamma % p, eps % p, p)

    @classmethod
    def identity(cls, p: int) -> 'SympMatrix':
        return cls(1, 0, 0, 1, p)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.alpha, self.beta, self.gamma, self.eps)

    def trace(self) -> int:
        return (self.alpha + self.eps) % self.p

    def is_identity(self) -> bool:
        return self.as_tuple() == (1, 0, 0, 1)

    def __matmul__(self, other: 'SympMatrix') -> 'SympMatrix':
        if other.p != self.p:
            raise FieldError(f'modulus mismatch, ``{self.p}`` vs ``{other.p}``')
        a, b, c, d = self.as_tuple()
        e, f, g, h = other.as_tuple()
        return SympMatrix.of(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h, self.p)

    def inverse(self) -> 'SympMatrix':
        ## determinant is 1, so the adjugate is the inverse
        return SympMatrix.of(self.eps, -self.beta, -self.gamma, self.alpha, self.p)

    def apply(self, x: int, z: int) -> tuple[int, int]:
        """
        Acts on the column vector (x, z).
        """
        return ((self.alpha * x + self.beta * z) % self.p, (self.gamma * x + self.eps * z) % self.p)


@dataclass(frozen=True, slots=True)
class BpElement:
    """
    C_{alpha,gamma} = (alpha 0; gamma alpha^-1), an element of the basis-preserving subgroup BP.
    """

    alpha: int
    gamma: int
    p: int

    def __post_init__(self) -> None:
        require_prime(self.p)
        if not 0 < self.alpha < self.p or not 0 <= self.gamma < self.p:
            raise FieldError(f'invalid BP parameters alpha=``{self.alpha}`` gamma=``{self.gamma}`` for p={self.p}')

    @property
    def matrix(self) -> SympMatrix:
        return SympMatrix(self.alpha, 0, self.gamma, inv_mod(self.alpha, self.p), self.p)

    @classmethod
    def from_matrix(cls, matrix: SympMatrix) -> 'BpElement':
        if matrix.beta != 0:
            raise FieldError(f'{matrix.as_tuple()} is not in BP')
        return cls(matrix.alpha, matrix.gamma, matrix.p)


def sl2_elements(p: int) -> list[SympMatrix]:
    """
    Lists SL(2, Z_p) in lexicographic order of (alpha, beta, gamma, eps); p(p^2-1) elements.
    """
    require_prime(p)
    elements: list[SympMatrix] = []
    for alpha, beta, gamma, eps in itertools.product(range(p), repeat=4):
        if (alpha * eps - beta * gamma) % p == 1:
            elements.append(SympMatrix(alpha, beta, gamma, eps, p))
    return elements


def bp_elements(p: int) -> list[BpElement]:
    """
    Lists BP ordered by (alpha, gamma); p(p-1) elements.
    """
    require_prime(p)
    return [BpElement(alpha, gamma, p) for alpha in range(1, p) for gamma in range(p)]


def coset_rep(b: CosetLabel, p: int) -> SympMatrix:
    """
    Returns the left-coset representative F_b = (1 b; 0 1), or F_∞ = (2 1; -1 0).
    """
    require_prime(p)
    if b is INF:
        return SympMatrix.of(2, 1, -1, 0, p)
    return SympMatrix.of(1, int(b), 0, 1, p)


def coset_decompose(matrix: SympMatrix) -> tuple[CosetLabel, BpElement]:
    """
    Splits F into (b, C) with coset_rep(b) @ C == F and C in BP; the split is unique.

    F_b^-1 F lies in BP exactly when beta = b * eps, which has a solution b in Z_p iff eps != 0;
    otherwise F lies in the coset of F_∞.
    """
    p = matrix.p
    if matrix.eps != 0:
        b: CosetLabel = (matrix.beta * inv_mod(matrix.eps, p)) % p
    else:
        b = INF
    remainder = coset_rep(b, p).inverse() @ matrix
    return b, BpElement.from_matrix(remainder)


def compose(b: CosetLabel, element: BpElement) -> SympMatrix:
    return coset_rep(b, element.p) @ element.matrix


def symp_conjugate(element: BpElement, rep: SympMatrix) -> SympMatrix:
    """
    Returns C^-1 F_b C.
    """
    c_matrix = element.matrix
    return c_matrix.inverse() @ rep @ c_matrix
