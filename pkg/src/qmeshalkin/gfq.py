"""Arithmetic in small finite fields GF(q).

Elements are integer codes in ``range(q)``.  For ``q = p**d`` the code of
``c_0 + c_1 x + ... + c_{d-1} x^{d-1}`` is ``sum(c_i * p**i)``.  Products
are reduced modulo a fixed monic irreducible polynomial so that encodings
are identical across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

# Low-to-high coefficients, leading 1 included.
BUILTIN_MODULI: dict[int, tuple[int, ...]] = {
    4: (1, 1, 1),  # x^2 + x + 1
    8: (1, 1, 0, 1),  # x^3 + x + 1
    9: (1, 0, 1),  # x^2 + 1
}

TABLE_LIMIT = 16
# Extension fields are always table driven, so their order is capped.
MAX_EXTENSION_ORDER = 512
MAX_DEGREE = 3


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (fine for field orders)."""
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def _poly_eval(coeffs, x: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Irreducibility over GF(p) for monic polynomials of degree 1 to 3.

    A polynomial of degree <= 3 is reducible iff it has a root.
    """
    degree = len(modulus) - 1
    if degree < 1 or degree > MAX_DEGREE or modulus[-1] % p != 1:
        raise ValueError(f"can only check monic moduli of degree 1..{MAX_DEGREE}")
    if degree == 1:
        return True
    return all(_poly_eval(modulus, x, p) != 0 for x in range(p))


def find_irreducible(p: int, d: int) -> tuple[int, ...]:
    """Smallest (by element code of the low coefficients) monic irreducible of degree d."""
    for code in range(p**d):
        candidate = tuple(_digits(code, p, d)) + (1,)
        if is_irreducible(candidate, p):
            return candidate
    raise AssertionError(f"no irreducible polynomial of degree {d} over GF({p})")


@dataclass(frozen=True, eq=False)
class FieldSpec:
    q: int
    characteristic: int
    degree: int
    modulus: tuple[int, ...]
    _add: tuple[tuple[int, ...], ...] | None = field(default=None, repr=False)
    _mul: tuple[tuple[int, ...], ...] | None = field(default=None, repr=False)
    _neg: tuple[int, ...] | None = field(default=None, repr=False)
    _inv: tuple[int, ...] | None = field(default=None, repr=False)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and other.q == self.q

    def __hash__(self):
        return hash(("GF", self.q))

    @property
    def elements(self) -> range:
        return range(self.q)

    @property
    def has_tables(self) -> bool:
        return self._mul is not None

    def add(self, a: int, b: int) -> int:
        if self._add is not None:
            return self._add[a][b]
        return (a + b) % self.q

    def neg(self, a: int) -> int:
        if self._neg is not None:
            return self._neg[a]
        return -a % self.q

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self._mul is not None:
            return self._mul[a][b]
        return a * b % self.q

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.q})")
        if self._inv is not None:
            return self._inv[a]
        return pow(a, -1, self.q)

    def check(self, a: int) -> int:
        if not isinstance(a, int) or not 0 <= a < self.q:
            raise ValueError(f"{a!r} is not an element code of GF({self.q})")
        return a


def _digits(code: int, p: int, d: int) -> list[int]:
    out = []
    for _ in range(d):
        code, c = divmod(code, p)
        out.append(c)
    return out


def _code(digits, p: int) -> int:
    code = 0
    for c in reversed(digits):
        code = code * p + c
    return code


def _poly_mul_mod(a: list[int], b: list[int], modulus, p: int) -> list[int]:
    d = len(modulus) - 1
    prod = [0] * (2 * d - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    # modulus is monic: x^d = -(lower terms)
    for k in range(len(prod) - 1, d - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for i in range(d):
                prod[k - d + i] = (prod[k - d + i] - c * modulus[i]) % p
    return prod[:d]


def _build_tables(q: int, p: int, d: int, modulus):
    digits = [_digits(c, p, d) for c in range(q)]
    add = tuple(
        tuple(_code([(x + y) % p for x, y in zip(digits[a], digits[b])], p) for b in range(q))
        for a in range(q)
    )
    mul = tuple(
        tuple(_code(_poly_mul_mod(digits[a], digits[b], modulus, p), p) for b in range(q))
        for a in range(q)
    )
    neg = tuple(_code([-x % p for x in digits[a]], p) for a in range(q))
    inv = [0] * q
    for a in range(1, q):
        for b in range(1, q):
            if mul[a][b] == 1:
                inv[a] = b
                break
    return add, mul, neg, tuple(inv)


@lru_cache(maxsize=None)
def make_field(q: int) -> FieldSpec:
    """Return GF(q).  Prime ``q`` of any size and prime powers of degree <= 3 are supported."""
    if not isinstance(q, int) or q < 2:
        raise ValueError(f"field order must be an integer >= 2, got {q!r}")
    factors = factorize(q)
    if len(factors) != 1:
        shown = " * ".join(f"{b}^{e}" if e > 1 else str(b) for b, e in sorted(factors.items()))
        raise ValueError(f"{q} is not a prime power: {q} = {shown}")
    (p, d), = factors.items()
    if d == 1:
        modulus = (0, 1)
    else:
        if d > MAX_DEGREE or q > MAX_EXTENSION_ORDER:
            raise ValueError(
                f"GF({q}) = GF({p}^{d}) is not supported: extension fields need degree <= "
                f"{MAX_DEGREE} and order <= {MAX_EXTENSION_ORDER}"
            )
        modulus = BUILTIN_MODULI.get(q) or find_irreducible(p, d)
        if not is_irreducible(modulus, p):
            raise AssertionError(f"modulus {modulus} is reducible over GF({p})")
    if d > 1 or q <= TABLE_LIMIT:
        add, mul, neg, inv = _build_tables(q, p, d, modulus)
        return FieldSpec(q, p, d, modulus, add, mul, neg, inv)
    return FieldSpec(q, p, d, modulus)
