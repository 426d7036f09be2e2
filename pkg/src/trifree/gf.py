"""Arithmetic in GF(q) for q prime or q = 2^k with 1 <= k <= 16.

Elements are canonical integers in [0, q).  Prime fields use residues mod p.
Binary extension fields use bit-packed polynomials over GF(2) reduced modulo
the lexicographically smallest irreducible polynomial of the right degree,
so the representation is identical across implementations.  Multiplication
and inversion in extension fields go through log/exp tables built once per
field from a fixed generator search.
"""

from __future__ import annotations

import numpy as np

from .errors import UnsupportedOrder

MAX_BINARY_DEGREE = 16


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _poly_mod(a: int, m: int) -> int:
    """Remainder of bit-packed GF(2) polynomial a modulo m."""
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def _poly_mulmod(a: int, b: int, m: int) -> int:
    """Carry-less product of a and b, reduced modulo m."""
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        b >>= 1
        a <<= 1
    return _poly_mod(acc, m)


def _is_irreducible(m: int) -> bool:
    """Trial division by every polynomial of degree 1..deg(m)//2."""
    deg = m.bit_length() - 1
    for d in range(1, deg // 2 + 1):
        for divisor in range(1 << d, 1 << (d + 1)):
            if _poly_mod(m, divisor) == 0:
                return False
    return True


def smallest_irreducible(k: int) -> int:
    """Lexicographically smallest irreducible degree-k polynomial over GF(2).

    Candidates of fixed degree k, compared coefficient-by-coefficient from
    the leading term down, order exactly like their bit encodings.
    """
    for m in range(1 << k, 1 << (k + 1)):
        if _is_irreducible(m):
            return m
    raise AssertionError("no irreducible polynomial of degree %d" % k)


class GF:
    """A finite field of order q, with scalar and numpy-vector arithmetic.

    Attributes:
        q: field order.
        characteristic: p, the additive order of 1.
        degree: k with q = p^k.
        modulus: bit-packed reduction polynomial for p = 2 and k > 1,
            otherwise None.
    """

    def __init__(self, q: int):
        if q < 2:
            raise UnsupportedOrder("field order must be at least 2, got %r" % q)
        if _is_prime(q):
            self.q = q
            self.characteristic = q
            self.degree = 1
            self.modulus = None
        elif q & (q - 1) == 0:
            k = q.bit_length() - 1
            if k > MAX_BINARY_DEGREE:
                raise UnsupportedOrder(
                    "binary field degree %d exceeds %d" % (k, MAX_BINARY_DEGREE)
                )
            self.q = q
            self.characteristic = 2
            self.degree = k
            self.modulus = smallest_irreducible(k)
        else:
            raise UnsupportedOrder(
                "order %d is neither prime nor a power of two" % q
            )
        self._binary = self.characteristic == 2 and self.degree > 1
        if self._binary:
            self._build_tables()

    # -- table construction (binary fields only) --

    def _build_tables(self):
        q, m = self.q, self.modulus
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        for g in range(2, q):
            x = 1
            ok = True
            for e in range(q - 1):
                exp[e] = x
                x = _poly_mulmod(x, g, m)
                if x == 1 and e != q - 2:
                    ok = False
                    break
            if ok and x == 1:
                break
        else:
            raise AssertionError("no generator found for GF(%d)" % q)
        exp[q - 1 :] = exp[: q - 1]
        log[exp[: q - 1]] = np.arange(q - 1)
        self._exp = exp
        self._log = log

    # -- scalar operations --

    def add(self, a: int, b: int) -> int:
        if self.characteristic == 2:
            return a ^ b
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        if self.characteristic == 2:
            return self.add(a, b)
        return (a - b) % self.q

    def neg(self, a: int) -> int:
        if self.characteristic == 2:
            return a
        return (-a) % self.q

    def mul(self, a: int, b: int) -> int:
        if not self._binary:
            return (a * b) % self.q
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(%d)" % self.q)
        if not self._binary:
            return pow(a, -1, self.q)
        # a^(q-2) via the log table: exp[(q-1) - log a].
        return int(self._exp[self.q - 1 - self._log[a]])

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if not self._binary:
            return pow(a, e, self.q)
        if a == 0:
            return 0 if e else 1
        return int(self._exp[(self._log[a] * e) % (self.q - 1)])

    def elements(self):
        return range(self.q)

    # -- vector operations on integer numpy arrays --

    def add_arr(self, a, b):
        if self.characteristic == 2:
            return np.bitwise_xor(a, b)
        return (np.asarray(a, dtype=np.int64) + b) % self.q

    def sub_arr(self, a, b):
        if self.characteristic == 2:
            return np.bitwise_xor(a, b)
        return (np.asarray(a, dtype=np.int64) - b) % self.q

    def mul_arr(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if not self._binary:
            return (a * b) % self.q
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv_arr(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of 0 in GF(%d)" % self.q)
        if not self._binary:
            return np.array([pow(int(x), -1, self.q) for x in a.ravel()],
                            dtype=np.int64).reshape(a.shape)
        return self._exp[self.q - 1 - self._log[a]]

    def __repr__(self):
        if self.modulus is None:
            return "GF(%d)" % self.q
        return "GF(%d, modulus=0b%s)" % (self.q, bin(self.modulus)[2:])

    def __eq__(self, other):
        return isinstance(other, GF) and other.q == self.q

    def __hash__(self):
        return hash(("GF", self.q))
