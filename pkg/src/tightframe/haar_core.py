"""Dyadic step functions, the Haar bases L and K, and the matrix alpha.

Exact values live in the ring Z[sqrt 2] restricted to single terms
m * 2**(e/2), which is enough for every Haar atom and every alpha entry.
"""
from functools import lru_cache
from typing import NamedTuple

import numpy as np


class ExactDyadicValue:
    """mantissa * 2**(half_exponent / 2), kept in canonical form."""

    __slots__ = ("mantissa", "half_exponent")

    def __init__(self, mantissa=0, half_exponent=0):
        mantissa = int(mantissa)
        half_exponent = int(half_exponent)
        if mantissa == 0:
            half_exponent = 0
        else:
            while mantissa % 2 == 0:
                mantissa //= 2
                half_exponent += 2
        self.mantissa = mantissa
        self.half_exponent = half_exponent

    @staticmethod
    def coerce(x):
        if isinstance(x, ExactDyadicValue):
            return x
        if isinstance(x, (int, np.integer)):
            return ExactDyadicValue(int(x), 0)
        raise TypeError("cannot make an exact dyadic value from %r" % (x,))

    def is_zero(self):
        return self.mantissa == 0

    def __add__(self, other):
        try:
            other = ExactDyadicValue.coerce(other)
        except TypeError:
            return NotImplemented
        if other.mantissa == 0:
            return self
        if self.mantissa == 0:
            return other
        e1, e2 = self.half_exponent, other.half_exponent
        if (e1 - e2) % 2:
            raise ArithmeticError("sum of values with different sqrt(2) parity")
        e = min(e1, e2)
        m = (self.mantissa << ((e1 - e) // 2)) + (other.mantissa << ((e2 - e) // 2))
        return ExactDyadicValue(m, e)

    __radd__ = __add__

    def __neg__(self):
        return ExactDyadicValue(-self.mantissa, self.half_exponent)

    def __sub__(self, other):
        return self + (-ExactDyadicValue.coerce(other))

    def __rsub__(self, other):
        return ExactDyadicValue.coerce(other) + (-self)

    def __mul__(self, other):
        try:
            other = ExactDyadicValue.coerce(other)
        except TypeError:
            return NotImplemented
        return ExactDyadicValue(self.mantissa * other.mantissa,
                                self.half_exponent + other.half_exponent)

    __rmul__ = __mul__

    def conjugate(self):
        return self

    def __eq__(self, other):
        try:
            other = ExactDyadicValue.coerce(other)
        except TypeError:
            return NotImplemented
        return (self.mantissa == other.mantissa
                and self.half_exponent == other.half_exponent)

    def __hash__(self):
        return hash((self.mantissa, self.half_exponent))

    def __float__(self):
        return self.mantissa * 2.0 ** (self.half_exponent / 2)

    def __complex__(self):
        return complex(float(self))

    def __repr__(self):
        return "ExactDyadicValue(%d, %d)" % (self.mantissa, self.half_exponent)


ZERO = ExactDyadicValue(0)
ONE = ExactDyadicValue(1)


def sqrt2_power(e, sign=1):
    """sign * 2**(e/2)."""
    return ExactDyadicValue(sign, e)


def index_msb(i):
    """Split i >= 1 as 2**p + t with 0 <= t < 2**p."""
    if i < 1:
        raise ValueError("index must be positive, got %r" % (i,))
    p = int(i).bit_length() - 1
    return p, i - (1 << p)


class HaarIndexL(NamedTuple):
    i: int
    n: int

    @property
    def pq(self):
        return index_msb(self.i) if self.i else None


class HaarIndexK(NamedTuple):
    s: int
    j: int
    m: int

    @property
    def pq(self):
        return index_msb(self.j) if self.j else None


class DyadicStep:
    """Piecewise constant function on the cells [k 2**-J, (k+1) 2**-J).

    values is either a tuple of exact values or a complex numpy array.
    """

    __slots__ = ("level", "origin", "values")

    def __init__(self, level, origin, values):
        if level < 0:
            raise ValueError("level must be non-negative")
        self.level = int(level)
        self.origin = int(origin)
        if isinstance(values, np.ndarray):
            self.values = np.asarray(values, dtype=complex)
        else:
            self.values = tuple(values)

    @property
    def exact(self):
        return not isinstance(self.values, np.ndarray)

    def __len__(self):
        return len(self.values)

    @property
    def support(self):
        """(left, right) as floats."""
        h = 2.0 ** -self.level
        return self.origin * h, (self.origin + len(self)) * h

    def numeric(self):
        if self.exact:
            return DyadicStep(self.level, self.origin,
                              np.array([complex(v) for v in self.values]))
        return self

    def refine(self, J):
        if J < self.level:
            raise ValueError("cannot coarsen a step function")
        k = 1 << (J - self.level)
        if self.exact:
            vals = tuple(v for v in self.values for _ in range(k))
        else:
            vals = np.repeat(self.values, k)
        return DyadicStep(J, self.origin * k, vals)

    def on_window(self, J, lo, hi):
        """Cell values at level J on absolute cells lo..hi-1 (numeric)."""
        g = self.numeric().refine(max(J, self.level))
        out = np.zeros(hi - lo, dtype=complex)
        a, b = max(lo, g.origin), min(hi, g.origin + len(g))
        if a < b:
            out[a - lo:b - lo] = g.values[a - g.origin:b - g.origin]
        return out

    def __eq__(self, other):
        if not isinstance(other, DyadicStep):
            return NotImplemented
        J = max(self.level, other.level)
        a, b = self.refine(J), other.refine(J)
        lo = min(a.origin, b.origin)
        hi = max(a.origin + len(a), b.origin + len(b))

        def cell(f, k):
            if f.origin <= k < f.origin + len(f):
                return f.values[k - f.origin]
            return 0
        return all(cell(a, k) == cell(b, k) for k in range(lo, hi))

    __hash__ = None

    def __repr__(self):
        return "DyadicStep(level=%d, origin=%d, n=%d)" % (self.level, self.origin, len(self))


def _atom(level, position, kind, J):
    """phi or psi at (level, position), exactly, on mesh 2**-J."""
    amp = sqrt2_power(level)
    if kind == "phi":
        native = max(level, 0)
        width = 1 << (native - level)
        cells = (amp,) * width
        origin = position * width
    else:
        native = max(level + 1, 0)
        half = 1 << (native - level - 1)
        cells = (amp,) * half + (-amp,) * half
        origin = position * 2 * half
    if J is None:
        J = native
    if J < native:
        raise ValueError("mesh level %d cannot resolve an atom needing level %d" % (J, native))
    return DyadicStep(native, origin, cells).refine(J)


def haar_L(i, n, J=None):
    """L_i^(n): phi(x - n) for i = 0, psi_{p, q + 2**p n} for i = 2**p + q."""
    if i == 0:
        return _atom(0, n, "phi", J)
    p, q = index_msb(i)
    return _atom(p, q + (n << p), "psi", J)


def haar_K(s, j, m, J=None):
    """K_{s,j}^(m), the dilates of the atoms living on [1,2) or [-2,-1)."""
    if s not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if j == 0:
        return _atom(m, 1 if s > 0 else -2, "phi", J)
    p, q = index_msb(j)
    pos = (1 << p) + q if s > 0 else -(1 << (p + 1)) + q
    return _atom(p + m, pos, "psi", J)


def step_inner(f, g):
    """Integral of f * conj(g), exact for exact inputs."""
    exact = f.exact and g.exact
    if not exact:
        f, g = f.numeric(), g.numeric()
    if f.level <= g.level:
        coarse, fine, fine_is_g = f, g, True
    else:
        coarse, fine, fine_is_g = g, f, False
    shift = fine.level - coarse.level
    f_lo, f_hi = fine.origin, fine.origin + len(fine)
    a_lo = max(coarse.origin, f_lo >> shift)
    a_hi = min(coarse.origin + len(coarse), -((-f_hi) >> shift))
    if a_lo >= a_hi:
        return ZERO if exact else 0j
    if exact:
        total = ZERO
        for a in range(a_lo, a_hi):
            lo = max(a << shift, f_lo) - f_lo
            hi = min((a + 1) << shift, f_hi) - f_lo
            block = sum(fine.values[lo:hi], ZERO)
            total = total + coarse.values[a - coarse.origin] * block
        return total * sqrt2_power(-2 * fine.level)
    csum = np.concatenate([[0], np.cumsum(fine.values)])
    a = np.arange(a_lo, a_hi)
    lo = np.maximum(a << shift, f_lo) - f_lo
    hi = np.minimum((a + 1) << shift, f_hi) - f_lo
    blocks = csum[hi] - csum[lo]
    cv = coarse.values[a - coarse.origin]
    if fine_is_g:
        val = np.sum(cv * np.conj(blocks))
    else:
        val = np.sum(blocks * np.conj(cv))
    return complex(val) * 2.0 ** -fine.level


def alpha(i, n, s, j, m):
    """<L_i^(n), K_{s,j}^(m)> from the closed-form case table."""
    if n == 0:
        if s < 0:
            return ZERO
        if i == 0:
            return sqrt2_power(-m) if (j == 0 and m > 0) else ZERO
        r, t = index_msb(i)
        if t == 0:
            if j != 0:
                return ZERO
            if m == r + 1:
                return sqrt2_power(-1, -1)
            if m > r + 1:
                return sqrt2_power(r - m)
            return ZERO
        p, _ = index_msb(t)
        return ONE if (j == t and m == r - p) else ZERO
    if n == 1:
        return ONE if (s > 0 and j == i and m == 0) else ZERO
    if n == -2:
        return ONE if (s < 0 and j == i and m == 0) else ZERO
    if n == -1:
        if s > 0:
            return ZERO
        if i == 0:
            return sqrt2_power(-m) if (j == 0 and m > 0) else ZERO
        if (i + 1) & i == 0:
            # rightmost wavelet at level r: i = 2**(r+1) - 1
            r = (i + 1).bit_length() - 2
            if j != 0:
                return ZERO
            if m == r + 1:
                return sqrt2_power(-1)
            if m > r + 1:
                return sqrt2_power(r - m, -1)
            return ZERO
        r, _ = index_msb(i)
        # i = 2**(r+1) - 2**(p+1) + q with 0 <= q < 2**p
        gap = (1 << (r + 1)) - i
        p = (gap - 1).bit_length() - 1
        q = i - (1 << (r + 1)) + (1 << (p + 1))
        return ONE if (j == (1 << p) + q and m == r - p) else ZERO
    # |n| >= 2 away from the special cells: n = 2**u + v or n = -2**(u+1) + v
    want = 1 if n > 1 else -1
    if s != want:
        return ZERO
    if n > 1:
        u, v = index_msb(n)
    else:
        u = (-n - 1).bit_length() - 1
        v = n + (1 << (u + 1))
    if m != -u:
        return ZERO
    if i > 0:
        r, t = index_msb(i)
        return ONE if j == (((1 << u) + v) << r) + t else ZERO
    if j == 0:
        return sqrt2_power(-u)
    p, rest = index_msb(j)
    if p >= u or rest != v >> (u - p):
        return ZERO
    w = (v >> (u - p - 1)) & 1
    return sqrt2_power(p - u, -1 if w else 1)


@lru_cache(maxsize=None)
def _L_native(i, n):
    return haar_L(i, n)


@lru_cache(maxsize=None)
def _K_native(s, j, m):
    return haar_K(s, j, m)


def alpha_oracle(i, n, s, j, m):
    """alpha by exact integration of the two atoms."""
    return step_inner(_L_native(i, n), _K_native(s, j, m))


def _k_cell(s, j, m):
    """(level, position) of the dyadic cell carrying K_{s,j}^(m)."""
    if j == 0:
        return m, (1 if s > 0 else -2)
    p, q = index_msb(j)
    return p + m, ((1 << p) + q if s > 0 else -(1 << (p + 1)) + q)


def _l_cell(i, n):
    if i == 0:
        return 0, n
    p, q = index_msb(i)
    return p, q + (n << p)


def _k_at(level, pos):
    """The K atoms (s, j, m) whose cell is (level, pos)."""
    if pos >= 1:
        P, Q = index_msb(pos)
        out = [(1, pos, level - P)]
        if pos == 1:
            out.append((1, 0, level))
        return out
    if pos <= -2:
        P = (-pos - 1).bit_length() - 1
        out = [(-1, (1 << P) + pos + (1 << (P + 1)), level - P)]
        if pos == -2:
            out.append((-1, 0, level))
        return out
    return []


def alpha_column(s, j, m, i_max=None):
    """All (i, n, alpha) with alpha_{i,n}^{s,j,m} != 0, found from the nesting
    of supports: a nonzero pairing needs the finer atom to sit in a constant
    piece of the coarser one, or the two atoms to coincide."""
    lam, c = _k_cell(s, j, m)
    cands = []
    if lam < 0:
        width = 1 << -lam
        cands = [(0, n) for n in range(c * width, (c + 1) * width)]
    else:
        n = c >> lam
        off = c - (n << lam)
        cands = [(0, n)]
        top = lam + 1 if j else lam
        cands += [((1 << r) + (off >> (lam - r)), n) for r in range(top)]
    out = []
    for i, n in cands:
        if i_max is not None and i >= i_max:
            continue
        a = alpha(i, n, s, j, m)
        if not a.is_zero():
            out.append((i, n, a))
    return out


def alpha_row(i, n, m_max):
    """Nonzero (s, j, m, alpha) of row (i, n) with m <= m_max, and the
    squared mass of the omitted entries m > m_max.

    Rows whose L cell touches 0 from either side pair with the infinite
    chain of fine scaling atoms K_{s,0}^(m); the omitted mass is geometric.
    """
    lam, c = _l_cell(i, n)
    out = []
    if c in (0, -1):
        s = 1 if c == 0 else -1
        first = lam + 1
        for m in range(first, m_max + 1):
            out.append((s, 0, m, alpha(i, n, s, 0, m)))
        tail = 2.0 ** (lam - max(m_max, lam)) if i else 2.0 ** -max(m_max, 0)
        return out, tail
    level, pos = lam, c
    while pos not in (0, -1):
        for s, j, m in _k_at(level, pos):
            if m > m_max:
                continue
            a = alpha(i, n, s, j, m)
            if not a.is_zero():
                out.append((s, j, m, a))
        level, pos = level - 1, pos >> 1
    return out, 0.0
