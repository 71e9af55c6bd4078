"""The scalars C_l, the Haar coefficient vectors Psi_i and the generators."""
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from .haar_core import DyadicStep, index_msb
from .hardy_inner import CoeffSeq, cinner, taylor_coeffs


class BranchAddress(NamedTuple):
    kind: str  # "zero", "pow2" or "branch"
    l: int = 0
    k: int = 0


def psi_address(i):
    """Place i in the Taylor expansion of h_0 (i = 2**k) or h_l (i = 2**(p+k+1) + l)."""
    if i == 0:
        return BranchAddress("zero")
    r, t = index_msb(i)
    if t == 0:
        return BranchAddress("pow2", 0, r)
    p, _ = index_msb(t)
    return BranchAddress("branch", t, r - p - 1)


def address_index(addr):
    if addr.kind == "zero":
        return 0
    if addr.kind == "pow2":
        return 1 << addr.k
    p, _ = index_msb(addr.l)
    return (1 << (p + addr.k + 1)) + addr.l


def branch_index(l, k):
    """Index of the k-th Taylor coefficient of h_l."""
    if l == 0:
        return 1 << k
    p = l.bit_length() - 1
    return (1 << (p + k + 1)) + l


def prefix_index(l, k):
    """The truncated index 2**(p+k) + (low p+k bits of l), for -p <= k <= 0."""
    p = l.bit_length() - 1
    w = p + k
    return (1 << w) + (l & ((1 << w) - 1))


def top_bits(l, k):
    """Bits p+k..p of l, the quantity compared by the cross-branch delta."""
    p = l.bit_length() - 1
    return l >> (p + k)


def _c_bases(a0, a1, B, B0, C1, P):
    """C_{2^k} and C_{2^k+1} for 1 <= k <= P (index 0 unused)."""
    x0 = a0.coeff(0)
    c2 = np.zeros(P + 1, dtype=complex)
    c21 = np.zeros(P + 1, dtype=complex)
    for k in range(1, P + 1):
        c2[k] = -(B / np.conj(C1)) * cinner(a0.coeff(k), x0)
        c21[k] = -(C1 * np.conj(B0) / np.conj(C1)) * cinner(a1.coeff(k - 1), x0)
    return c2, c21


def c1_value(a0, B, arg_c1):
    return complex(np.sqrt(max(B * (1 - float(np.sum(np.abs(a0.coeff(0)) ** 2))), 0.0))
                   * np.exp(1j * arg_c1))


def clg(l, C1, c2, c21):
    """C_l from the binary expansion l = 2**p + 2**p1 + ... + 2**ps."""
    bits = [b for b in range(l.bit_length() - 1, -1, -1) if (l >> b) & 1]
    if len(bits) == 1:
        return C1 if l == 1 else c2[bits[0]]
    s = len(bits) - 1
    if bits[-1] == 0:
        # odd: s factors C_{2^d+1}, the last one for the lowest nonzero gap
        prod = 1
        for a, b in zip(bits[:-1], bits[1:-1]):
            prod *= c21[a - b]
        prod *= c21[bits[-2]]
        return prod / C1 ** (s - 1)
    prod = 1
    for a, b in zip(bits[:-1], bits[1:]):
        prod *= c21[a - b]
    return prod * c2[bits[-1]] / C1 ** s


def c_sequence(a0, a1, B, arg_b0=0.0, arg_c1=0.0, L_max=4096):
    """Sparse map l -> C_l (nonzero entries only) for 1 <= l <= L_max."""
    B0 = np.sqrt(B) * np.exp(1j * arg_b0)
    C1 = c1_value(a0, B, arg_c1)
    if a1.norm2() == 0:
        return {}
    if C1 == 0:
        raise ValueError("|C1| = 0 with a nontrivial second column")
    P = max(L_max, 2).bit_length()
    c2, c21 = _c_bases(a0, a1, B, B0, C1, P)
    out = {}
    for l in range(1, L_max + 1):
        c = clg(l, C1, c2, c21)
        if c != 0:
            out[l] = complex(c)
    return out


def c_array(a0, a1, B, arg_b0=0.0, arg_c1=0.0, L=4096):
    """Dense C_l for 0 <= l < L through C_l = C_{2^(p-p1)+1} C_{l1} / C1."""
    B0 = np.sqrt(B) * np.exp(1j * arg_b0)
    C1 = c1_value(a0, B, arg_c1)
    C = np.zeros(max(L, 2), dtype=complex)
    if a1.norm2() == 0:
        return C[:L]
    P = max(L, 2).bit_length()
    c2, c21 = _c_bases(a0, a1, B, B0, C1, P)
    C[1] = C1
    for p in range(1, P + 1):
        lo = 1 << p
        if lo >= L:
            break
        hi = min(lo << 1, L)
        C[lo] = c2[p]
        if lo + 1 < hi:
            C[lo + 1] = c21[p]
        l1 = np.arange(2, hi - lo)
        if len(l1):
            p1 = np.floor(np.log2(l1)).astype(int)
            C[lo + 2:hi] = c21[p - p1] * C[l1] / C1
    return C[:L]


@dataclass(frozen=True)
class FrameCoeffs:
    """Psi_i for i < I_max plus the data that continues it beyond I_max."""

    r: int
    B: float
    B0: complex
    C: dict
    psi: np.ndarray
    a0: Optional[CoeffSeq] = None
    a1: Optional[CoeffSeq] = None
    arg_c1: float = 0.0

    @property
    def I_max(self):
        return len(self.psi)

    @property
    def has_source(self):
        return self.a0 is not None

    def c_of(self, l):
        if l in self.C:
            return self.C[l]
        if not self.has_source or l <= max(self.C, default=0):
            return 0j
        C1 = self.C.get(1, 0j)
        if C1 == 0:
            return 0j
        P = l.bit_length()
        c2, c21 = _c_bases(self.a0, self.a1, self.B, self.B0, C1, P)
        return complex(clg(l, C1, c2, c21))

    def psi_at(self, i):
        if i < self.I_max:
            return self.psi[i]
        if not self.has_source:
            return np.zeros(self.r, dtype=complex)
        addr = psi_address(i)
        if addr.kind == "pow2":
            return self.B0 * self.a0.coeff(addr.k)
        return self.c_of(addr.l) * self.a1.coeff(addr.k)

    def branch(self, l):
        """h_l as a CoeffSeq: stored Psi where available, the source beyond."""
        k_in = 0
        while branch_index(l, k_in) < self.I_max:
            k_in += 1
        rows = [self.psi[branch_index(l, k)] for k in range(k_in)]
        if not self.has_source:
            if not rows:
                return CoeffSeq([], r=self.r)
            return CoeffSeq(rows, r=self.r)
        src, scale = (self.a0, self.B0) if l == 0 else (self.a1, self.c_of(l))
        if scale == 0 or src.norm2() == 0:
            return CoeffSeq(rows, r=self.r) if rows else CoeffSeq([], r=self.r)
        K = max(k_in, src.K)
        rows += [scale * src.coeff(k) for k in range(k_in, K + 1)]
        return CoeffSeq(rows, src.ratio if src.has_tail else None, r=self.r)

    def with_psi(self, i, value):
        psi = self.psi.copy()
        psi[i] = value
        return replace(self, psi=psi)


def assemble(a0, a1, C, B0, I_max=4096, arg_c1=0.0):
    """Psi_{2^k} = B0 a0_k, Psi at Branch(l, k) = C_l a1_k, Psi_0 = 0."""
    if I_max < 2 or I_max & (I_max - 1):
        raise ValueError("I_max must be a power of two")
    r = a0.r
    psi = np.zeros((I_max, r), dtype=complex)
    k = 0
    while (1 << k) < I_max:
        psi[1 << k] = B0 * a0.coeff(k)
        k += 1
    if isinstance(C, dict):
        items = C.items()
    else:
        items = ((l, c) for l, c in enumerate(C) if l and c != 0)
    rows = a1.block(0, I_max.bit_length())
    for l, c in items:
        if l >= I_max // 2:
            continue
        p = l.bit_length() - 1
        k = 0
        while (1 << (p + k + 1)) + l < I_max:
            psi[(1 << (p + k + 1)) + l] = c * rows[k]
            k += 1
    if isinstance(C, dict):
        Cmap = {l: c for l, c in C.items() if l < I_max}
    else:
        Cmap = {l: complex(c) for l, c in enumerate(C) if l and c != 0 and l < I_max}
    return FrameCoeffs(r, float(abs(B0) ** 2), complex(B0), Cmap, psi, a0, a1, arg_c1)


def build_frame(spec, K=64, I_max=4096):
    """InnerSpec -> FrameCoeffs with default truncations."""
    a0, a1 = taylor_coeffs(spec, K)
    arg_b0 = float(np.angle(spec.B0))
    if I_max > 1 << 14:
        C = c_array(a0, a1, spec.B, arg_b0, spec.arg_c1, I_max)
    else:
        C = c_sequence(a0, a1, spec.B, arg_b0, spec.arg_c1, I_max - 1)
    return assemble(a0, a1, C, spec.B0, I_max, spec.arg_c1)


def from_psi(psi, B):
    """FrameCoeffs from raw coefficient vectors, with nothing beyond them."""
    psi = np.array(psi, dtype=complex)
    if psi.ndim == 1:
        psi = psi.reshape(-1, 1)
    n = 1
    while n < len(psi):
        n <<= 1
    full = np.zeros((max(n, 2), psi.shape[1]), dtype=complex)
    full[:len(psi)] = psi
    return FrameCoeffs(psi.shape[1], float(B), complex(np.sqrt(B)), {}, full)


def synthesize(fc, J):
    """psi_j = sum_{i < 2^J} Psi_i[j] L_i^(0) on the mesh 2**-J."""
    top = fc.psi[(1 << J):]
    if len(top) and np.any(top != 0):
        raise ValueError("level %d does not resolve the stored coefficients" % J)
    n = 1 << J
    out = []
    for j in range(fc.r):
        col = np.zeros(n, dtype=complex)
        col += fc.psi[0, j] if fc.I_max else 0
        for p in range(J):
            lo, hi = 1 << p, min(2 << p, fc.I_max)
            if lo >= fc.I_max:
                break
            c = np.zeros(1 << p, dtype=complex)
            c[:hi - lo] = fc.psi[lo:hi, j]
            halves = np.stack([c, -c], axis=1).ravel() * 2.0 ** (p / 2)
            col += np.repeat(halves, 1 << (J - p - 1))
        out.append(DyadicStep(J, 0, col))
    return out


def _tail_sq(seq, k0, j):
    """sum_{k >= k0} |seq_k[j]|**2 in closed form."""
    if k0 <= seq.K:
        head = float(np.sum(np.abs(seq.coeffs[k0:, j]) ** 2))
        start = seq.K + 1
    else:
        head = 0.0
        start = k0
    if not seq.has_tail:
        return head
    q = abs(seq.ratio) ** 2
    return head + abs(seq.coeffs[-1, j]) ** 2 * q ** (start - seq.K) / (1 - q)


def _level_masses(fc, P_max=20000, rel=1e-22):
    """S_p = sum of |C_t|**2 over msb(t) = p, until negligible."""
    C1 = fc.C.get(1, 0j)
    if C1 == 0:
        return np.zeros(0)
    B0 = fc.B0
    x0 = fc.a0.coeff(0)
    c2 = lambda k: -(fc.B / np.conj(C1)) * cinner(fc.a0.coeff(k), x0)
    c21 = lambda k: -(C1 * np.conj(B0) / np.conj(C1)) * cinner(fc.a1.coeff(k - 1), x0)
    S = [abs(C1) ** 2]
    d = [0.0]
    total = S[0]
    quiet = 0
    for p in range(1, P_max):
        d.append(abs(c21(p)) ** 2 / abs(C1) ** 2)
        conv = float(np.dot(np.array(d[p - 1:0:-1]), np.array(S[1:p]))) if p > 1 else 0.0
        sp = abs(c2(p)) ** 2 + abs(c21(p)) ** 2 + conv
        S.append(sp)
        total += sp
        quiet = quiet + 1 if sp <= rel * total else 0
        if quiet >= 8:
            break
    return np.array(S)


def tail_energy(fc, I_max=None):
    """Per-generator sum_{i >= I_max} |Psi_i[j]|**2, with the part beyond the
    stored coefficients summed over all branches in closed form."""
    if I_max is None:
        I_max = fc.I_max
    if I_max & (I_max - 1):
        raise ValueError("I_max must be a power of two")
    stored = np.sum(np.abs(fc.psi[I_max:]) ** 2, axis=0) if I_max < fc.I_max else np.zeros(fc.r)
    if not fc.has_source:
        return stored
    N = max(I_max, fc.I_max).bit_length() - 1
    out = np.array(stored, dtype=float)
    S = _level_masses(fc)
    for j in range(fc.r):
        out[j] += abs(fc.B0) ** 2 * _tail_sq(fc.a0, N, j)
        for p, sp in enumerate(S):
            out[j] += sp * _tail_sq(fc.a1, max(N - p - 1, 0), j)
    return out


def reflect(f):
    """x -> f(1 - x) for f supported in [0, 1]."""
    n = 1 << f.level
    if f.origin < 0 or f.origin + len(f) > n:
        raise ValueError("support must lie in [0,1]")
    full = f.on_window(f.level, 0, n)
    return DyadicStep(f.level, 0, full[::-1].copy())


def l2_distance(f, g):
    J = max(f.level, g.level)
    lo = min(f.origin << (J - f.level), g.origin << (J - g.level))
    hi = max((f.origin + len(f)) << (J - f.level), (g.origin + len(g)) << (J - g.level))
    d = f.on_window(J, lo, hi) - g.on_window(J, lo, hi)
    return float(np.sqrt(np.sum(np.abs(d) ** 2) * 2.0 ** -J))
