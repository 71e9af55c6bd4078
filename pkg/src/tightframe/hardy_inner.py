"""Taylor coefficient sequences in C^r, the H+ inner product and the five
families of M+-inner 2x2 matrix functions."""
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .report import ConditionReport


def cinner(x, y):
    """<x, y> in C^r, linear in x."""
    return complex(np.vdot(y, x))


class CoeffSeq:
    """a_0, ..., a_K in C^r, optionally continued by a_k = ratio**(k-K) a_K."""

    __slots__ = ("coeffs", "ratio", "_tail")

    def __init__(self, coeffs, ratio=None, r=None):
        arr = np.array(coeffs, dtype=complex)
        if arr.size == 0:
            arr = arr.reshape(0, r or 2)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1) if r == 1 else arr.reshape(1, -1)
        if ratio is not None:
            ratio = complex(ratio)
            if not abs(ratio) < 1:
                raise ValueError("tail ratio must have modulus < 1, got %r" % (ratio,))
            if len(arr) == 0:
                raise ValueError("a tail needs at least one coefficient")
        self.coeffs = arr
        self.ratio = ratio
        self._tail = bool(ratio is not None and ratio != 0 and len(arr) and np.any(arr[-1] != 0))

    @property
    def r(self):
        return self.coeffs.shape[1]

    @property
    def K(self):
        return len(self.coeffs) - 1

    @property
    def has_tail(self):
        return self._tail

    def coeff(self, k):
        if k < 0:
            return np.zeros(self.r, dtype=complex)
        if k <= self.K:
            return self.coeffs[k]
        if self.has_tail:
            return self.coeffs[-1] * self.ratio ** (k - self.K)
        return np.zeros(self.r, dtype=complex)

    def block(self, start, count):
        """Rows start..start+count-1 as an array."""
        count = max(count, 0)
        out = np.zeros((count, self.r), dtype=complex)
        lo, hi = max(start, 0), min(start + count, self.K + 1)
        if lo < hi:
            out[lo - start:hi - start] = self.coeffs[lo:hi]
        if self.has_tail and start + count > self.K + 1:
            t0 = max(start, self.K + 1)
            pw = self.ratio ** np.arange(t0 - self.K, start + count - self.K)
            out[t0 - start:] = pw[:, None] * self.coeffs[-1]
        return out

    def support_end(self):
        """One past the last explicitly nonzero index (inf with a tail)."""
        if self.has_tail:
            return np.inf
        nz = np.nonzero(np.any(self.coeffs != 0, axis=1))[0]
        return int(nz[-1]) + 1 if len(nz) else 0

    def norm2(self):
        total = float(np.sum(np.abs(self.coeffs) ** 2))
        if self.has_tail:
            q = abs(self.ratio) ** 2
            total += float(np.sum(np.abs(self.coeffs[-1]) ** 2)) * q / (1 - q)
        return total

    def scaled(self, c):
        return CoeffSeq(self.coeffs * c, self.ratio, r=self.r)

    def extended(self, K):
        """Same sequence with at least K+1 explicit coefficients."""
        if K <= self.K:
            return self
        return CoeffSeq(self.block(0, K + 1), self.ratio, r=self.r)

    def evaluate(self, omega):
        """Boundary value sum_k a_k omega**k with the tail summed in closed form."""
        omega = complex(omega)
        powers = omega ** np.arange(len(self.coeffs))
        val = powers @ self.coeffs
        if self.has_tail:
            z = self.ratio * omega
            val = val + self.coeffs[-1] * omega ** self.K * z / (1 - z)
        return val

    def __repr__(self):
        return "CoeffSeq(K=%d, r=%d, ratio=%r)" % (self.K, self.r, self.ratio)


def combine(pairs):
    """sum_i c_i f_i for [(c_i, f_i)]; tails must share one ratio."""
    ratios = {f.ratio for c, f in pairs if c != 0 and f.has_tail}
    if len(ratios) > 1:
        raise ValueError("cannot combine geometric tails with different ratios")
    ratio = ratios.pop() if ratios else None
    K = max(f.K for c, f in pairs)
    r = pairs[0][1].r
    acc = None
    for c, f in pairs:
        if c == 0:
            continue
        term = f.block(0, K + 1) * c if c != 1 else f.block(0, K + 1)
        acc = term if acc is None else acc + term
    if acc is None:
        acc = np.zeros((K + 1, r), dtype=complex)
    if ratio is None:
        nz = np.nonzero(np.any(acc != 0, axis=1))[0]
        return CoeffSeq(acc[:nz[-1] + 1 if len(nz) else 0], r=r)
    return CoeffSeq(acc, ratio, r=r)


def series_inner(f, f_start, g, g_start):
    """sum_{t>=0} <f_{f_start+t}, g_{g_start+t}>, tails summed in closed form."""
    if f.r != g.r:
        raise ValueError("dimension mismatch: %d vs %d" % (f.r, g.r))
    ends = []
    if not f.has_tail:
        ends.append(f.support_end() - f_start)
    if not g.has_tail:
        ends.append(g.support_end() - g_start)
    if ends:
        n = int(max(min(ends), 0))
        return complex(np.sum(f.block(f_start, n) * np.conj(g.block(g_start, n))))
    n = max(f.K - f_start, g.K - g_start, 0) + 1
    head = np.sum(f.block(f_start, n) * np.conj(g.block(g_start, n)))
    nxt = cinner(f.coeff(f_start + n), g.coeff(g_start + n))
    return complex(head + nxt / (1 - f.ratio * np.conj(g.ratio)))


def hplus_inner(f, g, m):
    """<f, omega**m g> = sum_{k >= max(0, m)} <f_k, g_{k-m}>."""
    k0 = max(0, m)
    return series_inner(f, k0, g, k0 - m)


@dataclass(frozen=True)
class InnerSpec:
    family: int
    B: float
    B0: complex
    arg_c1: float
    params: dict = field(default_factory=dict)
    derived: dict = field(default_factory=dict)

    @property
    def a00_norm2(self):
        return {1: 1.0, 2: 0.0}.get(self.family) if self.family < 3 else (
            self.params["rho"] ** 2 if self.family < 5 else abs(self.params["rho0"]) ** 2)

    @property
    def C1(self):
        mod = np.sqrt(max(self.B * (1 - self.a00_norm2), 0.0))
        return complex(mod * np.exp(1j * self.arg_c1))


TOL_SPEC = 1e-12


def _unit(name, u):
    u = np.asarray(u, dtype=complex).reshape(-1)
    if u.shape != (2,):
        raise ValueError("%s must be a vector in C^2" % name)
    if abs(np.linalg.norm(u) - 1) > TOL_SPEC:
        raise ValueError("%s must be a unit vector (norm %.3g)" % (name, np.linalg.norm(u)))
    return u


def _orthonormal(u0, u1):
    u0, u1 = _unit("u0", u0), _unit("u1", u1)
    if abs(cinner(u0, u1)) > TOL_SPEC:
        raise ValueError("u0 and u1 must be orthogonal (<u0,u1> = %.3g)" % abs(cinner(u0, u1)))
    return u0, u1


def build_spec(family, params, B=1.0, phases=None):
    """Validate the parameters of one of the five families and resolve the rest."""
    phases = dict(phases or {})
    if not B > 0:
        raise ValueError("frame bound B must be positive")
    B0 = np.sqrt(B) * np.exp(1j * phases.get("arg_b0", 0.0))
    arg_c1 = float(phases.get("arg_c1", 0.0))
    p = dict(params)
    derived = {}
    if family == 1:
        p["u0"] = _unit("u0", p["u0"])
    elif family == 2:
        p["u0"], p["u1"] = _orthonormal(p["u0"], p["u1"])
    elif family in (3, 4):
        p["u0"], p["u1"] = _orthonormal(p["u0"], p["u1"])
        rho = float(p["rho"])
        if not 0 < rho < 1:
            raise ValueError("rho must lie in (0,1), got %r" % rho)
        p["rho"] = rho
        p["theta"] = float(p.get("theta", 0.0))
    elif family == 5:
        derived = _resolve_type5(p, phases)
    else:
        raise ValueError("family must be 1..5, got %r" % (family,))
    return InnerSpec(family, float(B), complex(B0), arg_c1, p, derived)


def _resolve_type5(p, phases):
    rho0 = complex(p["rho0"])
    if not 0 < abs(rho0) < 1:
        raise ValueError("|rho0| must lie in (0,1), got %r" % abs(rho0))
    u0, u1, v = _unit("u0", p["u0"]), _unit("u1", p["u1"]), _unit("v", p["v"])
    p.update(rho0=rho0, u0=u0, u1=u1, v=v)
    vu0, u1u0, vu1 = cinner(v, u0), cinner(u1, u0), cinner(v, u1)
    for name, val in (("<v,u0>", vu0), ("<u1,u0>", u1u0), ("<v,u1>", vu1)):
        if abs(val) <= TOL_SPEC:
            raise ValueError("type5 requires %s != 0" % name)
    kappa = abs(rho0) ** 2 / (1 - abs(rho0) ** 2)
    rhs = -vu1 / (np.conj(u1u0) * vu0)
    if abs(rhs.imag) > 1e-9 * max(1.0, abs(rhs)) or rhs.real <= 0:
        raise ValueError("type5 positivity constraint: right-hand side %.6g%+.6gj is not a positive real"
                         % (rhs.real, rhs.imag))
    res = kappa * np.conj(u1u0) * vu0 + vu1
    if abs(res) > TOL_SPEC:
        raise ValueError("type5 constraint (mixing identity) residual %.2g" % abs(res))
    den = 1 + kappa * abs(vu0) ** 2
    rho1 = np.sqrt((1 - abs(rho0) ** 2) / den) * np.exp(1j * phases.get("arg_rho1", 0.0))
    tau0 = np.sqrt(1 / (1 + kappa * abs(u1u0) ** 2)) * np.exp(1j * phases.get("arg_tau0", 0.0))
    r = -(np.conj(rho0) / np.conj(rho1)) * vu0 / den
    tau1 = tau0 * rho1 * cinner(u1, v) / (rho0 * cinner(u0, v))
    if not abs(r) < 1:
        raise ValueError("type5 ratio |r| = %.3g is not < 1" % abs(r))
    return {"rho1": complex(rho1), "tau0": complex(tau0), "tau1": complex(tau1), "r": complex(r)}


def taylor_coeffs(spec, K=64):
    """(a0, a1) for an InnerSpec; Types 4 and 5 get a closed-form geometric tail."""
    p, f = spec.params, spec.family
    z = np.zeros(2, dtype=complex)
    if f == 1:
        return CoeffSeq([p["u0"]]), CoeffSeq([], r=2)
    if f == 2:
        return CoeffSeq([z, p["u0"]]), CoeffSeq([p["u1"]])
    if f == 3:
        rho, e = p["rho"], np.exp(1j * p["theta"])
        s = np.sqrt(1 - rho ** 2)
        a0 = CoeffSeq([rho * p["u0"], s * p["u1"]])
        a1 = CoeffSeq([e * s * p["u0"], -e * rho * p["u1"]])
        return a0, a1
    if f == 4:
        rho, e = p["rho"], np.exp(1j * p["theta"])
        q = -rho * e
        rows = [rho * p["u0"]] + [(1 - rho ** 2) * e * q ** (k - 1) * p["u0"] for k in range(1, K + 1)]
        return CoeffSeq(rows, q), CoeffSeq([p["u1"]])
    d = spec.derived
    r = d["r"]
    geo = [r ** (k - 1) for k in range(1, K + 1)]
    a0 = CoeffSeq([p["rho0"] * p["u0"]] + [d["rho1"] * g * p["v"] for g in geo], r)
    a1 = CoeffSeq([d["tau0"] * p["u1"]] + [d["tau1"] * g * p["v"] for g in geo], r)
    return a0, a1


def check_mplus_inner(a0, a1, M=16, n_samples=256, tol=1e-10):
    """Residuals of <a_i, omega**m a_j> = delta_m delta_ij and of A*A = I on the circle."""
    rep = ConditionReport(tol=tol, meta={"M": M, "samples": n_samples, "analytic_tails": True})
    seqs = (a0, a1)
    for i in range(2):
        for j in range(2):
            for m in range(-M, M + 1):
                target = 1.0 if (i == j and m == 0) else 0.0
                rep.add("shift_orthonormal", (i, j, m), hplus_inner(seqs[i], seqs[j], m), target)
    for t in range(n_samples):
        w = np.exp(2j * np.pi * t / n_samples)
        A = np.column_stack([a0.evaluate(w), a1.evaluate(w)])
        rep.add("boundary_unitary", (t,), float(np.linalg.norm(A.conj().T @ A - np.eye(2), 2)), 0.0)
    return rep


def check_compat(a0, a1, P=8, tol=1e-10):
    """Residuals of the five compatibility condition families for p, p' <= P."""
    n00 = float(np.sum(np.abs(a0.coeff(0)) ** 2))
    if n00 >= 1:
        raise ValueError("compatibility conditions need ||a0_0|| < 1")
    d = 1 - n00
    A0 = a0.block(0, P + 1)
    A1 = a1.block(0, P + 1)
    x0 = A0[0]
    g0 = np.array([cinner(A0[k], x0) for k in range(P + 1)])  # <a0_k, a0_0>
    g1 = np.array([cinner(A1[k], x0) for k in range(P + 1)])  # <a1_k, a0_0>
    c0 = np.cumsum(np.sum(np.abs(A0) ** 2, axis=1))
    c1 = np.cumsum(np.sum(np.abs(A1) ** 2, axis=1))
    rep = ConditionReport(tol=tol, meta={"P": P})
    for p in range(1, P + 1):
        rep.add("a0_energy", (p,), abs(g0[p]) ** 2 / d, 1 - c0[p])
    for p in range(P + 1):
        rep.add("a1_energy", (p,), abs(g1[p]) ** 2 / d, 1 - c1[p])
    for p, pp in combinations(range(1, P + 1), 2):
        rhs = -sum(cinner(A0[pp - r], A0[p - r]) for r in range(p + 1))
        rep.add("a0_cross", (p, pp), g0[pp] * np.conj(g0[p]) / d, rhs)
    for p, pp in combinations(range(P + 1), 2):
        rhs = -sum(cinner(A1[pp - r], A1[p - r]) for r in range(p + 1))
        rep.add("a1_cross", (p, pp), g1[pp] * np.conj(g1[p]) / d, rhs)
    for p in range(1, P + 1):
        for pp in range(P + 1):
            top = p if p <= pp else pp
            rhs = -sum(cinner(A1[pp - r], A0[p - r]) for r in range(top + 1))
            rep.add("mixed_cross", (p, pp), g1[pp] * np.conj(g0[p]) / d, rhs)
    return rep


def _vec_zero(seq, tol):
    return seq.norm2() <= tol ** 2


def classify(a0, a1, tol=1e-9, check=True):
    """Family tag 1..5 of an M+-inner pair."""
    if _vec_zero(a1, tol):
        n = np.array([abs(hplus_inner(a0, a0, m) - (m == 0)) for m in range(-8, 9)])
        if np.max(n) > max(tol, 1e-10):
            raise ValueError("a1 vanishes but a0 is not an inner column")
        return 1
    if check:
        rep = check_mplus_inner(a0, a1, M=8, n_samples=64, tol=max(tol, 1e-10))
        if not rep.passed:
            raise ValueError("not M+-inner: worst residual %.3g" % rep.max_residual)
    x0 = a0.coeff(0)
    n00 = float(np.sum(np.abs(x0) ** 2))
    if np.sqrt(n00) <= tol:
        return 2
    if check:
        rep = check_compat(a0, a1, P=8, tol=max(tol, 1e-10))
        if not rep.passed:
            raise ValueError("compatibility conditions fail: worst residual %.3g" % rep.max_residual)
    scale = np.sqrt(1 - n00)
    c2 = abs(cinner(a0.coeff(1), x0)) / scale
    c3 = abs(cinner(a1.coeff(0), x0)) / scale
    if c2 <= tol and c3 <= tol:
        raise ValueError("C2 = C3 = 0 with a0_0 != 0 is impossible")
    if c2 <= tol:
        return 3
    if c3 <= tol:
        return 4
    return 5


def recover_params(a0, a1, family):
    """Family parameters that rebuild (a0, a1) through taylor_coeffs."""
    x0 = a0.coeff(0)
    if family == 1:
        return {"u0": x0}
    if family == 2:
        return {"u0": a0.coeff(1), "u1": a1.coeff(0)}
    rho = float(np.linalg.norm(x0))
    u0 = x0 / rho
    s = np.sqrt(1 - rho ** 2)
    if family == 3:
        e = cinner(a1.coeff(0), u0) / s
        return {"u0": u0, "u1": a0.coeff(1) / s, "rho": rho, "theta": float(np.angle(e))}
    if family == 4:
        e = cinner(a0.coeff(1), u0) / (1 - rho ** 2)
        return {"u0": u0, "u1": a1.coeff(0), "rho": rho, "theta": float(np.angle(e))}
    x1 = a0.coeff(1)
    rho1 = float(np.linalg.norm(x1))
    v = x1 / rho1
    y0 = a1.coeff(0)
    tau0 = float(np.linalg.norm(y0))
    return {"rho0": complex(rho), "u0": u0, "u1": y0 / tau0, "v": v,
            "arg_rho1": 0.0, "arg_tau0": 0.0}


def unitary_residual(U):
    U = np.asarray(U, dtype=complex)
    return float(np.linalg.norm(U.conj().T @ U - np.eye(2), 2))


def unitary_transform(a0, a1, U, tol=1e-12):
    """Columns of A+ U: b0 = u11 a0 + u21 a1, b1 = u12 a0 + u22 a1.

    Returns (b0, b1, change_case_residual).
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2):
        raise ValueError("U must be 2x2")
    if unitary_residual(U) > tol:
        raise ValueError("U is not unitary (residual %.3g)" % unitary_residual(U))
    b0 = combine([(U[0, 0], a0), (U[1, 0], a1)])
    b1 = combine([(U[0, 1], a0), (U[1, 1], a1)])
    return b0, b1, change_case_residual(a0, a1, U)


def change_case_residual(a0, a1, U):
    """Residual of the identity linking ||b0_0|| to ||a0_0|| (ConditionChangeCase)."""
    x0, y0 = a0.coeff(0), a1.coeff(0)
    d = 1 - float(np.sum(np.abs(x0) ** 2))
    if d <= 0:
        return 0.0
    lhs = d * abs(U[0, 0] - U[1, 0] * cinner(y0, x0) / d) ** 2
    rhs = 1 - float(np.sum(np.abs(x0 * U[0, 0] + y0 * U[1, 0]) ** 2))
    return abs(lhs - rhs)


def solve_type5_real(rho0, angle_vu0, u0_angle=0.0, flip=False):
    """Real unit vectors (u0, u1, v) solving the Type 5 constraint.

    angle_vu0 is the signed angle from v to u0; the angle from u0 to u1
    then follows from tan(angle_vu0) tan(angle_u0u1) = 1/(1 - rho0**2).
    flip picks -u1 instead of u1 (both solve the constraint).
    """
    rho0 = float(rho0)
    if not 0 < abs(rho0) < 1:
        raise ValueError("|rho0| must lie in (0,1)")
    t = np.tan(angle_vu0)
    if abs(np.sin(angle_vu0)) < 1e-12 or abs(np.cos(angle_vu0)) < 1e-12:
        raise ValueError("degenerate angle between v and u0")
    ang = np.arctan(1 / ((1 - rho0 ** 2) * t))
    a = u0_angle
    u0 = np.array([np.cos(a), np.sin(a)])
    v = np.array([np.cos(a - angle_vu0), np.sin(a - angle_vu0)])
    u1 = np.array([np.cos(a + ang), np.sin(a + ang)])
    if flip:
        u1 = -u1
    return u0.astype(complex), u1.astype(complex), v.astype(complex)


def complete_type5_real(rho0, u0, v, flip=False):
    """u1 for given real unit u0 and v (see solve_type5_real)."""
    u0 = np.real(np.asarray(u0, dtype=complex))
    v = np.real(np.asarray(v, dtype=complex))
    a = np.arctan2(u0[1], u0[0])
    b = np.arctan2(v[1], v[0])
    ang = (a - b + np.pi) % (2 * np.pi) - np.pi
    return solve_type5_real(rho0, ang, a, flip)[1]


def wandering_rank(seqs, M=8, tol=1e-9):
    """Largest set of pairwise non-parallel sequences that are mutually
    orthogonal under every shift |m| <= M."""
    units = []
    for s in seqs:
        n = np.sqrt(s.norm2())
        if n <= tol:
            continue
        u = s.scaled(1 / n)
        if all(abs(hplus_inner(u, w, 0)) < 1 - tol for w in units):
            units.append(u)

    def orth(x, y):
        return all(abs(hplus_inner(x, y, m)) <= tol for m in range(-M, M + 1))
    best = 1 if units else 0
    for size in range(2, len(units) + 1):
        found = any(all(orth(x, y) for x, y in combinations(c, 2))
                    for c in combinations(units, size))
        if not found:
            break
        best = size
    return best
