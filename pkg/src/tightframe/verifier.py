"""Numerical checks of the tight frame characterizations."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .frame_builder import from_psi, prefix_index, top_bits
from .haar_core import _k_cell, alpha_column
from .hardy_inner import cinner, hplus_inner, series_inner
from .report import ConditionReport

DEFAULT_TOL = 1e-10


class _Branches:
    """Lazily built h_l sequences of one FrameCoeffs."""

    def __init__(self, fc):
        self.fc = fc
        self.cache = {}

    def __getitem__(self, l):
        if l not in self.cache:
            self.cache[l] = self.fc.branch(l)
        return self.cache[l]


def _ksum(h, la, ka, lb, kb):
    """sum_{t>=0} <h_la[ka+t], h_lb[kb+t]>."""
    return series_inner(h[la], ka, h[lb], kb)


def _norm2(v):
    return float(np.sum(np.abs(v) ** 2))


def _prefix_cross(fc, l, lp):
    """sum over shared prefixes of <Psi_prefix(l', k), Psi_prefix(l, k)>."""
    p, pp = l.bit_length() - 1, lp.bit_length() - 1
    acc = 0j
    for k in range(max(-p, -pp), 1):
        if top_bits(l, k) == top_bits(lp, k):
            acc += cinner(fc.psi_at(prefix_index(lp, k)), fc.psi_at(prefix_index(l, k)))
    return acc


def _prefix_energy(fc, l):
    p = l.bit_length() - 1
    return sum(_norm2(fc.psi_at(prefix_index(l, k))) for k in range(-p, 1))


def _iter_prophv(fc, ls, L_max, S_max):
    """Vector-condition rows in a fixed order, one condition family at a time."""
    h = _Branches(fc)
    ls = list(ls)
    shifts = range(-S_max, S_max + 1)
    start = {sg: max(1, 1 - sg) - 1 for sg in shifts}
    if 0 in ls:
        for sg in shifts:
            yield "pow2_shift", (sg,), _ksum(h, 0, start[sg] + sg, 0, start[sg]), fc.B if sg == 0 else 0
    pos = [l for l in ls if l]
    for l in pos:
        yield "branch_energy", (l,), _prefix_energy(fc, l) + _ksum(h, l, 0, l, 0).real, fc.B
    for l in pos:
        for sg in shifts:
            if sg:
                yield "branch_shift", (l, sg), _ksum(h, l, start[sg] + sg, l, start[sg]), 0
    for l in pos:
        for sg in shifts:
            yield "pow2_branch", (l, sg), _ksum(h, l, start[sg] + sg, 0, start[sg]), 0
    for l in pos:
        for lp in range(1, L_max):
            if lp != l:
                yield "cross_branch", (l, lp), _prefix_cross(fc, l, lp) + _ksum(h, lp, 0, l, 0), 0
    for l in pos:
        for lp in range(1, L_max):
            if lp != l:
                for sg in shifts:
                    if sg:
                        yield "cross_branch_shift", (l, lp, sg), _ksum(h, lp, start[sg] + sg, l, start[sg]), 0


def _prophv_rows(fc, ls, L_max, S_max):
    return list(_iter_prophv(fc, ls, L_max, S_max))


def _h1_rows(fc, ls, L_max, M_max):
    h = _Branches(fc)
    rows = []
    for l in ls:
        for lp in range(L_max):
            b = beta(fc, l, lp)
            for d in range(-M_max, M_max + 1):
                rows.append(("hardy_gram", (l, lp, d), hplus_inner(h[lp], h[l], -d), b if d == 0 else 0))
    return rows


def _run(worker, fc, L_max, extra, jobs, ls=None):
    ls = list(range(L_max)) if ls is None else ls
    if jobs and jobs > 1:
        chunks = [ls[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(worker, [fc] * jobs, chunks, [L_max] * jobs, [extra] * jobs))
        rows = [r for part in parts for r in part]
    else:
        rows = worker(fc, ls, L_max, extra)
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows


_PROPHV_ORDER = ("pow2_shift", "branch_energy", "branch_shift", "pow2_branch", "cross_branch", "cross_branch_shift")


def check_prophv(fc, L_max=32, S_max=4, tol=DEFAULT_TOL, jobs=1):
    """Vector conditions of the Haar-coefficient characterization."""
    rep = ConditionReport(tol=tol, meta={"L_max": L_max, "S_max": S_max,
                                         "analytic_tails": fc.has_source})
    rep.add("zero_mean", (0,), float(np.linalg.norm(fc.psi_at(0))), 0)
    rows = _run(_prophv_rows, fc, L_max, S_max, jobs)
    rows.sort(key=lambda r: _PROPHV_ORDER.index(r[0]))
    for cond, idx, val, target in rows:
        rep.add(cond, idx, val, target)
    return rep


def first_failure(fc, L_max, S_max, tol):
    """Name of the first failing vector condition, or None."""
    if np.linalg.norm(fc.psi_at(0)) > tol:
        return "zero_mean"
    for cond, idx, val, target in _iter_prophv(fc, range(L_max), L_max, S_max):
        if abs(complex(val) - complex(target)) > tol:
            return "%s at %s" % (cond, idx)
    return None


def beta(fc, l, lp):
    """Target of <omega^m h_l', omega^n h_l> at m = n."""
    if l == 0 and lp == 0:
        return fc.B
    if l == 0 or lp == 0:
        return 0.0
    if l == lp:
        return fc.B - _prefix_energy(fc, l)
    return -_prefix_cross(fc, l, lp)


def check_h1(fc, L_max=32, M_max=4, tol=DEFAULT_TOL, jobs=1):
    """Hardy-space form: <omega^m h_l', omega^n h_l> = delta_{m-n} beta_{l,l'}."""
    rep = ConditionReport(tol=tol, meta={"L_max": L_max, "M_max": M_max,
                                         "analytic_tails": fc.has_source})
    rep.add("zero_mean", (0,), float(np.linalg.norm(fc.psi_at(0))), 0)
    for cond, idx, val, target in _run(_h1_rows, fc, L_max, M_max, jobs):
        rep.add(cond, idx, val, target)
    return rep


class _SesTerms:
    """X^{s,l,k}_n = sum_i alpha_{i,n}^{s,l,k} Psi_i with the i = 0 term left out."""

    def __init__(self, fc):
        self.fc = fc
        self.cache = {}

    def __call__(self, s, l, k):
        key = (s, l, k)
        if key not in self.cache:
            out = {}
            lam, _ = _k_cell(s, l, k)
            if lam >= 0:
                for i, n, a in alpha_column(s, l, k):
                    if i == 0:
                        continue
                    v = float(a) * self.fc.psi_at(i)
                    out[n] = out[n] + v if n in out else v
            self.cache[key] = out
        return self.cache[key]


def _ses_term(X, s, l, sp, lp, sg, k, window):
    x, y = X(s, l, k), X(sp, lp, k + sg)
    tot = 0j
    for n, xv in x.items():
        if n in y and -window <= n <= window:
            tot += cinner(y[n], xv)
    return tot


def default_ses_sample(L=8, S=4):
    return [(s, l, sp, lp, sg) for s in (1, -1) for sp in (1, -1)
            for l in range(L) for lp in range(L) for sg in range(-S, S + 1)]


def check_ses1(fc, a=8, sample=None, tol=DEFAULT_TOL, k_cap=600):
    """The truncated double sum over alpha, per sampled (s, l, s', l', sigma).

    Entries hold the limit value: the depth-a window plus the k > a terms,
    summed until they fall below 1e-18 (they decay geometrically).  The
    window values at depths a and a+2 are kept in the metadata.
    """
    if sample is None:
        sample = default_ses_sample()
    rep = ConditionReport(tol=tol, meta={"depth": a, "depth_values": {}})
    psi0 = float(np.linalg.norm(fc.psi_at(0)))
    rep.add("zero_mean", (0,), psi0, 0)
    X = _SesTerms(fc)
    for s, l, sp, lp, sg in sample:
        target = fc.B if (s == sp and l == lp and sg == 0) else 0.0
        win_a = 2 ** a
        v_a = sum(_ses_term(X, s, l, sp, lp, sg, k, win_a) for k in range(-a, a + 1))
        v_a2 = sum(_ses_term(X, s, l, sp, lp, sg, k, 4 * win_a) for k in range(-a - 2, a + 3))
        v = v_a
        quiet = 0
        k = a + 1
        while quiet < 6 and k < a + k_cap:
            t = _ses_term(X, s, l, sp, lp, sg, k, win_a)
            v += t
            quiet = quiet + 1 if abs(t) < 1e-18 else 0
            k += 1
        rep.meta["depth_values"][(s, l, sp, lp, sg)] = (v_a, v_a2)
        rep.add("spectral", (s, l, sp, lp, sg), v, target)
    return rep


def _shell(psis, f, k):
    """sum over psi and translates j of |<f, D^k T^j psi>|^2."""
    tot = 0.0
    fv = f.numeric()
    Jf, of, vals = fv.level, fv.origin, fv.values
    for psi in psis:
        J = psi.level
        pv = psi.on_window(J, 0, 1 << J)
        L = Jf - k
        if L < 0:
            # f o affine is constant on [0,1) for every translate
            m = np.sum(pv) * 2.0 ** -J
            tot += float(np.sum(np.abs(vals) ** 2)) * 2.0 ** (-L) * 2.0 ** (-k) * abs(m) ** 2
            continue
        if L <= J:
            M = 1 << L
            H = pv.reshape(M, -1).sum(axis=1)
            G, g0 = vals, of
            scale2 = 2.0 ** (-k - 2 * J)
        else:
            b = 1 << (L - J)
            lo = (of // b) * b
            hi = -((-(of + len(vals))) // b) * b
            buf = np.zeros(hi - lo, dtype=complex)
            buf[of - lo:of - lo + len(vals)] = vals
            G, g0 = buf.reshape(-1, b).sum(axis=1), lo // b
            M = 1 << J
            H = pv
            scale2 = 2.0 ** (-k - 2 * L)
        j_lo = g0 // M
        j_hi = (g0 + len(G) - 1) // M
        win = np.zeros((j_hi - j_lo + 1) * M, dtype=complex)
        win[g0 - j_lo * M:g0 - j_lo * M + len(G)] = G
        raw = win.reshape(-1, M) @ np.conj(H)
        # squared before scaling so that dyadic data stays exact
        tot += float(np.sum(raw.real ** 2 + raw.imag ** 2)) * scale2
    return tot


def frame_sum(psis, f, K, pad=0):
    """Running partial sums over the shells |k| <= 0, 1, ..., K.

    Translates whose support misses supp f contribute nothing, so pad only
    matters for bookkeeping; it is accepted for interface compatibility.
    """
    sums = []
    acc = 0.0
    for kk in range(K + 1):
        acc += _shell(psis, f, kk)
        if kk:
            acc += _shell(psis, f, -kk)
        sums.append(float(acc))
    return sums


@dataclass
class R1Verdict:
    passed: bool
    condition: str
    haar: bool


def check_r1(psi_hat, B=1.0, tol=DEFAULT_TOL):
    """Single-generator candidate: run the vector conditions, name the first failure."""
    psi_hat = np.asarray(psi_hat, dtype=complex).reshape(-1)
    fc = from_psi(psi_hat.reshape(-1, 1), B)
    N = fc.I_max.bit_length() - 1
    fail = first_failure(fc, L_max=2 * fc.I_max, S_max=N + 1, tol=tol)
    haar = (abs(psi_hat[0]) <= tol and len(psi_hat) > 1 and abs(abs(psi_hat[1]) ** 2 - B) <= tol
            and np.all(np.abs(psi_hat[2:]) <= tol))
    return R1Verdict(fail is None, fail or "tight frame", bool(haar))


def verify_all(fc, L_max=32, S_max=4, tol=DEFAULT_TOL, jobs=1):
    rep = check_prophv(fc, L_max, S_max, tol, jobs)
    rep.extend(check_h1(fc, L_max, S_max, tol, jobs))
    return rep
