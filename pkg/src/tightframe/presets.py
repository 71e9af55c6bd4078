"""Named parameter sets for r = 2 (B0 = 1, all free phases 0)."""
import numpy as np

from .hardy_inner import build_spec, complete_type5_real

E0 = np.array([1.0, 0.0])
E1 = np.array([0.0, 1.0])
S2 = np.array([1.0, 1.0]) / np.sqrt(2)
D2 = np.array([1.0, -1.0]) / np.sqrt(2)
V5 = np.array([1.0, 2.0]) / np.sqrt(5)

_PAIRS = {"a": (E0, E1), "b": (S2, D2)}
_RT = {"a": (0.5, 0.0), "b": (0.75, np.pi)}
_T5 = {
    "a": (0.1, E0, S2),
    "b": (0.5, E0, S2),
    "c": (0.9, E0, S2),
    "d": (-0.5, E0, S2),
    "e": (-0.6, S2, V5),
    "f": (0.5, S2, V5),
}


def preset_params(name):
    """(family, params) for names like 't1', 't2a', 't3b', 't5e'."""
    fam, tag = int(name[1]), name[2:]
    if fam == 1:
        return 1, {"u0": E0}
    if fam == 2:
        u0, u1 = _PAIRS[tag]
        return 2, {"u0": u0, "u1": u1}
    if fam in (3, 4):
        u0, u1 = _PAIRS[tag]
        rho, theta = _RT[tag]
        return fam, {"u0": u0, "u1": u1, "rho": rho, "theta": theta}
    if fam == 5:
        rho0, u0, v = _T5[tag]
        return 5, {"rho0": rho0, "u0": u0, "v": v, "u1": complete_type5_real(rho0, u0, v)}
    raise KeyError(name)


PRESETS = ["t1", "t2a", "t2b", "t3a", "t3b", "t4a", "t4b"] + ["t5" + c for c in "abcdef"]


def preset_spec(name, B=1.0):
    fam, params = preset_params(name)
    return build_spec(fam, params, B=B)
