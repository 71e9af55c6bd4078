"""FrameFile: the JSON form of a constructed frame."""
import json

import numpy as np

from .frame_builder import FrameCoeffs, assemble, c_sequence
from .hardy_inner import CoeffSeq

SCHEMA_VERSION = 1
CONSISTENCY_TOL = 1e-12


class FrameFileError(ValueError):
    """Malformed or schema-violating frame file."""


def _c(z):
    z = complex(z)
    # -0.0 would otherwise make equal frames serialize differently
    return [z.real + 0.0, z.imag + 0.0]


def _vec(v):
    return [_c(x) for x in np.asarray(v).reshape(-1)]


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return _vec(x)
    if isinstance(x, (complex, np.complexfloating)):
        return _c(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def seq_to_dict(seq):
    tail = None
    if seq.has_tail:
        tail = {"vector": _vec(seq.coeffs[-1]), "ratio": _c(seq.ratio)}
    return {"coeffs": [_vec(a) for a in seq.coeffs], "tail": tail}


def frame_to_dict(fc, family=None, params=None, phases=None):
    psi = {str(i): _vec(fc.psi[i]) for i in range(fc.I_max) if np.any(fc.psi[i] != 0)}
    doc = {
        "schema_version": SCHEMA_VERSION,
        "r": fc.r,
        "B": fc.B,
        "B0": _c(fc.B0),
        "arg_c1": fc.arg_c1 + 0.0,
        "family": family,
        "params": _jsonable(params or {}),
        "phases": _jsonable(phases or {}),
        "I_max": fc.I_max,
        "C": {str(l): _c(c) for l, c in sorted(fc.C.items()) if c != 0},
        "Psi": psi,
    }
    if fc.has_source:
        doc["a0"] = seq_to_dict(fc.a0)
        doc["a1"] = seq_to_dict(fc.a1)
    return doc


def dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _need(doc, key, kind=None):
    if key not in doc:
        raise FrameFileError("missing field %r" % key)
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        raise FrameFileError("field %r has the wrong type" % key)
    return val


def _complex(x, what):
    if not (isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) for t in x)):
        raise FrameFileError("%s must be a [re, im] pair" % what)
    return complex(x[0], x[1])


def _cvec(x, r, what):
    if not isinstance(x, list) or len(x) != r:
        raise FrameFileError("%s must hold %d [re, im] pairs" % (what, r))
    return np.array([_complex(t, what) for t in x])


def seq_from_dict(d, r, what):
    if not isinstance(d, dict):
        raise FrameFileError("%s must be an object" % what)
    rows = [_cvec(a, r, what) for a in _need(d, "coeffs", list)]
    tail = d.get("tail")
    if tail is None:
        return CoeffSeq(rows, r=r)
    ratio = _complex(_need(tail, "ratio"), what + ".tail.ratio")
    vec = _cvec(_need(tail, "vector"), r, what + ".tail.vector")
    if not rows or np.max(np.abs(vec - rows[-1])) > CONSISTENCY_TOL:
        raise FrameFileError("%s.tail.vector must repeat the last coefficient" % what)
    if not abs(ratio) < 1:
        raise FrameFileError("%s.tail.ratio must have modulus < 1" % what)
    return CoeffSeq(rows, ratio, r=r)


def frame_from_dict(doc):
    """FrameCoeffs from a parsed file; raises FrameFileError on schema problems."""
    if not isinstance(doc, dict):
        raise FrameFileError("top level must be an object")
    if _need(doc, "schema_version") != SCHEMA_VERSION:
        raise FrameFileError("unsupported schema_version %r" % doc["schema_version"])
    r = _need(doc, "r", int)
    if r not in (1, 2):
        raise FrameFileError("r must be 1 or 2")
    B = float(_need(doc, "B", (int, float)))
    if not B > 0:
        raise FrameFileError("B must be positive")
    B0 = _complex(_need(doc, "B0"), "B0")
    I_max = _need(doc, "I_max", int)
    if I_max < 2 or I_max & (I_max - 1):
        raise FrameFileError("I_max must be a power of two")
    psi = np.zeros((I_max, r), dtype=complex)
    for key, v in _need(doc, "Psi", dict).items():
        if not key.isdigit() or int(key) >= I_max:
            raise FrameFileError("Psi index %r outside [0, I_max)" % key)
        psi[int(key)] = _cvec(v, r, "Psi[%s]" % key)
    C = {}
    for key, v in _need(doc, "C", dict).items():
        if not key.isdigit():
            raise FrameFileError("C index %r is not a non-negative integer" % key)
        C[int(key)] = _complex(v, "C[%s]" % key)
    family = doc.get("family")
    a0 = a1 = None
    if "a0" in doc or "a1" in doc:
        a0 = seq_from_dict(_need(doc, "a0"), r, "a0")
        a1 = seq_from_dict(_need(doc, "a1"), r, "a1")
    if family == 4 and (a0 is None or not a0.has_tail):
        raise FrameFileError("family 4 needs a tail descriptor on a0")
    if family == 5 and (a0 is None or not (a0.has_tail and a1.has_tail)):
        raise FrameFileError("family 5 needs tail descriptors on a0 and a1")
    arg_c1 = float(doc.get("arg_c1", 0.0))
    return FrameCoeffs(r, B, B0, C, psi, a0, a1, arg_c1)


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise FrameFileError("cannot read %s: %s" % (path, e.strerror)) from None
    except json.JSONDecodeError as e:
        raise FrameFileError("%s is not valid JSON: %s" % (path, e)) from None
    return frame_from_dict(doc), doc


def save(path, doc):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(doc))


def rederive(fc):
    """C and Psi recomputed from the stored a0, a1 (None without them)."""
    if not fc.has_source:
        return None
    C = c_sequence(fc.a0, fc.a1, fc.B, float(np.angle(fc.B0)), fc.arg_c1, fc.I_max - 1)
    return assemble(fc.a0, fc.a1, C, fc.B0, fc.I_max, fc.arg_c1)


def consistency_rows(fc):
    """(cond, index, stored, rederived) for every stored C_l and Psi_i."""
    ref = rederive(fc)
    if ref is None:
        return []
    rows = []
    for l in sorted(set(fc.C) | set(ref.C)):
        rows.append(("stored_C", (l,), fc.C.get(l, 0j), ref.C.get(l, 0j)))
    diff = np.max(np.abs(fc.psi - ref.psi), axis=1)
    i = int(np.argmax(diff))
    rows.append(("stored_Psi", (i,), float(diff[i]), 0.0))
    return rows
