"""tightframe command line: construct, verify, synthesize, transform, framecheck,
classify and plot.

Exit codes: 0 success or pass, 1 verification failure, 2 usage or format error.
"""
import argparse
import csv
import json
import os
import sys
from io import StringIO

import numpy as np

from . import io as fio
from .frame_builder import assemble, build_frame, c_sequence, synthesize
from .haar_core import DyadicStep, haar_L
from .hardy_inner import (build_spec, classify, complete_type5_real,
                          recover_params, unitary_transform)
from .verifier import check_h1, check_prophv, check_ses1, default_ses_sample, frame_sum

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MAX_LEVEL = 20


class UsageError(Exception):
    pass


def default_tol():
    raw = os.environ.get("FRAMELET_TOL")
    if raw is None:
        return 1e-10
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError("FRAMELET_TOL=%r is not a number" % raw) from None
    if not tol > 0:
        raise UsageError("FRAMELET_TOL must be positive")
    return tol


def parse_reals(text, what):
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError("%s: expected comma separated numbers, got %r" % (what, text)) from None


def parse_vector(text, what):
    """'a,b' is a real vector, 'a,b,c,d' the complex vector (a+bi, c+di)."""
    x = parse_reals(text, what)
    if len(x) == 2:
        return np.array(x, dtype=complex)
    if len(x) == 4:
        return np.array([complex(x[0], x[1]), complex(x[2], x[3])])
    raise UsageError("%s: expected 2 reals or 4 reals (re,im pairs), got %d values" % (what, len(x)))


def parse_scalar(text, what):
    x = parse_reals(text, what)
    if len(x) == 1:
        return complex(x[0])
    if len(x) == 2:
        return complex(x[0], x[1])
    raise UsageError("%s: expected a real or a re,im pair" % what)


def parse_unitary(text):
    x = parse_reals(text, "--unitary")
    if len(x) == 4:
        return np.array(x, dtype=complex).reshape(2, 2)
    if len(x) == 8:
        return np.array([complex(x[k], x[k + 1]) for k in range(0, 8, 2)]).reshape(2, 2)
    raise UsageError("--unitary: expected 4 reals (real matrix) or 8 reals (re,im pairs), row major")


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load(path):
    try:
        return fio.load(path)
    except fio.FrameFileError as e:
        raise UsageError(str(e)) from None


def _need(args, name):
    val = getattr(args, name)
    if val is None:
        raise UsageError("family %d needs --%s" % (args.family, name.replace("_", "-")))
    return val


def spec_from_args(args):
    fam = args.family
    params = {}
    if fam >= 1:
        params["u0"] = parse_vector(_need(args, "u0"), "--u0")
    if fam in (2, 3, 4):
        params["u1"] = parse_vector(_need(args, "u1"), "--u1")
    if fam in (3, 4):
        params["rho"] = float(_need(args, "rho"))
        params["theta"] = float(args.theta)
    if fam == 5:
        params["rho0"] = parse_scalar(_need(args, "rho0"), "--rho0")
        params["v"] = parse_vector(_need(args, "v"), "--v")
        if args.u1 is not None:
            params["u1"] = parse_vector(args.u1, "--u1")
        else:
            if params["rho0"].imag or np.any(params["u0"].imag) or np.any(params["v"].imag):
                raise UsageError("--u1 can only be solved for real rho0, u0 and v; pass it explicitly")
            try:
                params["u1"] = complete_type5_real(params["rho0"].real, params["u0"], params["v"],
                                                   flip=args.u1_flip)
            except ValueError as e:
                raise UsageError(str(e)) from None
    phases = {"arg_b0": args.arg_b0, "arg_c1": args.arg_c1,
              "arg_rho1": args.arg_rho1, "arg_tau0": args.arg_tau0}
    try:
        return build_spec(fam, params, B=args.B, phases=phases), phases
    except (ValueError, KeyError) as e:
        raise UsageError(str(e)) from None


def cmd_construct(args):
    if args.imax < 2 or args.imax & (args.imax - 1):
        raise UsageError("--imax must be a power of two")
    spec, phases = spec_from_args(args)
    fc = build_frame(spec, K=args.trunc, I_max=args.imax)
    params = dict(spec.params)
    params.update(spec.derived)
    doc = fio.frame_to_dict(fc, spec.family, params, phases)
    _write(fio.dumps(doc), args.out)
    return EXIT_OK


def cmd_verify(args):
    fc, doc = _load(args.file)
    tol = args.tol if args.tol is not None else default_tol()
    rep = check_prophv(fc, args.depth, args.shift, tol, jobs=args.jobs)
    rep.extend(check_h1(fc, args.depth, args.shift, tol, jobs=args.jobs))
    if args.ses1:
        rep.extend(check_ses1(fc, a=args.ses_depth, sample=default_ses_sample(), tol=tol))
    for cond, idx, val, target in fio.consistency_rows(fc):
        rep.add(cond, idx, val, target)
    print(rep.summary())
    if args.json:
        info = rep.to_dict()
        info["meta"] = {k: v for k, v in info["meta"].items() if k != "depth_values"}
        info["file"] = args.file
        _write(json.dumps(info, sort_keys=True, indent=1, default=str) + "\n", args.json)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _synth(args):
    fc, _ = _load(args.file)
    if not 0 <= args.level <= MAX_LEVEL:
        raise UsageError("--level must lie in [0, %d]" % MAX_LEVEL)
    try:
        return synthesize(fc, args.level)
    except ValueError as e:
        raise UsageError(str(e)) from None


def samples_csv(psis):
    J = psis[0].level
    h = 2.0 ** -J
    rows = []
    header = ["x_left", "x_right"]
    for j in range(len(psis)):
        header += ["re_psi%d" % (j + 1), "im_psi%d" % (j + 1)]
    rows.append(header)
    vals = [p.on_window(J, 0, 1 << J) for p in psis]
    for c in range(1 << J):
        row = [format(c * h, ".17g"), format((c + 1) * h, ".17g")]
        for v in vals:
            row += [format(v[c].real + 0.0, ".17g"), format(v[c].imag + 0.0, ".17g")]
        rows.append(row)
    buf = StringIO()
    csv.writer(buf, lineterminator="\r\n").writerows(rows)
    return buf.getvalue()


def samples_svg(psis, width=480, height=220):
    """One step-plot panel per generator, x in [0,1], y scaled to the data."""
    J = psis[0].level
    n = 1 << J
    pad = 30
    parts = ['<?xml version="1.0" encoding="UTF-8"?>',
             '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="%d" height="%d">'
             % (width, height * len(psis))]
    for j, p in enumerate(psis):
        v = p.on_window(J, 0, n)
        top = j * height
        ymax = max(float(np.max(np.abs(v.real))), float(np.max(np.abs(v.imag)))) or 1.0
        sx = (width - 2 * pad) / 1.0
        sy = (height / 2 - pad) / ymax
        y0 = top + height / 2

        def X(x):
            return "%.3f" % (pad + x * sx)

        def Y(y):
            return "%.3f" % (y0 - y * sy)
        parts.append('<g id="psi%d">' % (j + 1))
        parts.append('<rect x="%d" y="%d" width="%d" height="%d" fill="none" stroke="#bbbbbb"/>'
                     % (pad, top + pad // 2, width - 2 * pad, height - pad))
        parts.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="#888888"/>' % (X(0), Y(0), X(1), Y(0)))
        parts.append('<text x="%d" y="%d" font-size="12">psi%d (max |value| %.6g)</text>'
                     % (pad, top + 12, j + 1, ymax))
        for comp, color in ((v.real, "#1f4e9c"), (v.imag, "#c0392b")):
            if comp is v.imag and not np.any(comp):
                continue
            pts = []
            for c in range(n):
                pts.append("%s,%s %s,%s" % (X(c / n), Y(comp[c]), X((c + 1) / n), Y(comp[c])))
            parts.append('<polyline fill="none" stroke="%s" stroke-width="1" points="%s"/>'
                         % (color, " ".join(pts)))
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_synthesize(args):
    psis = _synth(args)
    text = samples_csv(psis) if args.format == "csv" else samples_svg(psis)
    _write(text, args.out)
    return EXIT_OK


def cmd_plot(args):
    args.format = "svg"
    return cmd_synthesize(args)


def cmd_transform(args):
    fc, doc = _load(args.file)
    if not fc.has_source or fc.r != 2:
        raise UsageError("transform needs a file with a0/a1 sequences and r = 2")
    U = parse_unitary(args.unitary)
    try:
        b0, b1, change = unitary_transform(fc.a0, fc.a1, U)
        old = doc.get("family")
        if old is None:
            old = classify(fc.a0, fc.a1)
        new = classify(b0, b1)
    except ValueError as e:
        raise UsageError(str(e)) from None
    arg_b0 = float(np.angle(fc.B0))
    C = c_sequence(b0, b1, fc.B, arg_b0, fc.arg_c1, fc.I_max - 1)
    out = assemble(b0, b1, C, fc.B0, fc.I_max, fc.arg_c1)
    params = recover_params(b0, b1, new)
    phases = dict(doc.get("phases") or {})
    new_doc = fio.frame_to_dict(out, new, params, phases)
    _write(fio.dumps(new_doc), args.out)
    msg = "family %s -> %d" % (old, new)
    if new in (3, 4):
        msg += ", rho %r" % float(params["rho"])
    elif new == 5:
        msg += ", |rho0| %r" % float(abs(params["rho0"]))
    msg += ", change-case residual %.3g" % change
    print(msg, file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return EXIT_OK


def _test_function(spec, r_hint):
    if spec == "indicator":
        return DyadicStep(0, 0, np.array([1.0 + 0j]))
    if spec == "haar":
        return haar_L(1, 0).numeric()
    try:
        with open(spec, encoding="utf-8") as fh:
            d = json.load(fh)
        vals = np.array([complex(*v) if isinstance(v, list) else complex(v) for v in d["values"]])
        f = DyadicStep(int(d["level"]), int(d.get("origin", 0)), vals)
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise UsageError("cannot read test function %s: %s" % (spec, e)) from None
    if len(f) == 0:
        raise UsageError("test function %s is empty" % spec)
    return f


def cmd_framecheck(args):
    fc, _ = _load(args.file)
    f = _test_function(args.f, fc.r)
    if args.K < 0:
        raise UsageError("--K must be non-negative")
    J = max(1, (fc.I_max - 1).bit_length())
    J = min(J, MAX_LEVEL)
    try:
        psis = synthesize(fc, J)
    except ValueError as e:
        raise UsageError(str(e)) from None
    sums = frame_sum(psis, f, args.K)
    fv = f.numeric()
    target = fc.B * float(np.sum(np.abs(fv.values) ** 2)) * 2.0 ** -fv.level
    tol = default_tol()
    print("K,partial_sum,gap")
    for K, s in enumerate(sums):
        print("%d,%s,%s" % (K, format(s, ".17g"), format(target - s, ".17g")))
    print("target B*||f||^2 = %s" % format(target, ".17g"))
    over = any(s > target * (1 + tol) + tol for s in sums)
    return EXIT_FAIL if over else EXIT_OK


def cmd_classify(args):
    fc, doc = _load(args.file)
    if not fc.has_source:
        raise UsageError("classify needs a file with a0/a1 sequences")
    try:
        tag = classify(fc.a0, fc.a1)
    except ValueError as e:
        print("not classifiable: %s" % e)
        return EXIT_FAIL
    print(tag)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="tightframe", description="Tight wavelet frames from Haar coefficients.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a frame file from family parameters")
    p.add_argument("--family", type=int, required=True, choices=range(1, 6))
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--u0")
    p.add_argument("--u1")
    p.add_argument("--u1-flip", action="store_true", help="take -u1 when solving for it (family 5)")
    p.add_argument("--v")
    p.add_argument("--rho", type=float)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--rho0")
    p.add_argument("--arg-b0", type=float, default=0.0)
    p.add_argument("--arg-c1", type=float, default=0.0)
    p.add_argument("--arg-rho1", type=float, default=0.0)
    p.add_argument("--arg-tau0", type=float, default=0.0)
    p.add_argument("--trunc", type=int, default=64, help="explicit Taylor coefficients before the tail")
    p.add_argument("--imax", type=int, default=4096, help="stored Haar coefficients (power of two)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="check the tight frame conditions of a frame file")
    p.add_argument("file")
    p.add_argument("--depth", type=int, default=32, help="branch indices l, l' < depth")
    p.add_argument("--shift", type=int, default=4, help="shifts |sigma| <= shift")
    p.add_argument("--tol", type=float)
    p.add_argument("--ses1", action="store_true", help="also run the sampled spectral check")
    p.add_argument("--ses-depth", type=int, default=8)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", help="write the machine readable report here")
    p.set_defaults(func=cmd_verify)

    for name, fn in (("synthesize", cmd_synthesize), ("plot", cmd_plot)):
        p = sub.add_parser(name, help="sample the generators on the mesh 2**-J")
        p.add_argument("file")
        p.add_argument("--level", type=int, default=12)
        if name == "synthesize":
            p.add_argument("--format", choices=("csv", "svg"), default="csv")
        p.add_argument("--out")
        p.set_defaults(func=fn)

    p = sub.add_parser("transform", help="apply a constant unitary to the inner function")
    p.add_argument("file")
    p.add_argument("--unitary", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("framecheck", help="partial sums of the frame operator on a test function")
    p.add_argument("file")
    p.add_argument("--f", default="indicator", help="indicator, haar, or a JSON step file")
    p.add_argument("--K", type=int, default=12)
    p.set_defaults(func=cmd_framecheck)

    p = sub.add_parser("classify", help="family tag of the stored inner function")
    p.add_argument("file")
    p.set_defaults(func=cmd_classify)
    return ap


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
