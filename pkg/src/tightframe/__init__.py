"""Tight wavelet frames with generators supported in [0, 1], built from
Haar coefficients and 2x2 inner functions on the Hardy space."""
from .frame_builder import (FrameCoeffs, assemble, build_frame, from_psi, psi_address,
                            reflect, synthesize, tail_energy)
from .haar_core import DyadicStep, ExactDyadicValue, alpha, alpha_oracle, haar_K, haar_L
from .hardy_inner import (CoeffSeq, build_spec, classify, hplus_inner, taylor_coeffs,
                          unitary_transform)
from .report import ConditionReport
from .verifier import check_h1, check_prophv, check_r1, check_ses1, frame_sum

__all__ = [
    "CoeffSeq", "ConditionReport", "DyadicStep", "ExactDyadicValue", "FrameCoeffs",
    "alpha", "alpha_oracle", "assemble", "build_frame", "build_spec", "check_h1",
    "check_prophv", "check_r1", "check_ses1", "classify", "frame_sum", "from_psi",
    "haar_K", "haar_L", "hplus_inner", "psi_address", "reflect", "synthesize",
    "tail_energy", "taylor_coeffs", "unitary_transform",
]
