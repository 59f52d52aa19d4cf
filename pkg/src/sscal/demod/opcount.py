from dataclasses import dataclass
from fractions import Fraction
from math import log2


@dataclass(frozen=True)
class OpCount:
    adds: Fraction
    mults: Fraction
    total: Fraction
    latency: int


def ipdft_block_ops(P: int):
    """Closed-form (adds, mults) per block of the interpolated-DFT stage."""
    m = int(log2(P))
    if 2**m != P:
        raise ValueError("P must be a power of two")
    sign = Fraction((-1) ** m)
    adds = P * (Fraction(4, 3) * m - Fraction(8, 9)) - Fraction(1, 9) * sign
    mults = P * (Fraction(2, 3) * m - Fraction(19, 9)) + Fraction(1, 9) * sign
    return adds, mults


def count_ops(method: str, H: int = 17, L: int = 1024, P: int = 32) -> OpCount:
    """Arithmetic cost of FIR-Hilbert or block IpDFT phase extraction over L samples."""
    if method == "hilbert":
        if H <= 0 or L <= 0:
            raise ValueError("H and L must be positive")
        return OpCount(Fraction(H), Fraction(H), Fraction(2 * H * L), H)
    if method == "ipdft":
        if L <= 0:
            raise ValueError("L must be positive")
        adds, mults = ipdft_block_ops(P)
        m = int(log2(P))
        total = Fraction(L, P) * (2 * P * m - 3 * P)
        return OpCount(adds, mults, total, m)
    raise ValueError(f"unknown method {method!r}")
