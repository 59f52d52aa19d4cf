"""Split-radix FFT over the last axis, with an optional operation counter."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit


@dataclass
class OpCounter:
    """Real additions and multiplications of one transform.

    A complex addition is two real additions. A general twiddle costs four
    multiplications and two additions; the eighth-turn twiddles
    (±1 ± j)/√2 cost two of each; ±1 and ±j are free.
    """

    adds: int = 0
    mults: int = 0


def _twiddle_cost(w: np.ndarray):
    """Real (adds, mults) of multiplying by each twiddle value in w."""
    re, im = np.abs(w.real), np.abs(w.imag)
    tiny = 1e-12
    trivial = (re < tiny) | (im < tiny)
    eighth = ~trivial & (np.abs(re - im) < tiny)
    general = ~trivial & ~eighth
    return 2 * int(eighth.sum()) + 2 * int(general.sum()), 2 * int(eighth.sum()) + 4 * int(general.sum())


@dataclass(frozen=True, eq=False)
class _Plan:
    """Recursion tree of one transform size, flattened by sub-transform size.

    Sizes run 1, 2, 4, ..., n. The outputs of all nodes of size s live in
    one contiguous workspace slab starting at base[i] for s = 2**i.
    Level arrays hold, per node of size m ≥ 4, the child indices of its
    half-size transform and its two quarter-size transforms.
    """

    n: int
    base: np.ndarray
    leaf1: np.ndarray
    leaf2: np.ndarray
    child_u: np.ndarray
    child_z: np.ndarray
    child_zp: np.ndarray
    level_start: np.ndarray
    tw1: np.ndarray
    tw3: np.ndarray
    tw_start: np.ndarray
    work: int
    adds: int
    mults: int


@lru_cache(maxsize=None)
def _plan(n: int) -> _Plan:
    nodes = {}
    children = {}

    def visit(size, off, stride):
        lst = nodes.setdefault(size, [])
        idx = len(lst)
        lst.append((off, stride))
        if size >= 4:
            u = visit(size // 2, off, 2 * stride)
            z = visit(size // 4, off + stride, 4 * stride)
            zp = visit(size // 4, off + 3 * stride, 4 * stride)
            children.setdefault(size, []).append((idx, u, z, zp))
        return idx

    visit(n, 0, 1)
    n_levels = n.bit_length()
    base = np.zeros(n_levels + 1, dtype=np.int64)
    for i in range(n_levels):
        base[i + 1] = base[i] + len(nodes.get(2**i, [])) * 2**i
    leaf1 = np.array([o for o, _ in nodes.get(1, [])], dtype=np.int64)
    leaf2 = np.array(nodes.get(2, []), dtype=np.int64).reshape(-1, 2)
    cu, cz, czp, starts, tw1, tw3, tws = [], [], [], [0], [], [], [0]
    adds = 4 * len(leaf2)
    mults = 0
    m = 4
    while m <= n:
        ch = sorted(children[m])
        cu += [c[1] for c in ch]
        cz += [c[2] for c in ch]
        czp += [c[3] for c in ch]
        starts.append(len(cu))
        k = np.arange(m // 4)
        w1, w3 = np.exp(-2j * np.pi * k / m), np.exp(-6j * np.pi * k / m)
        tw1.append(w1)
        tw3.append(w3)
        tws.append(tws[-1] + m // 4)
        for w in (w1, w3):
            da, dm = _twiddle_cost(w)
            adds += len(ch) * da
            mults += len(ch) * dm
        # s, t1 − t2 and the four outputs: six complex additions per k
        adds += len(ch) * 12 * (m // 4)
        m *= 2
    cat = lambda a: np.concatenate(a) if a else np.zeros(0, dtype=complex)
    return _Plan(n, base, leaf1, leaf2, np.array(cu, dtype=np.int64), np.array(cz, dtype=np.int64),
                 np.array(czp, dtype=np.int64), np.array(starts, dtype=np.int64), cat(tw1), cat(tw3),
                 np.array(tws, dtype=np.int64), int(base[-1]), adds, mults)


@njit(cache=True)
def _execute(x, n, base, leaf1, leaf2, cu, cz, czp, level_start, tw1, tw3, tw_start, work):
    nb = x.shape[0]
    out = np.empty((nb, n), dtype=np.complex128)
    ws = np.empty(work, dtype=np.complex128)
    for b in range(nb):
        for j in range(leaf1.size):
            ws[base[0] + j] = x[b, leaf1[j]]
        for j in range(leaf2.shape[0]):
            a = x[b, leaf2[j, 0]]
            c = x[b, leaf2[j, 0] + leaf2[j, 1]]
            ws[base[1] + 2 * j] = a + c
            ws[base[1] + 2 * j + 1] = a - c
        lvl = 2
        m = 4
        while m <= n:
            q = m // 4
            bu = base[lvl - 1]
            bz = base[lvl - 2]
            bo = base[lvl]
            tws = tw_start[lvl - 2]
            li = lvl - 2
            for node in range(level_start[li + 1] - level_start[li]):
                g = level_start[li] + node
                pu = bu + cu[g] * (m // 2)
                pz = bz + cz[g] * q
                pzp = bz + czp[g] * q
                po = bo + node * m
                for k in range(q):
                    t1 = tw1[tws + k] * ws[pz + k]
                    t2 = tw3[tws + k] * ws[pzp + k]
                    s = t1 + t2
                    d = t1 - t2
                    d = complex(d.imag, -d.real)
                    u0 = ws[pu + k]
                    u1 = ws[pu + q + k]
                    ws[po + k] = u0 + s
                    ws[po + 2 * q + k] = u0 - s
                    ws[po + q + k] = u1 + d
                    ws[po + 3 * q + k] = u1 - d
            lvl += 1
            m *= 2
        top = base[lvl - 1]
        for k in range(n):
            out[b, k] = ws[top + k]
    return out


def split_radix_fft(x, counter: OpCounter | None = None) -> np.ndarray:
    """DFT of each row of x (last axis length a power of two)."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    if n < 1 or n & (n - 1):
        raise ValueError("transform length must be a power of two")
    shape = x.shape
    rows = np.ascontiguousarray(x.reshape(-1, n))
    if n == 1:
        return x.copy()
    p = _plan(n)
    if counter is not None:
        counter.adds += p.adds
        counter.mults += p.mults
    y = _execute(rows, n, p.base, p.leaf1, p.leaf2, p.child_u, p.child_z, p.child_zp,
                 p.level_start, p.tw1, p.tw3, p.tw_start, p.work)
    return y.reshape(shape)
