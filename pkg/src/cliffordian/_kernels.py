"""Compiled inner loops for the lattice sums.

Everything runs in the split coordinates of :mod:`cliffordian.algebra`: a
paravector ``p`` corresponds to the quaternion pair ``(p0, p1, p2, -p3)`` and
``(p0, p1, p2, p3)``, and every product of paravectors and their inverses is
computed as two independent quaternion products.  Results come back as eight
split coordinates, first the ``+`` half and then the ``-`` half.

Shells are enumerated by an odometer over the first ``N - 1`` coordinates of
the multi-index; only the canonical half of each shell (first nonzero
coordinate positive) is visited, and its mirror point ``-w`` is handled in the
same step.  Every routine returns one row per shell so that callers can reduce
the rows in shell order, which keeps results independent of how shells are
scheduled.
"""

from __future__ import annotations

import numpy as np
from numba import njit

MODE_COLLAPSED = 0
MODE_WORDS = 1


@njit(cache=True)
def _qmul(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


@njit(cache=True)
def _qinv(a):
    a0, a1, a2, a3 = a
    n2 = a0 * a0 + a1 * a1 + a2 * a2 + a3 * a3
    return (a0 / n2, -a1 / n2, -a2 / n2, -a3 / n2)


@njit(cache=True)
def _qscale(a, t):
    return (a[0] * t, a[1] * t, a[2] * t, a[3] * t)


@njit(cache=True)
def _qadd(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])


@njit(cache=True)
def _qpow(a, n):
    acc = (1.0, 0.0, 0.0, 0.0)
    for _ in range(n):
        acc = _qmul(acc, a)
    return acc


@njit(cache=True)
def _half(v, half):
    """Quaternion image of the paravector ``v`` in split half 0 (+) or 1 (-)."""
    if half == 0:
        return (v[0], v[1], v[2], -v[3])
    return (v[0], v[1], v[2], v[3])


@njit(cache=True)
def _accumulate(acc, comp, base, q, compensated):
    for i in range(4):
        s = acc[base + i]
        v = q[i]
        t = s + v
        if compensated:
            bp = t - s
            comp[base + i] += (s - (t - bp)) + (v - bp)
        acc[base + i] = t


@njit(cache=True)
def _single_term(xq, wq, sgn, mode, nrank, hq, inv_words, inv_len, inv_weight,
                 poly_words, poly_len, poly_weight, qdeg, uh, wz):
    """Contribution of the lattice point ``sgn * w`` in one split half."""
    ws = _qscale(wq, sgn)
    winv = _qinv(ws)
    diff = (xq[0] - ws[0], xq[1] - ws[1], xq[2] - ws[2], xq[3] - ws[3])
    u = _qinv(diff)
    if mode == MODE_COLLAPSED:
        y = _qmul(winv, xq)
        return _qmul(_qpow(y, nrank), u)
    # inverse part: weighted words u h u h ... u (the caller folds (-1)^q into the weights)
    total = (0.0, 0.0, 0.0, 0.0)
    ndir = hq.shape[0]
    for i in range(ndir):
        p = _qmul(u, (hq[i, 0], hq[i, 1], hq[i, 2], hq[i, 3]))
        uh[i, 0] = p[0]
        uh[i, 1] = p[1]
        uh[i, 2] = p[2]
        uh[i, 3] = p[3]
    for wi in range(inv_words.shape[0]):
        acc = u
        for j in range(inv_len - 1, -1, -1):
            d = inv_words[wi, j]
            acc = _qmul((uh[d, 0], uh[d, 1], uh[d, 2], uh[d, 3]), acc)
        total = _qadd(total, _qscale(acc, inv_weight[wi]))
    # polynomial part: (w^-1 z1)(w^-1 z2)...(w^-1 z_mu) w^-1, z = x or a direction
    if poly_words.shape[0] > 0:
        p = _qmul(winv, xq)
        wz[0, 0] = p[0]
        wz[0, 1] = p[1]
        wz[0, 2] = p[2]
        wz[0, 3] = p[3]
        for i in range(ndir):
            p = _qmul(winv, (hq[i, 0], hq[i, 1], hq[i, 2], hq[i, 3]))
            wz[i + 1, 0] = p[0]
            wz[i + 1, 1] = p[1]
            wz[i + 1, 2] = p[2]
            wz[i + 1, 3] = p[3]
        for pi in range(poly_words.shape[0]):
            acc = winv
            for j in range(poly_len[pi] - 1, -1, -1):
                c = poly_words[pi, j]
                acc = _qmul((wz[c, 0], wz[c, 1], wz[c, 2], wz[c, 3]), acc)
            total = _qadd(total, _qscale(acc, poly_weight[pi]))
    return total


@njit(cache=True)
def _next_prefix(idx, m, k):
    """Advance the odometer over ``idx[0:m]`` in ``[-k, k]``; False when done."""
    j = m - 1
    while j >= 0:
        if idx[j] < k:
            idx[j] += 1
            return True
        idx[j] = -k
        j -= 1
    return False


@njit(cache=True)
def _prefix_state(idx, m, k):
    """Return (skip, all_zero, touches_k) for the prefix ``idx[0:m]``."""
    first = 0
    big = False
    for j in range(m):
        if first == 0 and idx[j] != 0:
            first = idx[j]
        if idx[j] == k or idx[j] == -k:
            big = True
    return first < 0, first == 0, big


@njit(cache=True)
def shell_indices(nrank, k):
    """Canonical-half multi-indices of shell ``k`` in enumeration order."""
    m = nrank - 1
    count = ((2 * k + 1) ** nrank - (2 * k - 1) ** nrank) // 2
    out = np.empty((count, nrank), dtype=np.int64)
    idx = np.full(nrank, -k, dtype=np.int64)
    pos = 0
    more = True
    while more:
        skip, zero, big = _prefix_state(idx, m, k)
        if not skip:
            if zero:
                lo, hi, stride = k, k, 1
            elif big:
                lo, hi, stride = -k, k, 1
            else:
                lo, hi, stride = -k, k, 2 * k
            last = lo
            while last <= hi:
                for j in range(m):
                    out[pos, j] = idx[j]
                out[pos, m] = last
                pos += 1
                last += stride
        more = _next_prefix(idx, m, k) if m > 0 else False
    return out


@njit(cache=True)
def _collapsed_pair(xq, wq, nrank, paired, acc, comp, base, compensated):
    """Add the collapsed terms of ``w`` and ``-w``: ``y^N [(x-w)^-1 + (-1)^N (x+w)^-1]``."""
    y = _qmul(_qinv(wq), xq)
    yn = _qpow(y, nrank)
    u1 = _qinv((xq[0] - wq[0], xq[1] - wq[1], xq[2] - wq[2], xq[3] - wq[3]))
    u2 = _qinv((xq[0] + wq[0], xq[1] + wq[1], xq[2] + wq[2], xq[3] + wq[3]))
    sgn = 1.0 if nrank % 2 == 0 else -1.0
    if paired:
        v = _qmul(yn, (u1[0] + sgn * u2[0], u1[1] + sgn * u2[1],
                       u1[2] + sgn * u2[2], u1[3] + sgn * u2[3]))
        _accumulate(acc, comp, base, v, compensated)
    else:
        _accumulate(acc, comp, base, _qmul(yn, u1), compensated)
        _accumulate(acc, comp, base, _qscale(_qmul(yn, u2), sgn), compensated)


@njit(cache=True)
def near_shells(x, periods, k_lo, k_hi, mode, paired, compensated, dirs,
                inv_words, inv_weight, poly_words, poly_len, poly_weight):
    """Per-shell sums of the series terms for shells ``k_lo..k_hi``.

    ``periods`` holds the full periods ``2 omega_j`` as columns.  Returns the
    rounded sums, their compensation terms and the smallest ``|w|`` per shell.
    """
    nrank = periods.shape[1]
    nsh = k_hi - k_lo + 1
    sums = np.zeros((nsh, 8))
    comps = np.zeros((nsh, 8))
    minnorm = np.full(nsh, np.inf)
    qdeg = dirs.shape[0]
    inv_len = inv_words.shape[1]
    hq = np.empty((2, qdeg, 4))
    for half in range(2):
        for d in range(qdeg):
            h = _half(dirs[d], half)
            for i in range(4):
                hq[half, d, i] = h[i]
    uh = np.empty((max(qdeg, 1), 4))
    wz = np.empty((qdeg + 1, 4))
    acc = np.zeros(8)
    comp = np.zeros(8)
    for s in range(nsh):
        k = k_lo + s
        idxs = shell_indices(nrank, k)
        acc[:] = 0.0
        comp[:] = 0.0
        mn = np.inf
        for p in range(idxs.shape[0]):
            w0 = 0.0
            w1 = 0.0
            w2 = 0.0
            w3 = 0.0
            for j in range(nrank):
                c = float(idxs[p, j])
                w0 += c * periods[0, j]
                w1 += c * periods[1, j]
                w2 += c * periods[2, j]
                w3 += c * periods[3, j]
            nw = np.sqrt(w0 * w0 + w1 * w1 + w2 * w2 + w3 * w3)
            if nw < mn:
                mn = nw
            for half in range(2):
                sg = -1.0 if half == 0 else 1.0
                xq = (x[0], x[1], x[2], sg * x[3])
                wq = (w0, w1, w2, sg * w3)
                if mode == MODE_COLLAPSED:
                    _collapsed_pair(xq, wq, nrank, paired, acc, comp, 4 * half, compensated)
                    continue
                plus = _single_term(xq, wq, 1.0, mode, nrank, hq[half], inv_words, inv_len,
                                    inv_weight, poly_words, poly_len, poly_weight, qdeg, uh, wz)
                minus = _single_term(xq, wq, -1.0, mode, nrank, hq[half], inv_words, inv_len,
                                     inv_weight, poly_words, poly_len, poly_weight, qdeg, uh, wz)
                if paired:
                    _accumulate(acc, comp, 4 * half, _qadd(plus, minus), compensated)
                else:
                    _accumulate(acc, comp, 4 * half, plus, compensated)
                    _accumulate(acc, comp, 4 * half, minus, compensated)
        sums[s] = acc
        comps[s] = comp
        minnorm[s] = mn
    return sums, comps, minnorm


@njit(cache=True)
def direct_p0_shells(x, periods, k_lo, k_hi, compensated):
    """Per-shell sums of ``(x-w)^-4 + (x+w)^-4 - 2 w^-4`` over canonical points."""
    nrank = periods.shape[1]
    nsh = k_hi - k_lo + 1
    sums = np.zeros((nsh, 8))
    comps = np.zeros((nsh, 8))
    minnorm = np.full(nsh, np.inf)
    w = np.empty(4)
    for s in range(nsh):
        k = k_lo + s
        idxs = shell_indices(nrank, k)
        acc = sums[s]
        comp = comps[s]
        for p in range(idxs.shape[0]):
            for i in range(4):
                w[i] = 0.0
            for j in range(nrank):
                c = float(idxs[p, j])
                for i in range(4):
                    w[i] += c * periods[i, j]
            nw = np.sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[3] * w[3])
            if nw < minnorm[s]:
                minnorm[s] = nw
            for half in range(2):
                xq = _half(x, half)
                wq = _half(w, half)
                a = _qinv((xq[0] - wq[0], xq[1] - wq[1], xq[2] - wq[2], xq[3] - wq[3]))
                b = _qinv((xq[0] + wq[0], xq[1] + wq[1], xq[2] + wq[2], xq[3] + wq[3]))
                c4 = _qinv(wq)
                a2 = _qmul(a, a)
                b2 = _qmul(b, b)
                c2 = _qmul(c4, c4)
                val = _qadd(_qadd(_qmul(a2, a2), _qmul(b2, b2)), _qscale(_qmul(c2, c2), -2.0))
                _accumulate(acc, comp, 4 * half, val, compensated)
    return sums, comps, minnorm


@njit(cache=True)
def moment_shells(periods, k_lo, k_hi, degrees):
    """Per-shell sums of ``w^a / |w|^(2|a|)`` over canonical points.

    For each entry ``m`` of ``degrees`` there is one column per multi-index
    ``a`` of length ``m``, ordered with ``a0`` descending, then ``a1``, then
    ``a2``; blocks follow the order of ``degrees``.  Writing ``v = w/|w|^2``
    the summand is just the monomial ``v^a``.
    """
    nrank = periods.shape[1]
    nsh = k_hi - k_lo + 1
    maxd = 0
    ncol = 0
    for m in degrees:
        ncol += (m + 1) * (m + 2) * (m + 3) // 6
        if m > maxd:
            maxd = m
    sums = np.zeros((nsh, ncol))
    minnorm = np.full(nsh, np.inf)
    row = np.zeros(ncol)
    p = np.empty((4, maxd + 1))
    for s in range(nsh):
        idxs = shell_indices(nrank, k_lo + s)
        row[:] = 0.0
        mn = np.inf
        for q in range(idxs.shape[0]):
            w0 = 0.0
            w1 = 0.0
            w2 = 0.0
            w3 = 0.0
            for j in range(nrank):
                c = float(idxs[q, j])
                w0 += c * periods[0, j]
                w1 += c * periods[1, j]
                w2 += c * periods[2, j]
                w3 += c * periods[3, j]
            r2 = w0 * w0 + w1 * w1 + w2 * w2 + w3 * w3
            nw = np.sqrt(r2)
            if nw < mn:
                mn = nw
            ir = 1.0 / r2
            v0 = w0 * ir
            v1 = w1 * ir
            v2 = w2 * ir
            v3 = w3 * ir
            p[0, 0] = 1.0
            p[1, 0] = 1.0
            p[2, 0] = 1.0
            p[3, 0] = 1.0
            for e in range(1, maxd + 1):
                p[0, e] = p[0, e - 1] * v0
                p[1, e] = p[1, e - 1] * v1
                p[2, e] = p[2, e - 1] * v2
                p[3, e] = p[3, e - 1] * v3
            t = 0
            for m in degrees:
                for a0 in range(m, -1, -1):
                    for a1 in range(m - a0, -1, -1):
                        f01 = p[0, a0] * p[1, a1]
                        rest = m - a0 - a1
                        for a2 in range(rest, -1, -1):
                            row[t] += f01 * p[2, a2] * p[3, rest - a2]
                            t += 1
        sums[s] = row
        minnorm[s] = mn
    return sums, minnorm
