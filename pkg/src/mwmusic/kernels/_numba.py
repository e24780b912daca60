"""numba-compiled scalar-loop twins of the kernels in ``_numpy.py``."""

import math

import numpy as np
from numba import njit

from ._numpy import EULER_GAMMA, MILLER_ACC, SERIES_MAX

_BIG = 1e250
_TWO_OVER_PI = 2.0 / math.pi


@njit(cache=True)
def _miller_start(nu_max, x_max):
    n = max(nu_max, int(math.ceil(x_max)))
    m = n + int(math.sqrt(MILLER_ACC * max(n, 1))) + 10
    return 2 * ((m + 1) // 2)


@njit(cache=True)
def _series_row(nu_max, x, row):
    h = 0.5 * x
    q = h * h
    for nu in range(nu_max + 1):
        if nu == 0:
            lead = 1.0
        elif x > 0.0:
            lead = math.exp(nu * math.log(h) - math.lgamma(nu + 1.0))
        else:
            lead = 0.0
        term = lead
        acc = lead
        for k in range(1, 200):
            term = -term * q / (k * (k + nu))
            acc += term
            if k > 6 and abs(term) < 1e-18:
                break
        row[nu] = acc


@njit(cache=True)
def _miller_row(nu_max, x, m, row):
    for i in range(nu_max + 1):
        row[i] = 0.0
    jp1 = 0.0
    j = 1e-30
    norm = 0.0
    for k in range(m, 0, -1):
        jm1 = (2.0 * k / x) * j - jp1
        jp1 = j
        j = jm1
        order = k - 1
        if order <= nu_max:
            row[order] = j
        if order > 0 and order % 2 == 0:
            norm += 2.0 * j
        if abs(j) > _BIG:
            j /= _BIG
            jp1 /= _BIG
            norm /= _BIG
            for i in range(nu_max + 1):
                row[i] /= _BIG
    norm += j
    for i in range(nu_max + 1):
        row[i] /= norm


@njit(cache=True)
def bessel_j_table(nu_max, x):
    x = x.ravel()
    out = np.empty((x.size, nu_max + 1))
    x_max = 0.0
    for p in range(x.size):
        x_max = max(x_max, x[p])
    m = _miller_start(nu_max, x_max)
    for p in range(x.size):
        if x[p] <= SERIES_MAX:
            _series_row(nu_max, x[p], out[p])
        else:
            _miller_row(nu_max, x[p], m, out[p])
    return out


@njit(cache=True)
def _asymptotic_pq(order, x):
    mu = 4.0 * order * order
    p = 1.0 + 0.0 * x
    q = 0.0 * x
    coef = 1.0
    prev = np.inf
    power = 1.0 + 0.0 * x
    for k in range(1, 60):
        coef *= (mu - (2 * k - 1) ** 2) / (k * 8.0)
        power = power / x
        term = coef * power
        mag = abs(term)
        if mag >= prev:
            break
        prev = mag
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sign * term
        else:
            q += sign * term
        if mag <= 1e-17:
            break
    return p, q


@njit(cache=True)
def _y01_scalar(x):
    if x <= SERIES_MAX:
        h = 0.5 * x
        q = h * h
        lg = math.log(h)
        j0 = 1.0
        term = 1.0
        j1 = h
        t1 = h
        harm = 0.0
        tail0 = 0.0
        tail1 = (1.0 - 2.0 * EULER_GAMMA) * h
        for k in range(1, 200):
            harm += 1.0 / k
            term = -term * q / (k * k)
            j0 += term
            tail0 -= harm * term
            t1 = -t1 * q / (k * (k + 1))
            j1 += t1
            tail1 += ((harm - EULER_GAMMA) + (harm + 1.0 / (k + 1) - EULER_GAMMA)) * t1
            if k > 6 and abs(term) * (harm + 1.0) < 1e-18 and abs(t1) * (2 * harm + 2) < 1e-18:
                break
        y0 = _TWO_OVER_PI * ((lg + EULER_GAMMA) * j0 + tail0)
        y1 = _TWO_OVER_PI * lg * j1 - _TWO_OVER_PI / x - tail1 / math.pi
        return y0, y1
    amp = math.sqrt(_TWO_OVER_PI / x)
    p0, q0 = _asymptotic_pq(0, x)
    chi0 = x - 0.25 * math.pi
    p1, q1 = _asymptotic_pq(1, x)
    chi1 = x - 0.75 * math.pi
    return (amp * (p0 * math.sin(chi0) + q0 * math.cos(chi0)),
            amp * (p1 * math.sin(chi1) + q1 * math.cos(chi1)))


@njit(cache=True)
def bessel_y01(x):
    x = x.ravel()
    y0 = np.empty(x.size)
    y1 = np.empty(x.size)
    for p in range(x.size):
        y0[p], y1[p] = _y01_scalar(x[p])
    return y0, y1


@njit(cache=True)
def _hankel_scalar(z):
    if abs(z) <= SERIES_MAX:
        q = 0.25 * z * z
        term = 1.0 + 0.0j
        j0 = 1.0 + 0.0j
        tail = 0.0j
        harm = 0.0
        for k in range(1, 200):
            harm += 1.0 / k
            term = -term * q / (k * k)
            j0 += term
            tail -= harm * term
            if k > 6 and abs(term) * (harm + 1.0) < 1e-18:
                break
        y0 = _TWO_OVER_PI * ((np.log(0.5 * z) + EULER_GAMMA) * j0 + tail)
        return j0 + 1j * y0
    p, q = _asymptotic_pq(0, z)
    return np.sqrt(_TWO_OVER_PI / z) * np.exp(1j * (z - 0.25 * math.pi)) * (p + 1j * q)


@njit(cache=True)
def hankel1_0(z):
    z = z.ravel()
    out = np.empty(z.size, dtype=np.complex128)
    for p in range(z.size):
        out[p] = _hankel_scalar(z[p])
    return out


@njit(cache=True)
def residual_sums(jtab, phi, thetas):
    npts = phi.size
    nu_max = jtab.shape[1] - 1
    nant = thetas.size
    s = np.zeros(npts, dtype=np.complex128)
    sp = np.zeros(npts, dtype=np.complex128)
    base = np.empty(nant, dtype=np.complex128)
    power = np.empty(nant, dtype=np.complex128)
    for p in range(npts):
        for n in range(nant):
            base[n] = np.exp(1j * (thetas[n] - phi[p]))
            power[n] = 1.0
        acc = 0.0j
        acc_c = 0.0j
        ipow = 1.0 + 0.0j
        for nu in range(1, nu_max + 1):
            e_pos = 0.0j
            e_neg = 0.0j
            for n in range(nant):
                power[n] = power[n] * base[n]
                e_pos += power[n]
                e_neg += power[n].conjugate()
            ipow = ipow * 1j
            refl = -1.0 if nu % 2 else 1.0
            jn = jtab[p, nu]
            acc += ipow * jn * e_pos + (1.0 / ipow) * (refl * jn) * e_neg
            mip = ipow.conjugate()
            acc_c += mip * jn * e_neg + (1.0 / mip) * (refl * jn) * e_pos
        s[p] = acc
        sp[p] = acc_c
    return s, sp
