"""Vectorized numpy implementations of the hot numeric kernels.

Every function here has a twin in ``_numba.py`` with the same signature and
the same algorithm, written as scalar loops. The two are checked against each
other in the test suite.
"""

import math

import numpy as np
from scipy.special import gammaln

EULER_GAMMA = 0.57721566490153286061
SERIES_MAX = 12.0
MILLER_ACC = 160.0
_BIG = 1e250
_TWO_OVER_PI = 2.0 / math.pi


def miller_start(nu_max, x_max):
    n = max(nu_max, int(math.ceil(x_max)))
    m = n + int(math.sqrt(MILLER_ACC * max(n, 1))) + 10
    return 2 * ((m + 1) // 2)


def _series_table(nu_max, x):
    h = 0.5 * x
    q = h * h
    out = np.empty((x.size, nu_max + 1))
    with np.errstate(divide="ignore"):
        logh = np.log(h)
    for nu in range(nu_max + 1):
        if nu == 0:
            lead = np.ones_like(x)
        else:
            lead = np.where(x > 0.0, np.exp(nu * np.where(x > 0.0, logh, 0.0) - gammaln(nu + 1.0)), 0.0)
        term = lead.copy()
        acc = lead.copy()
        for k in range(1, 200):
            term = -term * q / (k * (k + nu))
            acc += term
            if k > 6.0 and np.all(np.abs(term) < 1e-18):
                break
        out[:, nu] = acc
    return out


def _miller_table(nu_max, x):
    m = miller_start(nu_max, float(x.max()))
    out = np.zeros((x.size, nu_max + 1))
    jp1 = np.zeros_like(x)
    j = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    for k in range(m, 0, -1):
        jm1 = (2.0 * k / x) * j - jp1
        jp1 = j
        j = jm1
        order = k - 1
        if order <= nu_max:
            out[:, order] = j
        if order > 0 and order % 2 == 0:
            norm += 2.0 * j
        big = np.abs(j) > _BIG
        if big.any():
            j[big] /= _BIG
            jp1[big] /= _BIG
            norm[big] /= _BIG
            out[big] /= _BIG
    norm += j
    return out / norm[:, None]


def bessel_j_table(nu_max, x):
    """J_0..J_nu_max at every x (flat, non-negative); returns shape (x.size, nu_max + 1)."""
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    out = np.empty((x.size, nu_max + 1))
    small = x <= SERIES_MAX
    if small.any():
        out[small] = _series_table(nu_max, x[small])
    if (~small).any():
        out[~small] = _miller_table(nu_max, x[~small])
    return out


def _asymptotic_pq(order, x):
    """Hankel asymptotic P, Q sums for real or complex x, truncated at the smallest term."""
    mu = 4.0 * order * order
    p = np.ones_like(x)
    q = np.zeros_like(x)
    coef = 1.0
    prev = np.full(x.shape, np.inf)
    active = np.ones(x.shape, dtype=bool)
    inv = 1.0 / x
    power = np.ones_like(x)
    for k in range(1, 60):
        coef *= (mu - (2 * k - 1) ** 2) / (k * 8.0)
        power = power * inv
        term = coef * power
        mag = np.abs(term)
        active &= mag < prev
        prev = mag
        if not active.any():
            break
        sign = -1.0 if (k // 2) % 2 else 1.0
        contrib = np.where(active, sign * term, 0.0)
        if k % 2 == 0:
            p = p + contrib
        else:
            q = q + contrib
        active &= mag > 1e-17
    return p, q


def bessel_y01(x):
    """Y_0 and Y_1 at every x > 0 (flat real array)."""
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    y0 = np.empty_like(x)
    y1 = np.empty_like(x)
    small = x <= SERIES_MAX
    if small.any():
        xs = x[small]
        h = 0.5 * xs
        q = h * h
        jt = _series_table(1, xs)
        lg = np.log(h)
        # Y0 tail: sum_{k>=1} (-1)^(k+1) H_k q^k / (k!)^2
        term = np.ones_like(xs)
        harm = 0.0
        tail0 = np.zeros_like(xs)
        # Y1 tail: sum_{k>=0} (-1)^k (psi(k+1) + psi(k+2)) h^(2k+1) / (k!(k+1)!)
        t1 = h.copy()
        tail1 = (-EULER_GAMMA + (1.0 - EULER_GAMMA)) * t1
        for k in range(1, 200):
            harm += 1.0 / k
            term = -term * q / (k * k)
            tail0 -= harm * term
            t1 = -t1 * q / (k * (k + 1))
            psi_sum = (harm - EULER_GAMMA) + (harm + 1.0 / (k + 1) - EULER_GAMMA)
            tail1 += psi_sum * t1
            if k > 6 and np.all(np.abs(term) * (harm + 1.0) < 1e-18) and np.all(np.abs(t1) * (2 * harm + 2) < 1e-18):
                break
        y0[small] = _TWO_OVER_PI * ((lg + EULER_GAMMA) * jt[:, 0] + tail0)
        y1[small] = _TWO_OVER_PI * lg * jt[:, 1] - _TWO_OVER_PI / xs - tail1 / math.pi
    if (~small).any():
        xl = x[~small]
        amp = np.sqrt(_TWO_OVER_PI / xl)
        for order, dest in ((0, y0), (1, y1)):
            p, q = _asymptotic_pq(order, xl)
            chi = xl - (0.5 * order + 0.25) * math.pi
            dest[~small] = amp * (p * np.sin(chi) + q * np.cos(chi))
    return y0, y1


def hankel1_0(z):
    """H_0^(1) at every complex z with Re(z) > 0 (flat array)."""
    z = np.ascontiguousarray(z, dtype=np.complex128).ravel()
    out = np.empty_like(z)
    small = np.abs(z) <= SERIES_MAX
    if small.any():
        zs = z[small]
        q = 0.25 * zs * zs
        term = np.ones_like(zs)
        j0 = np.ones_like(zs)
        tail = np.zeros_like(zs)
        harm = 0.0
        for k in range(1, 200):
            harm += 1.0 / k
            term = -term * q / (k * k)
            j0 += term
            tail -= harm * term
            if k > 6 and np.all(np.abs(term) * (harm + 1.0) < 1e-18):
                break
        y0 = _TWO_OVER_PI * ((np.log(0.5 * zs) + EULER_GAMMA) * j0 + tail)
        out[small] = j0 + 1j * y0
    if (~small).any():
        zl = z[~small]
        p, q = _asymptotic_pq(0, zl)
        # sum_k i^k a_k / z^k = P + iQ
        out[~small] = np.sqrt(_TWO_OVER_PI / zl) * np.exp(1j * (zl - 0.25 * math.pi)) * (p + 1j * q)
    return out


def residual_sums(jtab, phi, thetas):
    """Bessel residual double sums and their sign-flipped companions.

    For each point p with J-table row ``jtab[p]`` (orders 0..nu_max), returns
    S = sum_n sum_{0<|v|<=nu_max} i^v J_v e^{i v (theta_n - phi_p)} and
    S' = sum_n sum_{0<|v|<=nu_max} (-i)^v J_v e^{-i v (theta_n - phi_p)},
    with negative orders taken by reflection J_{-v} = (-1)^v J_v.
    """
    nu_max = jtab.shape[1] - 1
    alpha = thetas[None, :] - phi[:, None]
    base = np.exp(1j * alpha)
    power = np.ones_like(base)
    s = np.zeros(phi.shape, dtype=np.complex128)
    sp = np.zeros(phi.shape, dtype=np.complex128)
    ipow = 1.0 + 0j
    for nu in range(1, nu_max + 1):
        power = power * base
        e_pos = power.sum(axis=1)
        e_neg = np.conj(power).sum(axis=1)
        ipow = ipow * 1j
        refl = -1.0 if nu % 2 else 1.0
        jn = jtab[:, nu]
        # +v and -v for S: i^v J_v e^{iva} + i^{-v} J_{-v} e^{-iva}
        s += ipow * jn * e_pos + (1.0 / ipow) * (refl * jn) * e_neg
        # S': (-i)^v J_v e^{-iva} + (-i)^{-v} J_{-v} e^{iva}
        mip = np.conj(ipow)
        sp += mip * jn * e_neg + (1.0 / mip) * (refl * jn) * e_pos
    return s, sp
