"""Numerical kernels: backward Riccati sweeps, joint moment/cost ODE
integration, and Euler-Maruyama stepping.

Plain-array code, jitted with numba when available; without numba the same
functions run as pure Python (identical semantics, slower).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


@njit(cache=True)
def riccati_backward(A, B, Qq, Sq, Rq, pq, qq, M, m_bar, nf, h, blow_up):
    """Backward RK4 sweep for the scalar Riccati pair.

    Coefficients are tabulated at quarter resolution (4*nf+1 points) so that
    every RK4 stage of both sweeps lands on a tabulated node: P marches at
    step h/2 (stages at quarter nodes) and eta at step h (stages at half
    nodes, where P is exact rather than interpolated).

    Returns (P_half, eta, p_blow, e_blow): P on the 2*nf+1 half nodes, eta on
    the nf+1 grid nodes, and the first node index at which |P| (half nodes)
    resp. |eta| (grid nodes) exceeded blow_up, or -1 for a clean sweep.
    """
    nh = 2 * nf
    P = np.zeros(nh + 1)
    P[nh] = M
    hp = 0.5 * h
    p_blow = -1
    for j in range(nh, 0, -1):
        Pj = P[j]
        i2 = 2 * j
        i1 = 2 * j - 1
        i0 = 2 * j - 2
        k1 = (B * Pj + Sq[i2]) ** 2 / Rq[i2] - 2.0 * A * Pj - Qq[i2]
        y = Pj - 0.5 * hp * k1
        k2 = (B * y + Sq[i1]) ** 2 / Rq[i1] - 2.0 * A * y - Qq[i1]
        y = Pj - 0.5 * hp * k2
        k3 = (B * y + Sq[i1]) ** 2 / Rq[i1] - 2.0 * A * y - Qq[i1]
        y = Pj - hp * k3
        k4 = (B * y + Sq[i0]) ** 2 / Rq[i0] - 2.0 * A * y - Qq[i0]
        Pn = Pj - hp / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        P[j - 1] = Pn
        if not np.isfinite(Pn) or abs(Pn) > blow_up:
            p_blow = j - 1
            break
    eta = np.zeros(nf + 1)
    e_blow = -1
    if p_blow < 0:
        eta[nf] = m_bar
        for j in range(nf, 0, -1):
            ej = eta[j]
            q2 = 4 * j
            q1 = 4 * j - 2
            q0 = 4 * j - 4
            G = (B * P[2 * j] + Sq[q2]) / Rq[q2]
            k1 = -(A - G * B) * ej - pq[q2] + G * qq[q2]
            G = (B * P[2 * j - 1] + Sq[q1]) / Rq[q1]
            y = ej - 0.5 * h * k1
            k2 = -(A - G * B) * y - pq[q1] + G * qq[q1]
            y = ej - 0.5 * h * k2
            k3 = -(A - G * B) * y - pq[q1] + G * qq[q1]
            G = (B * P[2 * j - 2] + Sq[q0]) / Rq[q0]
            y = ej - h * k3
            k4 = -(A - G * B) * y - pq[q0] + G * qq[q0]
            en = ej - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            eta[j - 1] = en
            if not np.isfinite(en) or abs(en) > blow_up:
                e_blow = j - 1
                break
    return P, eta, p_blow, e_blow


@njit(cache=True)
def moment_cost(
    a1,
    a00,
    a01,
    b2,
    b10,
    b11,
    b00,
    b01,
    b02,
    c2,
    c10,
    c11,
    c00,
    c01,
    c02,
    zeta,
    h,
    x0,
    M,
    mbar2,
):
    """Integrate the first two conditional moments and the running cost jointly.

    The moment system is linear,

        m1' = a1 m1 + a0,   m2' = b2 m2 + b1 m1 + b0,   C' = c2 m2 + c1 m1 + c0,

    where the coefficients a0, b1, b0, c1, c0 depend (at most quadratically)
    on the frozen execution draw of the current step:

        a0 = a00 + a01 z,  b1 = b10 + b11 z,  b0 = b00 + b01 z + b02 z^2,
        c1 = c10 + c11 z,  c0 = c00 + c01 z + c02 z^2.

    Coefficient arrays are tabulated at half resolution (2*nf+1 nodes for nf
    steps of size h) so the RK4 stages read exact values; zeta holds one draw
    per step, constant inside the step, which keeps every jump of the
    execution noise on a step boundary.

    Returns (m1_path, m2_path, total_cost, min_gap) where total_cost includes
    the terminal M*m2_T + mbar2*m1_T and min_gap = min_t (m2 - m1^2).
    """
    nf = zeta.shape[0]
    m1s = np.empty(nf + 1)
    m2s = np.empty(nf + 1)
    m1 = x0
    m2 = x0 * x0
    m1s[0] = m1
    m2s[0] = m2
    C = 0.0
    min_gap = m2 - m1 * m1
    for j in range(nf):
        z = zeta[j]
        z2 = z * z
        i0 = 2 * j
        i1 = 2 * j + 1
        i2 = 2 * j + 2
        # stage 1 (left node)
        d1a = a1[i0] * m1 + a00[i0] + a01[i0] * z
        d2a = b2[i0] * m2 + (b10[i0] + b11[i0] * z) * m1 + b00[i0] + b01[i0] * z + b02[i0] * z2
        dca = c2[i0] * m2 + (c10[i0] + c11[i0] * z) * m1 + c00[i0] + c01[i0] * z + c02[i0] * z2
        # stage 2 (midpoint)
        u1 = m1 + 0.5 * h * d1a
        u2 = m2 + 0.5 * h * d2a
        d1b = a1[i1] * u1 + a00[i1] + a01[i1] * z
        d2b = b2[i1] * u2 + (b10[i1] + b11[i1] * z) * u1 + b00[i1] + b01[i1] * z + b02[i1] * z2
        dcb = c2[i1] * u2 + (c10[i1] + c11[i1] * z) * u1 + c00[i1] + c01[i1] * z + c02[i1] * z2
        # stage 3 (midpoint)
        u1 = m1 + 0.5 * h * d1b
        u2 = m2 + 0.5 * h * d2b
        d1c = a1[i1] * u1 + a00[i1] + a01[i1] * z
        d2c = b2[i1] * u2 + (b10[i1] + b11[i1] * z) * u1 + b00[i1] + b01[i1] * z + b02[i1] * z2
        dcc = c2[i1] * u2 + (c10[i1] + c11[i1] * z) * u1 + c00[i1] + c01[i1] * z + c02[i1] * z2
        # stage 4 (right node)
        u1 = m1 + h * d1c
        u2 = m2 + h * d2c
        d1d = a1[i2] * u1 + a00[i2] + a01[i2] * z
        d2d = b2[i2] * u2 + (b10[i2] + b11[i2] * z) * u1 + b00[i2] + b01[i2] * z + b02[i2] * z2
        dcd = c2[i2] * u2 + (c10[i2] + c11[i2] * z) * u1 + c00[i2] + c01[i2] * z + c02[i2] * z2
        m1 = m1 + h / 6.0 * (d1a + 2.0 * d1b + 2.0 * d1c + d1d)
        m2 = m2 + h / 6.0 * (d2a + 2.0 * d2b + 2.0 * d2c + d2d)
        C = C + h / 6.0 * (dca + 2.0 * dcb + 2.0 * dcc + dcd)
        m1s[j + 1] = m1
        m2s[j + 1] = m2
        g = m2 - m1 * m1
        if g < min_gap:
            min_gap = g
    total = C + M * m2 + mbar2 * m1
    return m1s, m2s, total, min_gap


@njit(cache=True)
def euler_maruyama(x0, h, Aa, Ba, bb, Ca, Da, sg, kk, KK, lam, zeta, dW):
    """One Euler-Maruyama path of dX = (A X + B a + b) dt + (C X + D a + s) dW
    under the affine action a_j = k_j + K_j X_j + lam_j * zeta_j.

    Model coefficients are tabulated at the n left knots, policy gains at all
    n+1 knots, zeta carries one draw per step.  Returns (states, actions); the
    terminal action reuses the final step's draw.
    """
    n = dW.shape[0]
    X = np.empty(n + 1)
    act = np.empty(n + 1)
    X[0] = x0
    for j in range(n):
        x = X[j]
        a = kk[j] + KK[j] * x + lam[j] * zeta[j]
        act[j] = a
        X[j + 1] = (
            x
            + (Aa[j] * x + Ba[j] * a + bb[j]) * h
            + (Ca[j] * x + Da[j] * a + sg[j]) * dW[j]
        )
    act[n] = kk[n] + KK[n] * X[n] + lam[n] * zeta[n - 1]
    return X, act


def warmup():
    """Trigger compilation of all kernels on tiny inputs (no-op without numba)."""
    z = np.zeros(5)
    riccati_backward(0.0, 1.0, z, z, np.ones(5), z, z, 0.0, 0.0, 1, 1.0, 1e12)
    w = np.zeros(3)
    moment_cost(
        w, w, w, w, w, w, w, w, w, w, w, w, w, w, w, np.zeros(1), 1.0, 0.0, 0.0, 0.0
    )
    one = np.ones(1)
    euler_maruyama(
        0.0, 1.0, one, one, one, one, one, one, np.ones(2), np.ones(2), np.ones(2), one, one
    )
