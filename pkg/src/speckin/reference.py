"""Closed-form and quadrature references used as benchmark ground truth."""

from functools import lru_cache
from math import comb

import numpy as np

# first time at which the explicit elastic Maxwell solution is nonnegative
T0_BKW = 6.0 * np.log(2.5)


def bkw_exact(v, t, eta: float = 1.0):
    """Explicit elastic Maxwell-molecule solution, K = 1 - e^(-t/6).

    ``v`` is a 3-vector or an (..., 3) stack; temperature eta^2 at
    equilibrium.  Defined (nonnegative) only for t >= 6 ln(5/2).
    """
    if t < T0_BKW - 1e-5:
        raise ValueError(f"explicit solution needs t >= 6 ln(5/2) = "
                         f"{T0_BKW:.6f}, got {t}")
    v = np.asarray(v, dtype=float)
    sq = np.sum(v * v, axis=-1)
    K = 1.0 - np.exp(-t / 6.0)
    Ke = K * eta * eta
    amp = np.exp(-sq / (2.0 * Ke)) / (2.0 * (2.0 * np.pi * Ke) ** 1.5)
    return amp * ((5.0 * K - 3.0) / K + (1.0 - K) / K ** 2 * sq / eta ** 2)


def bkw_time_derivative(v, t, eta: float = 1.0, dt: float = 1e-6):
    """d/dt of the explicit solution by symmetric finite difference (the
    closed form differentiates cleanly, but the centered quotient at 1e-6
    carries ~1e-12 error, ample for the operator benchmarks)."""
    return (bkw_exact(v, t + dt, eta) - bkw_exact(v, t - dt, eta)) / (2.0 * dt)


def maxwell_second_moment_exact(t):
    """Second-moment tensor M(t) and energy flow r(t) for the two-Gaussian
    elastic Maxwell benchmark datum (rho = 1, V = (0,1,0), T = 8/3)."""
    t = float(t)
    A = np.array([[5.0, -2.0, 0.0], [-2.0, 3.0, 0.0], [0.0, 0.0, 1.0]])
    B = np.diag([8.0, 11.0, 8.0]) / 3.0
    e2 = np.exp(-t / 2.0)
    e3 = np.exp(-t / 3.0)
    M = A * e2 + B * (1.0 - e2)
    r = (0.5 * np.array([-4.0, 13.0, 0.0]) * e3
         + np.array([0.0, 43.0, 0.0]) / 6.0 * (1.0 - e3)
         - np.array([12.0, 4.0, 0.0]) / 6.0 * (e2 - e3))
    return M, r


def moment_rate(n: int, beta: float) -> float:
    """Relaxation rate lambda_n = 1 - (beta^(2n) + sum (1-beta)^(2k))/(n+1)."""
    return 1.0 - (beta ** (2 * n)
                  + sum((1.0 - beta) ** (2 * k) for k in range(n + 1))) / (n + 1)


def _B_beta(k: int, j: int, beta: float) -> float:
    """beta^(2k) int_0^1 s^k (1 - beta(2-beta) s)^j ds, expanded exactly."""
    c = beta * (2.0 - beta)
    total = 0.0
    for m in range(j + 1):
        total += comb(j, m) * (-c) ** m / (k + m + 1)
    return beta ** (2 * k) * total


def maxwell_moment_recursion(n: int, t, m0, beta: float,
                             n_tau: int = 2000, max_order: int = 6):
    """Isotropic even moments m_n(t) = int f |v|^(2n) dv for Maxwell
    molecules, by the triangular recursion

        m_n(t) = e^(-lambda_n t) m_n(0)
               + sum_{k=1}^{n-1} C(2n+2, 2k+1)/(2(n+1)) B_beta(k, n-k)
                 int_0^t m_k m_{n-k} e^(-lambda_n (t - tau)) dtau

    marched on a shared uniform tau grid (composite Simpson for the
    convolution).  ``m0`` lists the initial moments m_0(0)..m_n(0).
    """
    if n < 0:
        raise ValueError("moment order must be >= 0")
    if n > max_order:
        raise ValueError(f"moment order {n} beyond configured max {max_order}")
    m0 = np.asarray(m0, dtype=float)
    if m0.size < n + 1:
        raise ValueError(f"need initial moments up to order {n}")
    t = float(t)
    if n == 0:
        return m0[0]
    if n_tau % 2:
        n_tau += 1
    tau = np.linspace(0.0, t, n_tau + 1)
    # Simpson weights on the uniform tau grid
    wts = np.ones(n_tau + 1)
    wts[1:-1:2] = 4.0
    wts[2:-1:2] = 2.0
    wts *= (tau[1] - tau[0]) / 3.0 if t > 0 else 0.0

    table = {0: np.full(n_tau + 1, m0[0])}
    for order in range(1, n + 1):
        lam = moment_rate(order, beta)
        vals = np.exp(-lam * tau) * m0[order]
        for k in range(1, order):
            coeff = comb(2 * order + 2, 2 * k + 1) / (2.0 * (order + 1))
            coeff *= _B_beta(k, order - k, beta)
            prod = table[k] * table[order - k]
            # convolution value at each tau_i by cumulative Simpson; cheap
            # at this grid size, O(n_tau^2)
            conv = np.empty(n_tau + 1)
            for i in range(n_tau + 1):
                if i == 0:
                    conv[0] = 0.0
                    continue
                seg = prod[:i + 1] * np.exp(-lam * (tau[i] - tau[:i + 1]))
                m = i if i % 2 == 0 else i - 1
                sw = np.ones(i + 1)
                sw[1:m:2] = 4.0
                sw[2:m:2] = 2.0
                sw *= (tau[1] - tau[0]) / 3.0
                if i % 2:  # trapezoid patch for the odd tail interval
                    h = tau[1] - tau[0]
                    sw[m] = 0.5 * h if m == 0 else h / 3.0 + 0.5 * h
                    sw[i] = 0.5 * h
                conv[i] = seg @ sw
            vals = vals + coeff * conv
        table[order] = vals
    return float(table[n][-1])


def inelastic_energy_exact(t, beta: float, K0: float, V) -> float:
    """K(t) = K0 e^(-b(1-b)t) + (|V|^2/2)(1 - e^(-b(1-b)t))."""
    V = np.asarray(V, dtype=float)
    rate = beta * (1.0 - beta)
    decay = np.exp(-rate * np.asarray(t, dtype=float))
    return K0 * decay + 0.5 * np.sum(V * V) * (1.0 - decay)


def diffusion_temperature_exact(t, eta: float, zeta_pref: float, C0: float,
                                e: float, T0: float):
    """Heated inelastic Maxwell temperature law with equilibrium
    T_inf = 2 eta / (zeta pi C0 (1 - e^2)); for e = 1 the temperature
    grows linearly, T0 + 2 eta t."""
    t = np.asarray(t, dtype=float)
    rate = zeta_pref * np.pi * C0 * (1.0 - e * e)
    if rate == 0.0:
        return T0 + 2.0 * eta * t
    T_inf = 2.0 * eta / rate
    decay = np.exp(-rate * t)
    return T0 * decay + T_inf * (1.0 - decay)


def _theta_rule(n_panels: int, pts: int = 10):
    """Composite Gauss nodes for theta in [0, pi/2) under s = tan(theta)."""
    gx, gw = np.polynomial.legendre.leggauss(pts)
    edges = np.linspace(0.0, 0.5 * np.pi, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    th = (mid + half * gx[None, :]).ravel()
    wt = (half * gw[None, :]).ravel()
    return th, wt


def _F_quad(speed, T, a, t, n_panels):
    th, wt = _theta_rule(n_panels)
    s = np.tan(th)
    # (4/pi) (1+s^2)^{-2} ds = (4/pi) cos^2(theta) dtheta
    weight = (4.0 / np.pi) * np.cos(th) ** 2 * wt
    Tbar = T + a * s * s * np.exp(-2.0 * t / 3.0)
    sq = np.asarray(speed, dtype=float)[..., None] ** 2
    gauss = np.exp(-sq / (2.0 * Tbar)) / (2.0 * np.pi * Tbar) ** 1.5
    return gauss @ weight


def self_similar_F(speed, T: float, a: float = 1.0, t: float = 0.0,
                   rtol: float = 1e-8):
    """Attractor profile of the slow-down process: a Maxwellian mixture

        F_T(|v|) = (4/pi) int_0^inf (1+s^2)^{-2} M_{Tbar(s)}(|v|) ds,
        Tbar = T + a s^2 e^(-2t/3),

    by tan-substituted composite Gauss quadrature with self-convergence
    control (panel doubling until the change is below rtol)."""
    if T < 0:
        raise ValueError(f"thermostat temperature must be >= 0, got {T}")
    speed = np.asarray(speed, dtype=float)
    if T == 0.0 and np.any(speed == 0.0):
        raise ValueError("profile is singular at |v| = 0 for a cold thermostat")
    n = 32
    prev = _F_quad(speed, T, a, t, n)
    for _ in range(8):
        n *= 2
        cur = _F_quad(speed, T, a, t, n)
        scale = np.max(np.abs(cur))
        if np.max(np.abs(cur - prev)) <= rtol * scale:
            return cur if speed.ndim else float(cur)
        prev = cur
    raise RuntimeError("self-similar profile quadrature failed to converge")


def cold_asymptotics(speed):
    """(small-|v|, large-|v|) estimates of the cold (T = 0) profile:
    (sqrt(2)/pi^(5/2)) |v|^-2 (1 + 2|v|^2 ln|v|) and 2 (2/pi)^(5/2) |v|^-6."""
    speed = np.asarray(speed, dtype=float)
    if np.any(speed <= 0):
        raise ValueError("speed must be positive")
    small = (np.sqrt(2.0) / np.pi ** 2.5) / speed ** 2 \
        * (1.0 + 2.0 * speed ** 2 * np.log(speed))
    large = 2.0 * (2.0 / np.pi) ** 2.5 / speed ** 6
    return small, large
