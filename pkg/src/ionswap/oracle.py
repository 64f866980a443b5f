"""Time-domain reference integrator for the cascaded photon-ion system.

Integrates the five coupled amplitude equations (four cavity channels and
one excited state) driven by the exponential output of a sending cavity of
decay rate kappa_s.  This is deliberately independent of the closed-form
expressions in :mod:`ionswap.model`: fixed-step RK4, explicit flux
bookkeeping, no reuse of the scattering algebra.  Its purpose is to verify
the closed forms, not to be fast -- although the inner loop is jitted so
that randomized cross-check suites stay cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .params import (
    CavityParams,
    ConfigError,
    EffectiveDetunings,
    JointQubitState,
    LambdaSystem,
)


class StepSizeError(ValueError):
    """Requested integration step too coarse for the fastest rate."""


class NonFiniteAmplitudeError(RuntimeError):
    """Integration produced a non-finite amplitude (reports the step)."""


@njit(cache=True)
def _rk4_run(seed, gd, gu, gamma, kex, ki, dd, du, de, ks, dt, n_steps, stride):
    """Fixed-step RK4 over the five complex amplitudes.

    seed holds the four source coefficients (aa, ab, ba, bb) multiplying the
    exponential envelope; channel ordering is (photon a, atom down),
    (a, up), (b, down), (b, up).
    """
    kt = kex + ki
    pd_ = -(kt + 1j * dd)
    pu_ = -(kt + 1j * du)
    pe_ = -(gamma + 1j * de)
    gdc = np.conj(gd)
    guc = np.conj(gu)
    drv = -2.0 * math.sqrt(ks * kex)
    rt2ks = math.sqrt(2.0 * ks)
    rt2kex = math.sqrt(2.0 * kex)

    s0, s1, s2, s3 = seed[0], seed[1], seed[2], seed[3]

    c1 = 0.0 + 0.0j
    c2 = 0.0 + 0.0j
    c3 = 0.0 + 0.0j
    c4 = 0.0 + 0.0j
    c5 = 0.0 + 0.0j

    n_rec = n_steps // stride + 1
    times = np.empty(n_rec)
    cs = np.empty((5, n_rec), dtype=np.complex128)
    env = np.empty(n_rec)
    cum = np.empty((6, n_rec))

    # trapezoid accumulators: Gram integrals of the two output amplitude
    # pairs (one pair per atomic row) plus the two loss channels
    iaa_d = 0.0
    ibb_d = 0.0
    iab_d = 0.0 + 0.0j
    iaa_u = 0.0
    ibb_u = 0.0
    iab_u = 0.0 + 0.0j
    loss_i = 0.0
    loss_s = 0.0

    # integrand values at the previous node
    e0 = 1.0
    a_ad = rt2ks * s0
    a_au = rt2ks * s1
    a_bd = rt2ks * s2
    a_bu = rt2ks * s3
    f_aad = abs(a_ad) ** 2
    f_abd = abs(a_bd) ** 2
    f_iabd = np.conj(a_ad) * a_bd
    f_aau = abs(a_au) ** 2
    f_abu = abs(a_bu) ** 2
    f_iabu = np.conj(a_au) * a_bu
    f_li = 0.0
    f_ls = 0.0

    times[0] = 0.0
    cs[0, 0] = c1
    cs[1, 0] = c2
    cs[2, 0] = c3
    cs[3, 0] = c4
    cs[4, 0] = c5
    env[0] = 1.0
    for q in range(6):
        cum[q, 0] = 0.0

    bad_step = -1
    i_rec = 1
    half = 0.5 * dt
    sixth = dt / 6.0
    for n in range(n_steps):
        t = n * dt
        e_a = math.exp(-ks * t)
        e_b = math.exp(-ks * (t + half))
        e_c = math.exp(-ks * (t + dt))

        # k1
        d1a = drv * s0 * e_a + pd_ * c1 - 1j * gdc * c5
        d2a = drv * s1 * e_a + pd_ * c2
        d3a = drv * s2 * e_a + pu_ * c3
        d4a = drv * s3 * e_a + pu_ * c4 - 1j * gu * c5
        d5a = pe_ * c5 - 1j * gd * c1 - 1j * guc * c4
        # k2
        x1 = c1 + half * d1a
        x2 = c2 + half * d2a
        x3 = c3 + half * d3a
        x4 = c4 + half * d4a
        x5 = c5 + half * d5a
        d1b = drv * s0 * e_b + pd_ * x1 - 1j * gdc * x5
        d2b = drv * s1 * e_b + pd_ * x2
        d3b = drv * s2 * e_b + pu_ * x3
        d4b = drv * s3 * e_b + pu_ * x4 - 1j * gu * x5
        d5b = pe_ * x5 - 1j * gd * x1 - 1j * guc * x4
        # k3
        x1 = c1 + half * d1b
        x2 = c2 + half * d2b
        x3 = c3 + half * d3b
        x4 = c4 + half * d4b
        x5 = c5 + half * d5b
        d1c = drv * s0 * e_b + pd_ * x1 - 1j * gdc * x5
        d2c = drv * s1 * e_b + pd_ * x2
        d3c = drv * s2 * e_b + pu_ * x3
        d4c = drv * s3 * e_b + pu_ * x4 - 1j * gu * x5
        d5c = pe_ * x5 - 1j * gd * x1 - 1j * guc * x4
        # k4
        x1 = c1 + dt * d1c
        x2 = c2 + dt * d2c
        x3 = c3 + dt * d3c
        x4 = c4 + dt * d4c
        x5 = c5 + dt * d5c
        d1d = drv * s0 * e_c + pd_ * x1 - 1j * gdc * x5
        d2d = drv * s1 * e_c + pd_ * x2
        d3d = drv * s2 * e_c + pu_ * x3
        d4d = drv * s3 * e_c + pu_ * x4 - 1j * gu * x5
        d5d = pe_ * x5 - 1j * gd * x1 - 1j * guc * x4

        c1 = c1 + sixth * (d1a + 2.0 * d1b + 2.0 * d1c + d1d)
        c2 = c2 + sixth * (d2a + 2.0 * d2b + 2.0 * d2c + d2d)
        c3 = c3 + sixth * (d3a + 2.0 * d3b + 2.0 * d3c + d3d)
        c4 = c4 + sixth * (d4a + 2.0 * d4b + 2.0 * d4c + d4d)
        c5 = c5 + sixth * (d5a + 2.0 * d5b + 2.0 * d5c + d5d)

        # output amplitudes and flux integrands at the new node
        e0 = e_c
        a_ad = rt2ks * s0 * e0 + rt2kex * c1
        a_au = rt2ks * s1 * e0 + rt2kex * c2
        a_bd = rt2ks * s2 * e0 + rt2kex * c3
        a_bu = rt2ks * s3 * e0 + rt2kex * c4
        g_aad = abs(a_ad) ** 2
        g_abd = abs(a_bd) ** 2
        g_iabd = np.conj(a_ad) * a_bd
        g_aau = abs(a_au) ** 2
        g_abu = abs(a_bu) ** 2
        g_iabu = np.conj(a_au) * a_bu
        g_li = 2.0 * ki * (
            abs(c1) ** 2 + abs(c2) ** 2 + abs(c3) ** 2 + abs(c4) ** 2
        )
        g_ls = 2.0 * gamma * abs(c5) ** 2

        w = 0.5 * dt
        iaa_d += w * (f_aad + g_aad)
        ibb_d += w * (f_abd + g_abd)
        iab_d += w * (f_iabd + g_iabd)
        iaa_u += w * (f_aau + g_aau)
        ibb_u += w * (f_abu + g_abu)
        iab_u += w * (f_iabu + g_iabu)
        loss_i += w * (f_li + g_li)
        loss_s += w * (f_ls + g_ls)

        f_aad, f_abd, f_iabd = g_aad, g_abd, g_iabd
        f_aau, f_abu, f_iabu = g_aau, g_abu, g_iabu
        f_li, f_ls = g_li, g_ls

        if (n + 1) % stride == 0 or n == n_steps - 1:
            if i_rec < n_rec:
                times[i_rec] = (n + 1) * dt
                cs[0, i_rec] = c1
                cs[1, i_rec] = c2
                cs[2, i_rec] = c3
                cs[3, i_rec] = c4
                cs[4, i_rec] = c5
                env[i_rec] = e0
                cum[0, i_rec] = iaa_d + ibb_d
                cum[1, i_rec] = iaa_u + ibb_u
                cum[2, i_rec] = loss_i
                cum[3, i_rec] = loss_s
                cum[4, i_rec] = iab_d.real
                cum[5, i_rec] = iab_u.real
                i_rec += 1
            if bad_step < 0 and not (
                np.isfinite(c1.real)
                and np.isfinite(c2.real)
                and np.isfinite(c3.real)
                and np.isfinite(c4.real)
                and np.isfinite(c5.real)
            ):
                bad_step = n + 1
                break

    c_final = np.array([c1, c2, c3, c4, c5], dtype=np.complex128)
    gram = np.array([iaa_d, ibb_d, iaa_u, ibb_u], dtype=np.float64)
    gram_off = np.array([iab_d, iab_u], dtype=np.complex128)
    return (
        times[:i_rec],
        cs[:, :i_rec],
        env[:i_rec],
        cum[:, :i_rec],
        gram,
        gram_off,
        loss_i,
        loss_s,
        c_final,
        bad_step,
    )


@dataclass(frozen=True)
class Trajectory:
    """Integrated history plus the time-integrated flux bookkeeping.

    ``gram_down``/``gram_up`` are the 2x2 Hermitian Gram matrices of the
    output amplitude pairs (photon channel a, photon channel b) for each
    atomic row; the port probabilities of any atomic projection are
    quadratic forms in these.
    """

    times: np.ndarray
    amplitudes: np.ndarray  # shape (5, n_samples), channels c1..c5
    seed_envelope: np.ndarray
    cumulative_flux: np.ndarray  # rows: down-row, up-row, intrinsic, spont., cross-d, cross-u
    gram_down: np.ndarray
    gram_up: np.ndarray
    loss_intrinsic: float
    loss_spontaneous: float
    p_residual: float
    kappa_s: float
    dt: float
    t_max: float
    n_steps: int


@dataclass(frozen=True)
class OracleReport:
    """Probability budget extracted from a trajectory for one atomic qubit."""

    p_dark: float
    p_bright: float
    p_loss_intrinsic: float
    p_loss_spontaneous: float
    p_residual: float
    conservation_residual: float


def integrate_amplitudes(
    state: JointQubitState,
    system: LambdaSystem,
    cavity: CavityParams,
    dets: EffectiveDetunings,
    kappa_s: float,
    t_max: float | None = None,
    dt: float | None = None,
    n_samples: int = 2000,
) -> Trajectory:
    """Integrate the driven amplitude equations from t = 0.

    Defaults: t_max = 12 / kappa_s (residual envelope below 4e-11) and
    dt = 1 / (50 * fastest rate).  A user-supplied dt coarser than that
    bound is rejected.
    """
    if kappa_s <= 0:
        raise ConfigError("time-domain integration needs kappa_s > 0")
    rates = [
        cavity.kappa_t,
        system.gamma,
        abs(system.g_down),
        abs(system.g_up),
        abs(dets.delta_down),
        abs(dets.delta_up),
        abs(dets.delta_e),
        kappa_s,
    ]
    fastest = max(rates)
    dt_bound = 1.0 / (50.0 * fastest)
    if dt is None:
        # default tighter than the bound so the trapezoid flux bookkeeping
        # keeps the conservation residual comfortably below 1e-6
        dt = 1.0 / (100.0 * fastest)
    elif dt > dt_bound * (1.0 + 1e-12):
        raise StepSizeError(
            f"dt={dt} too coarse; need dt <= {dt_bound} for fastest rate {fastest}"
        )
    if t_max is None:
        t_max = 12.0 / kappa_s
    elif t_max < 10.0 / kappa_s:
        raise ConfigError("t_max must cover at least 10 source lifetimes")

    n_steps = int(math.ceil(t_max / dt))
    stride = max(1, n_steps // max(1, n_samples))

    seed = np.array(
        [
            state.alpha * state.alpha_p,
            state.alpha * state.beta_p,
            state.beta * state.alpha_p,
            state.beta * state.beta_p,
        ],
        dtype=np.complex128,
    )
    (
        times,
        cs,
        env,
        cum,
        gram,
        gram_off,
        loss_i,
        loss_s,
        c_final,
        bad_step,
    ) = _rk4_run(
        seed,
        complex(system.g_down),
        complex(system.g_up),
        float(system.gamma),
        float(cavity.kappa_ex),
        float(cavity.kappa_i),
        float(dets.delta_down),
        float(dets.delta_up),
        float(dets.delta_e),
        float(kappa_s),
        float(dt),
        n_steps,
        stride,
    )
    if bad_step >= 0:
        raise NonFiniteAmplitudeError(
            f"non-finite amplitude at step {bad_step} (t={bad_step * dt})"
        )
    t_end = n_steps * dt
    residual = math.exp(-2.0 * kappa_s * t_end) + float(
        np.sum(np.abs(c_final) ** 2)
    )
    g_down = np.array(
        [[gram[0], gram_off[0]], [np.conj(gram_off[0]), gram[1]]], dtype=complex
    )
    g_up = np.array(
        [[gram[2], gram_off[1]], [np.conj(gram_off[1]), gram[3]]], dtype=complex
    )
    return Trajectory(
        times=times,
        amplitudes=cs,
        seed_envelope=env,
        cumulative_flux=cum,
        gram_down=g_down,
        gram_up=g_up,
        loss_intrinsic=float(loss_i),
        loss_spontaneous=float(loss_s),
        p_residual=residual,
        kappa_s=kappa_s,
        dt=dt,
        t_max=t_end,
        n_steps=n_steps,
    )


def time_domain_probabilities(
    traj: Trajectory, alpha_p: complex, beta_p: complex
) -> OracleReport:
    """Project the integrated output fluxes on the dark/bright ports.

    The beam-splitter setting is the atomic qubit (alpha_p, beta_p); the
    dark port takes alpha_p * A_a + beta_p * A_b in each atomic row, the
    bright port the orthogonal combination.
    """
    v_dark = np.array([alpha_p, beta_p], dtype=complex)
    v_bright = np.array([np.conj(beta_p), -np.conj(alpha_p)], dtype=complex)
    p_d = 0.0
    p_b = 0.0
    for g in (traj.gram_down, traj.gram_up):
        p_d += float(np.real(np.conj(v_dark) @ g @ v_dark))
        p_b += float(np.real(np.conj(v_bright) @ g @ v_bright))
    total = p_d + p_b + traj.loss_intrinsic + traj.loss_spontaneous + traj.p_residual
    return OracleReport(
        p_dark=p_d,
        p_bright=p_b,
        p_loss_intrinsic=traj.loss_intrinsic,
        p_loss_spontaneous=traj.loss_spontaneous,
        p_residual=traj.p_residual,
        conservation_residual=abs(1.0 - total),
    )


def conservation_check(report: OracleReport) -> float:
    """|1 - (all detected + all lost + residual)| for a report."""
    total = (
        report.p_dark
        + report.p_bright
        + report.p_loss_intrinsic
        + report.p_loss_spontaneous
        + report.p_residual
    )
    return abs(1.0 - total)


def dump_trajectory(traj: Trajectory, path) -> None:
    """Columnar text dump: time, Re/Im of c1..c5, envelope, cumulative fluxes."""
    cols = [traj.times]
    header = ["time_s"]
    for k in range(5):
        cols.append(traj.amplitudes[k].real)
        cols.append(traj.amplitudes[k].imag)
        header.append(f"re_c{k + 1}")
        header.append(f"im_c{k + 1}")
    cols.append(traj.seed_envelope)
    header.append("seed_envelope")
    flux_names = [
        "flux_row_down",
        "flux_row_up",
        "loss_intrinsic",
        "loss_spontaneous",
        "re_cross_down",
        "re_cross_up",
    ]
    for name, row in zip(flux_names, traj.cumulative_flux):
        cols.append(row)
        header.append(name)
    data = np.column_stack(cols)
    np.savetxt(path, data, header=" ".join(header), fmt="%.9e")
