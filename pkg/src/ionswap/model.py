"""Closed-form scattering model for the photon-ion SWAP interaction.

A polarization qubit in a long pulse reflects off a single-sided cavity
containing a Lambda-type emitter.  Each polarization drives one leg of the
Lambda system.  The reflected field, interfered on a beam splitter set by
the *atomic* qubit, splits into a dark port (SWAP succeeded) and a bright
port (photon came back unchanged).  Everything here is the adiabatic,
single-excitation limit; the time-domain integrator in :mod:`ionswap.oracle`
is the slow reference implementation of the same physics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import (
    MU_B_OVER_HBAR,
    CavityParams,
    ConfigError,
    DriveSettings,
    EffectiveDetunings,
    GateOutcome,
    JointQubitState,
    LambdaSystem,
    SingularConfigError,
    SteadyStateAmplitudes,
)

_SINGULAR_TOL = 1e-300


def effective_detunings(drive: DriveSettings, system: LambdaSystem) -> EffectiveDetunings:
    """Fold Zeeman shifts of both manifolds into the three detunings.

    The two cavity denominators acquire the lower-manifold shifts of the
    ground state each leg starts from; the emitter denominator acquires the
    upper-manifold shift of the excited state.
    """
    omega_l = MU_B_OVER_HBAR * system.lande_lower * drive.b_field
    omega_u = MU_B_OVER_HBAR * system.lande_upper * drive.b_field
    return EffectiveDetunings(
        delta_down=drive.delta_c - system.m_down * omega_l,
        delta_up=drive.delta_c - system.m_up * omega_l,
        delta_e=drive.delta_a - system.m_e * omega_u,
    )


def complex_cooperativity(
    system: LambdaSystem, cavity: CavityParams, dets: EffectiveDetunings
) -> complex:
    """Two-leg generalization of the cooperativity, complex off resonance.

    Reduces to (|g_down|^2 + |g_up|^2) / (2 kappa_t gamma) when all three
    detunings vanish.
    """
    denom_e = system.gamma + 1j * dets.delta_e
    if abs(denom_e) < _SINGULAR_TOL:
        raise ConfigError("emitter denominator gamma + i*delta_e is zero")
    k_down = cavity.kappa_t + 1j * dets.delta_down
    k_up = cavity.kappa_t + 1j * dets.delta_up
    return (abs(system.g_down) ** 2 / k_down + abs(system.g_up) ** 2 / k_up) / (
        2.0 * denom_e
    )


def _reflection_pieces(system, cavity, dets, alpha, beta, alpha_p, beta_p):
    """Shared algebra for the four reflected amplitudes A_{photon,atom}.

    Returns (A_ad, A_au, A_bd, A_bu, extras) where extras carries the
    intermediate quantities needed by the steady-state amplitudes.
    """
    kt = cavity.kappa_t
    k_down = kt + 1j * dets.delta_down
    k_up = kt + 1j * dets.delta_up
    u_down = 2.0 * cavity.kappa_ex / k_down
    u_up = 2.0 * cavity.kappa_ex / k_up

    gd = complex(system.g_down)
    gu = complex(system.g_up)
    g2d = abs(gd) ** 2
    g2u = abs(gu) ** 2

    aa = alpha * alpha_p
    ab = alpha * beta_p
    ba = beta * alpha_p
    bb = beta * beta_p

    if g2d == 0.0 and g2u == 0.0:
        r = 0.0 + 0.0j
        n1 = np.zeros_like(aa)
        n4 = np.zeros_like(aa)
        d_g = 1.0 + 0.0j  # unused, keeps expressions well defined
    else:
        c_t = complex_cooperativity(system, cavity, dets)
        one_plus = 1.0 + 2.0 * c_t
        if abs(one_plus) < 1e-12:
            raise SingularConfigError(
                "1 + 2*C is zero: scattering response is singular at this point"
            )
        r = 2.0 * c_t / one_plus
        d_g = g2d * k_up + g2u * k_down
        n1 = aa * g2d * k_up + bb * np.conj(gd) * np.conj(gu) * k_down
        n4 = aa * gd * gu * k_up + bb * g2u * k_down

    a_ad = aa * (1.0 - u_down) + u_down * r * n1 / d_g
    a_au = ab * (1.0 - u_down)
    a_bd = ba * (1.0 - u_up)
    a_bu = bb * (1.0 - u_up) + u_up * r * n4 / d_g

    extras = (k_down, k_up, r, d_g, n1, n4, gd, gu, aa, ab, ba, bb)
    return a_ad, a_au, a_bd, a_bu, extras


def gate_probabilities(alpha, beta, alpha_p, beta_p, system, cavity, dets):
    """Dark/bright port probabilities, vectorized over state amplitudes.

    The four amplitude arguments may be scalars or equal-shape arrays.
    The dark port projects the reflected two-channel field on the atomic
    qubit (alpha_p, beta_p); the bright port on its orthogonal complement
    (conj(beta_p), -conj(alpha_p)).
    """
    a_ad, a_au, a_bd, a_bu, _ = _reflection_pieces(
        system, cavity, dets, alpha, beta, alpha_p, beta_p
    )
    # Each atomic row carries an orthogonal photon wavepacket, so the rows
    # add incoherently while the polarization channels add coherently.
    p_dark = (
        np.abs(alpha_p * a_ad + beta_p * a_bd) ** 2
        + np.abs(alpha_p * a_au + beta_p * a_bu) ** 2
    )
    p_bright = (
        np.abs(np.conj(beta_p) * a_ad - np.conj(alpha_p) * a_bd) ** 2
        + np.abs(np.conj(beta_p) * a_au - np.conj(alpha_p) * a_bu) ** 2
    )
    return p_dark, p_bright


def gate_outcome(
    state: JointQubitState,
    system: LambdaSystem,
    cavity: CavityParams,
    dets: EffectiveDetunings,
) -> GateOutcome:
    """Single-state dark/bright probabilities plus fidelity and efficiency."""
    p_d, p_b = gate_probabilities(
        complex(state.alpha),
        complex(state.beta),
        complex(state.alpha_p),
        complex(state.beta_p),
        system,
        cavity,
        dets,
    )
    p_d = float(p_d)
    p_b = float(p_b)
    eta = p_d + p_b
    fid = p_b / eta if eta > 0.0 else None
    return GateOutcome(p_dark=p_d, p_bright=p_b, fidelity=fid, efficiency=eta)


def steady_state_amplitudes(
    state: JointQubitState,
    system: LambdaSystem,
    cavity: CavityParams,
    dets: EffectiveDetunings,
    kappa_s: float,
) -> SteadyStateAmplitudes:
    """Adiabatic intracavity and excited-state amplitudes at peak drive.

    kappa_s is the decay rate of the sending cavity whose exponential output
    seeds the gate; the amplitudes scale as sqrt(kappa_s * kappa_ex).
    """
    if kappa_s < 0:
        raise ConfigError("kappa_s must be non-negative")
    a = complex(state.alpha)
    b = complex(state.beta)
    _, _, _, _, extras = _reflection_pieces(
        system, cavity, dets, a, b, complex(state.alpha_p), complex(state.beta_p)
    )
    k_down, k_up, r, d_g, n1, n4, gd, gu, aa, ab, ba, bb = extras
    pref = 2.0 * np.sqrt(kappa_s * cavity.kappa_ex)
    c1 = pref / k_down * (r * n1 / d_g - aa)
    c2 = -pref / k_down * ab
    c3 = -pref / k_up * ba
    c4 = pref / k_up * (r * n4 / d_g - bb)
    c5 = 1j * pref * r * (aa * gd * k_up + bb * np.conj(gu) * k_down) / d_g
    return SteadyStateAmplitudes(c1=c1, c2=c2, c3=c3, c4=c4, c5=c5)


def birefringence_effective_m(
    m_down: float,
    m_up: float,
    delta_ch: float,
    delta_cv: float,
    omega_l: float,
) -> tuple[float, float]:
    """Absorb a polarization splitting of the cavity into shifted m values.

    A birefringent cavity with mode detunings delta_ch, delta_cv (relative
    to their mean) is equivalent to a non-birefringent one with the magnetic
    quantum numbers displaced by delta/omega_l.
    """
    if omega_l == 0.0:
        if delta_ch == delta_cv == 0.0:
            return m_down, m_up
        raise ConfigError(
            "birefringent splitting cannot be absorbed at zero Larmor frequency"
        )
    return m_down + delta_ch / omega_l, m_up + delta_cv / omega_l


# ---------------------------------------------------------------------------
# ensemble averaging


@dataclass(frozen=True)
class SamplerSpec:
    """How to draw joint qubit states for ensemble averages.

    mode 'haar': both qubits independently Haar-random on the Bloch sphere.
    mode 'grid': real amplitudes alpha, alpha_p on a uniform grid in [0,1]^2
    (betas real non-negative), count rounded down to a perfect square.
    """

    mode: str = "haar"
    count: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("haar", "grid"):
            raise ConfigError(f"unknown sampler mode {self.mode!r}")
        if self.count < 1:
            raise ConfigError("sampler count must be >= 1")


def sample_qubit_pairs(spec: SamplerSpec):
    """Draw (alpha, beta, alpha_p, beta_p) arrays per the sampler spec."""
    if spec.mode == "haar":
        rng = np.random.default_rng(spec.seed)
        # cos(theta) uniform on [-1, 1], azimuth uniform: Haar measure.
        out = []
        for _ in range(2):
            u = rng.uniform(-1.0, 1.0, spec.count)
            phi = rng.uniform(0.0, 2.0 * np.pi, spec.count)
            theta = np.arccos(u)
            out.append(np.cos(theta / 2.0).astype(complex))
            out.append(np.sin(theta / 2.0) * np.exp(1j * phi))
        return tuple(out)
    # grid: n x n lattice of real amplitude pairs
    n = max(1, int(np.sqrt(spec.count)))
    axis = np.linspace(0.0, 1.0, n)
    a, ap = np.meshgrid(axis, axis, indexing="ij")
    a = a.ravel().astype(complex)
    ap = ap.ravel().astype(complex)
    b = np.sqrt(np.clip(1.0 - np.abs(a) ** 2, 0.0, None))
    bp = np.sqrt(np.clip(1.0 - np.abs(ap) ** 2, 0.0, None))
    return a, b.astype(complex), ap, bp.astype(complex)


@dataclass(frozen=True)
class AggregateOutcome:
    """Ensemble statistics of the gate over sampled joint states.

    mean_fidelity / sigma_fidelity average the per-state conditional
    fidelity; heralded_fidelity is the flux-weighted ratio
    <P_bright> / <P_bright + P_dark>, i.e. what a detector ensemble measures.
    histogram holds 50 fidelity bins over [0, 1].
    """

    mean_fidelity: float
    sigma_fidelity: float
    heralded_fidelity: float
    mean_efficiency: float
    sigma_efficiency: float
    mean_p_dark: float
    mean_p_bright: float
    n_states: int
    histogram: np.ndarray
    bin_edges: np.ndarray


def average_gate_outcome(
    system: LambdaSystem,
    cavity: CavityParams,
    drive: DriveSettings,
    sampler: SamplerSpec,
) -> AggregateOutcome:
    dets = effective_detunings(drive, system)
    a, b, ap, bp = sample_qubit_pairs(sampler)
    p_d, p_b = gate_probabilities(a, b, ap, bp, system, cavity, dets)
    eta = p_d + p_b
    ok = eta > 1e-300
    fid = np.where(ok, p_b / np.where(ok, eta, 1.0), np.nan)
    fid_valid = fid[ok]
    hist, edges = np.histogram(fid_valid, bins=50, range=(0.0, 1.0))
    mean_eta = float(np.mean(eta))
    sum_eta = float(np.sum(eta))
    heralded = float(np.sum(p_b) / sum_eta) if sum_eta > 0 else float("nan")
    return AggregateOutcome(
        mean_fidelity=float(np.mean(fid_valid)) if fid_valid.size else float("nan"),
        sigma_fidelity=float(np.std(fid_valid)) if fid_valid.size else float("nan"),
        heralded_fidelity=heralded,
        mean_efficiency=mean_eta,
        sigma_efficiency=float(np.std(eta)),
        mean_p_dark=float(np.mean(p_d)),
        mean_p_bright=float(np.mean(p_b)),
        n_states=int(a.size),
        histogram=hist,
        bin_edges=edges,
    )
