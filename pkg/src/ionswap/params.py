"""Parameter containers and unit conventions.

All rates and detunings stored in these containers are *angular* frequencies
(rad/s).  Values quoted in the literature as ordinary frequencies ("MHz")
must be multiplied by 2*pi on the way in; the ``MHZ``/``KHZ`` constants do
exactly that.  Magnetic fields are in gauss, lengths in meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi

#: ordinary MHz -> rad/s
MHZ = TWO_PI * 1.0e6
#: ordinary kHz -> rad/s
KHZ = TWO_PI * 1.0e3

#: Bohr magneton over hbar, rad/s per gauss (2*pi x 1.3996 MHz/G)
MU_B_OVER_HBAR = TWO_PI * 1.3996e6

SPEED_OF_LIGHT = 299_792_458.0


class ConfigError(ValueError):
    """A parameter combination that the model cannot represent."""


class SingularConfigError(ValueError):
    """A parameter point where the scattering response is singular."""


@dataclass(frozen=True)
class LambdaSystem:
    """Three-level emitter with two ground legs coupled to one cavity mode each.

    Parameters
    ----------
    g_down, g_up:
        Single-photon coupling rates of the two legs (rad/s, may be complex).
    gamma:
        Total excited-state amplitude decay rate (rad/s, HWHM convention).
    m_down, m_up, m_e:
        Magnetic quantum numbers of the two ground states and the excited
        state; they set the Zeeman response of the effective detunings.
    lande_lower, lande_upper:
        Lande g-factors of the lower and upper manifolds.
    """

    g_down: complex
    g_up: complex
    gamma: float
    m_down: float = -1.0
    m_up: float = 1.0
    m_e: float = 0.0
    lande_lower: float = 1.0
    lande_upper: float = 0.0

    def __post_init__(self):
        if self.gamma < 0:
            raise ConfigError("gamma must be non-negative")
        if self.g_down == 0 and self.g_up == 0 and self.gamma == 0:
            raise ConfigError("emitter has no couplings and no decay")
        if self.m_down == self.m_up:
            raise ConfigError("ground-state qubit levels must be distinct (m_down != m_up)")


@dataclass(frozen=True)
class CavityParams:
    """Single-sided cavity: one transmissive coupling mirror, one closed mirror.

    kappa_ex is the (amplitude) decay rate through the coupling mirror,
    kappa_i lumps all other losses.  Both rad/s.
    """

    kappa_ex: float
    kappa_i: float = 0.0

    def __post_init__(self):
        if self.kappa_ex <= 0:
            raise ConfigError("kappa_ex must be positive")
        if self.kappa_i < 0:
            raise ConfigError("kappa_i must be non-negative")

    @property
    def kappa_t(self) -> float:
        return self.kappa_ex + self.kappa_i


@dataclass(frozen=True)
class DriveSettings:
    """Externally tunable knobs: bare detunings, bias field, source bandwidth.

    delta_c is the photon-cavity detuning and delta_a the photon-atom
    detuning, both before Zeeman shifts are folded in.  b_field is in gauss.
    kappa_s is the decay rate of the sending (source) cavity; only the
    time-domain integrator uses it.
    """

    delta_c: float = 0.0
    delta_a: float = 0.0
    b_field: float = 0.0
    kappa_s: float = 0.0

    def __post_init__(self):
        if self.kappa_s < 0:
            raise ConfigError("kappa_s must be non-negative")


@dataclass(frozen=True)
class EffectiveDetunings:
    """Zeeman-resolved detunings seen by the three scattering denominators."""

    delta_down: float
    delta_up: float
    delta_e: float


@dataclass(frozen=True)
class JointQubitState:
    """Product state of a polarization qubit (alpha, beta) and an atomic
    qubit (alpha_p, beta_p).  Both must be normalized."""

    alpha: complex
    beta: complex
    alpha_p: complex
    beta_p: complex

    def __post_init__(self):
        n_ph = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        n_at = abs(self.alpha_p) ** 2 + abs(self.beta_p) ** 2
        if abs(n_ph - 1.0) > 1e-12 or abs(n_at - 1.0) > 1e-12:
            raise ConfigError(
                f"qubit norms must be 1 within 1e-12 (got {n_ph}, {n_at})"
            )

    @classmethod
    def from_angles(cls, theta: float, phi: float, theta_p: float, phi_p: float):
        """Bloch angles -> state: cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
        return cls(
            alpha=math.cos(theta / 2.0),
            beta=math.sin(theta / 2.0) * complex(math.cos(phi), math.sin(phi)),
            alpha_p=math.cos(theta_p / 2.0),
            beta_p=math.sin(theta_p / 2.0) * complex(math.cos(phi_p), math.sin(phi_p)),
        )


@dataclass(frozen=True)
class SteadyStateAmplitudes:
    """Long-pulse (adiabatic) intracavity/excited amplitudes at t = 0.

    c1..c4 are the four cavity-mode amplitudes ordered
    (photon-a, atom-down), (a, up), (b, down), (b, up); c5 is the excited
    state.  All carry the seed envelope normalization of the sending cavity.
    """

    c1: complex
    c2: complex
    c3: complex
    c4: complex
    c5: complex


@dataclass(frozen=True)
class GateOutcome:
    """Detection probabilities behind the dark/bright port splitter.

    fidelity is None when both port probabilities vanish (nothing is ever
    detected, so the conditional fidelity is undefined).
    """

    p_dark: float
    p_bright: float
    fidelity: float | None
    efficiency: float
