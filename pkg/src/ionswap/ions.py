"""Ion species presets, mirror-budget helpers, and rate-of-thumb estimates.

Numbers here are catalog values for three trapped-ion species with a
Lambda system suitable for the SWAP gate, each available with two cavity
flavors: a 20 mm "conventional" mirror pair and a 400 um fiber cavity.
Quoted decay rates and couplings are stored as quoted (rounded) rather than
recomputed, so they can be compared against published tables directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import (
    MHZ,
    KHZ,
    MU_B_OVER_HBAR,
    SPEED_OF_LIGHT,
    CavityParams,
    ConfigError,
    LambdaSystem,
)


def lande_factor(s: float, l: float, j: float) -> float:
    """Lande g_J for LS coupling (electron spin g taken as exactly 2)."""
    if j <= 0:
        raise ConfigError("j must be positive for a Lande factor")
    return 1.5 + (s * (s + 1.0) - l * (l + 1.0)) / (2.0 * j * (j + 1.0))


def larmor_frequency(lande: float, b_gauss: float) -> float:
    """Zeeman splitting per unit m, rad/s, for a field in gauss."""
    return MU_B_OVER_HBAR * lande * b_gauss


@dataclass(frozen=True)
class MirrorSpec:
    """Mirror budget of a two-mirror cavity: one-way length (m), coupler
    transmission T1 and the lumped second-mirror transmission + scatter/
    absorption loss, both in parts per million."""

    length: float
    t1_ppm: float
    t2_plus_loss_ppm: float

    def __post_init__(self):
        if self.length <= 0:
            raise ConfigError("cavity length must be positive")
        if self.t1_ppm <= 0 or self.t2_plus_loss_ppm < 0:
            raise ConfigError("mirror budgets must be positive / non-negative")


@dataclass(frozen=True)
class CavityGeometry:
    cavity: CavityParams
    finesse: float


def cavity_from_mirrors(spec: MirrorSpec) -> CavityGeometry:
    """Convert a mirror budget to decay rates and finesse.

    kappa_ex = c T1 / (4 l), kappa_i = c (T2 + L) / (4 l),
    finesse = 2 pi / (T1 + T2 + L).
    """
    t1 = spec.t1_ppm * 1e-6
    t2l = spec.t2_plus_loss_ppm * 1e-6
    kappa_ex = SPEED_OF_LIGHT * t1 / (4.0 * spec.length)
    kappa_i = SPEED_OF_LIGHT * t2l / (4.0 * spec.length)
    finesse = 2.0 * math.pi / (t1 + t2l)
    return CavityGeometry(CavityParams(kappa_ex=kappa_ex, kappa_i=kappa_i), finesse)


def gate_time_estimate(kappa_t: float, cooperativity: float, gamma: float) -> float:
    """Pulse duration needed for the adiabatic limit: three times the slower
    of the cavity response and the cavity-enhanced emission rate C*gamma."""
    if kappa_t <= 0 or cooperativity <= 0 or gamma <= 0:
        raise ConfigError("rates and cooperativity must be positive")
    return 3.0 * max(1.0 / kappa_t, 1.0 / (cooperativity * gamma))


def postselected_efficiency(
    eta: float, purcell_rate: float, gamma_other: float
) -> float:
    """Efficiency surviving post-selection against decay out of the qubit
    manifold: eta * Gamma / (Gamma + gamma_other)."""
    if purcell_rate <= 0 or gamma_other < 0:
        raise ConfigError("purcell_rate must be positive, gamma_other non-negative")
    return eta * purcell_rate / (purcell_rate + gamma_other)


@dataclass(frozen=True)
class IonPreset:
    """Catalog record for one ion species.

    chi_down / chi_up are the signed dipole factors of the two legs relative
    to the base coupling; gamma_other is the decay rate out of the qubit
    manifold, and purcell_rate the cavity-enhanced emission rate at the
    catalog cooperativity (stored as quoted, used for post-selection
    estimates).  metastable_lifetime_s is None when the lower manifold is a
    true ground state.
    """

    name: str
    transition: str
    wavelength_nm: float
    gamma: float
    chi_down: float
    chi_up: float
    m_down: float
    m_up: float
    m_e: float
    lande_lower: float
    lande_upper: float
    gamma_other: float
    purcell_rate: float | None
    metastable_lifetime_s: float | None


@dataclass(frozen=True)
class PresetBundle:
    ion: IonPreset
    system: LambdaSystem
    cavity: CavityParams
    mirrors: MirrorSpec
    finesse_quoted: float
    g_base: complex


_D32 = lande_factor(0.5, 2.0, 1.5)  # 4/5
_P12 = lande_factor(0.5, 1.0, 0.5)  # 2/3

_IONS = {
    # S1/2 (F=1) -- P1/2 (F'=0), hyperfine qubit on the stretched states
    "Yb171": IonPreset(
        name="Yb171",
        transition="S1/2(F=1) - P1/2(F'=0)",
        wavelength_nm=369.5,
        gamma=2 * math.pi * 9.8e6,
        chi_down=1.0 / math.sqrt(3.0),
        chi_up=-1.0 / math.sqrt(3.0),
        m_down=-1.0,
        m_up=1.0,
        m_e=0.0,
        lande_lower=1.0,  # g_F of S1/2, F=1
        lande_upper=0.0,  # F'=0 carries no Zeeman shift
        gamma_other=0.0,
        purcell_rate=None,
        metastable_lifetime_s=None,
    ),
    # D3/2 -- P1/2 Zeeman qubits; both species share the same cavity tables
    "Ca40": IonPreset(
        name="Ca40",
        transition="D3/2 - P1/2",
        wavelength_nm=866.0,
        gamma=2 * math.pi * 10.0e6,
        chi_down=math.sqrt(0.5),
        chi_up=math.sqrt(1.0 / 6.0),
        m_down=-1.5,
        m_up=0.5,
        m_e=-0.5,
        lande_lower=_D32,
        lande_upper=_P12,
        gamma_other=2 * math.pi * 10.3e6,
        purcell_rate=2 * math.pi * 2.5e6,
        metastable_lifetime_s=1.2,
    ),
    "Ba138": IonPreset(
        name="Ba138",
        transition="D3/2 - P1/2",
        wavelength_nm=650.0,
        gamma=2 * math.pi * 10.0e6,
        chi_down=math.sqrt(0.5),
        chi_up=math.sqrt(1.0 / 6.0),
        m_down=-1.5,
        m_up=0.5,
        m_e=-0.5,
        lande_lower=_D32,
        lande_upper=_P12,
        gamma_other=2 * math.pi * 7.2e6,
        purcell_rate=2 * math.pi * 8.0e6,
        metastable_lifetime_s=80.0,
    ),
}

# (family, flavor) -> (mirrors, quoted kappa_ex, quoted kappa_i, quoted
# finesse, quoted leg couplings (g_down, g_up))
_CAVITIES = {
    ("Yb171", "conventional"): (
        MirrorSpec(length=20e-3, t1_ppm=300.0, t2_plus_loss_ppm=150.0),
        179 * KHZ,
        90 * KHZ,
        1.4e4,
        (5.0 * MHZ / math.sqrt(3.0), 5.0 * MHZ / math.sqrt(3.0)),
    ),
    ("Yb171", "fiber"): (
        MirrorSpec(length=400e-6, t1_ppm=1500.0, t2_plus_loss_ppm=1000.0),
        45 * MHZ,
        30 * MHZ,
        2.5e3,
        (70.0 * MHZ / math.sqrt(3.0), 70.0 * MHZ / math.sqrt(3.0)),
    ),
    ("D32", "conventional"): (
        MirrorSpec(length=20e-3, t1_ppm=50.0, t2_plus_loss_ppm=17.0),
        30 * KHZ,
        10 * KHZ,
        9.4e4,
        (1.4 * MHZ, 0.82 * MHZ),
    ),
    ("D32", "fiber"): (
        MirrorSpec(length=400e-6, t1_ppm=600.0, t2_plus_loss_ppm=100.0),
        18 * MHZ,
        3 * MHZ,
        9.0e3,
        (28.0 * MHZ, 16.0 * MHZ),
    ),
}


def available_presets() -> list[tuple[str, str]]:
    return [(ion, flavor) for ion in _IONS for flavor in ("conventional", "fiber")]


def preset(ion: str, flavor: str, mode_phase: str = "absorbed") -> PresetBundle:
    """Assemble a ready-to-run system/cavity pair from the catalog.

    mode_phase 'absorbed' (default) folds the sign of the dipole factors
    into the field mode phases so both legs couple with positive g;
    'physical' keeps the signed factors.
    """
    if ion not in _IONS:
        raise ConfigError(f"unknown ion {ion!r}; have {sorted(_IONS)}")
    if flavor not in ("conventional", "fiber"):
        raise ConfigError("flavor must be 'conventional' or 'fiber'")
    if mode_phase not in ("absorbed", "physical"):
        raise ConfigError("mode_phase must be 'absorbed' or 'physical'")
    rec = _IONS[ion]
    family = "Yb171" if ion == "Yb171" else "D32"
    mirrors, kex, ki, finesse, (g_d, g_u) = _CAVITIES[(family, flavor)]
    if mode_phase == "physical":
        g_d = g_d * (1.0 if rec.chi_down >= 0 else -1.0)
        g_u = g_u * (1.0 if rec.chi_up >= 0 else -1.0)
    system = LambdaSystem(
        g_down=g_d,
        g_up=g_u,
        gamma=rec.gamma,
        m_down=rec.m_down,
        m_up=rec.m_up,
        m_e=rec.m_e,
        lande_lower=rec.lande_lower,
        lande_upper=rec.lande_upper,
    )
    cavity = CavityParams(kappa_ex=kex, kappa_i=ki)
    g_base = (abs(g_d) ** 2 + abs(g_u) ** 2) ** 0.5
    return PresetBundle(
        ion=rec,
        system=system,
        cavity=cavity,
        mirrors=mirrors,
        finesse_quoted=finesse,
        g_base=g_base,
    )
