"""Working-point design: analytic landmarks and numerical optimization.

For a symmetric system (equal leg couplings, no Zeeman splitting) the
unit-fidelity working points are known in closed form; this module exposes
them together with the coupling-rate landmarks of the efficiency/fidelity
trade-off.  For asymmetric legs or a bias field the mean fidelity is
maximized numerically over (delta_c, delta_a, B) with a coarse grid
pre-scan followed by multi-start Nelder-Mead, using common random states
so the objective is deterministic for a fixed sampler seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .model import (
    SamplerSpec,
    effective_detunings,
    gate_probabilities,
    sample_qubit_pairs,
)
from .params import (
    CavityParams,
    ConfigError,
    DriveSettings,
    LambdaSystem,
    SingularConfigError,
)


def intrinsic_cooperativity(system: LambdaSystem, kappa_i: float) -> float:
    """Cooperativity against intrinsic loss only: sum |g|^2 / (2 kappa_i gamma)."""
    if kappa_i == 0.0:
        return math.inf
    return (abs(system.g_down) ** 2 + abs(system.g_up) ** 2) / (
        2.0 * kappa_i * system.gamma
    )


def resonant_cooperativity(system: LambdaSystem, kappa_t: float) -> float:
    return (abs(system.g_down) ** 2 + abs(system.g_up) ** 2) / (
        2.0 * kappa_t * system.gamma
    )


def optimal_coupling(system: LambdaSystem, kappa_i: float) -> float:
    """Coupling rate that maximizes efficiency at unit fidelity:
    kappa_i * sqrt(1 + 2 C_i).  Infinite for a lossless cavity."""
    c_i = intrinsic_cooperativity(system, kappa_i)
    if math.isinf(c_i):
        return math.inf
    return kappa_i * math.sqrt(1.0 + 2.0 * c_i)


def eta_max(c_i: float) -> float:
    """Best possible efficiency at unit fidelity for intrinsic cooperativity c_i."""
    if c_i < 0:
        raise ConfigError("cooperativity must be non-negative")
    if math.isinf(c_i):
        return 1.0
    return (c_i / (math.sqrt(1.0 + 2.0 * c_i) + 1.0 + c_i)) ** 2


@dataclass(frozen=True)
class LandmarkParameters:
    """Characteristic coupling rates of the fidelity/efficiency trade-off.

    kappa_1: largest coupling where the *unoptimized* gate still reaches
             unit fidelity; delta_c_1 / delta_a_1 are the matching detunings.
    kappa_2: optimal coupling (max efficiency at unit fidelity).
    kappa_3: coupling maximizing efficiency regardless of fidelity;
             fidelity_3 / eta_3 are the values there.  NaN-flagged when
             c_i <= 1 (no interior maximum exists).
    """

    c_i: float
    kappa_1: float
    kappa_2: float
    kappa_3: float
    delta_c_1: float
    delta_a_1: float
    eta_2: float
    fidelity_3: float
    eta_3: float


def landmark_parameters(system: LambdaSystem, kappa_i: float) -> LandmarkParameters:
    if kappa_i <= 0:
        raise ConfigError("landmarks need kappa_i > 0")
    c = intrinsic_cooperativity(system, kappa_i)
    gamma = system.gamma
    kappa_1 = 0.5 * kappa_i * math.sqrt((4.0 + 8.0 * c + 3.0 * c * c) / (1.0 + c))
    kappa_2 = kappa_i * math.sqrt(1.0 + 2.0 * c)
    delta_c_1 = kappa_i * c / (2.0 * math.sqrt(1.0 + c))
    delta_a_1 = gamma * math.sqrt(1.0 + c)
    if c > 1.0:
        kappa_3 = kappa_i * (c - 1.0)
        poly = 20.0 - 16.0 * c + 5.0 * c * c
        fidelity_3 = 4.0 * (c - 1.0) ** 2 / poly
        eta_3 = poly / (9.0 * c * c)
    else:
        kappa_3 = float("nan")
        fidelity_3 = float("nan")
        eta_3 = float("nan")
    return LandmarkParameters(
        c_i=c,
        kappa_1=kappa_1,
        kappa_2=kappa_2,
        kappa_3=kappa_3,
        delta_c_1=delta_c_1,
        delta_a_1=delta_a_1,
        eta_2=eta_max(c),
        fidelity_3=fidelity_3,
        eta_3=eta_3,
    )


@dataclass(frozen=True)
class DetuningBranches:
    """The +/- pair of unit-fidelity working points for a symmetric system."""

    plus: tuple[float, float]  # (delta_c, delta_a)
    minus: tuple[float, float]


def symmetric_optimal_detunings(
    system: LambdaSystem, cavity: CavityParams
) -> DetuningBranches:
    """Detunings restoring unit fidelity for kappa_i < kappa_ex <= kappa_opt.

    Requires equal leg couplings and no Zeeman splitting.  Derivation:
    demanding that the no-flip reflection amplitude vanish for every input
    gives gamma + i delta_a = -2 g^2 (kappa_i + i delta_c) /
    ((kappa_t + i delta_c)(kappa_i - kappa_ex + i delta_c)); the real part
    is a quadratic in delta_c^2.
    """
    g2d = abs(system.g_down) ** 2
    g2u = abs(system.g_up) ** 2
    if abs(g2d - g2u) > 1e-9 * max(g2d, g2u):
        raise ConfigError("analytic working points require |g_down| == |g_up|")
    g2 = g2d
    kappa_i = cavity.kappa_i
    kappa_ex = cavity.kappa_ex
    kappa_t = cavity.kappa_t
    gamma = system.gamma
    if kappa_i <= 0:
        raise SingularConfigError(
            "no finite-detuning unit-fidelity point exists for kappa_i = 0"
        )
    if kappa_ex <= kappa_i:
        raise ConfigError("unit fidelity requires an overcoupled cavity (kappa_ex > kappa_i)")
    k_opt = optimal_coupling(system, kappa_i)
    if kappa_ex > k_opt * (1.0 + 1e-12):
        raise ConfigError(
            f"kappa_ex={kappa_ex} exceeds the optimal coupling {k_opt}; "
            "no detuning choice restores unit fidelity"
        )
    a = kappa_t * (kappa_ex - kappa_i)
    # gamma * ((a+s)^2 + 4 kappa_i^2 s) = 2 g^2 kappa_i (a - s),  s = delta_c^2
    qa = gamma
    qb = 2.0 * gamma * a + 4.0 * gamma * kappa_i**2 + 2.0 * g2 * kappa_i
    qc = gamma * a * a - 2.0 * g2 * kappa_i * a
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0:
        raise SingularConfigError("no real unit-fidelity detuning at this coupling")
    s = (-qb + math.sqrt(disc)) / (2.0 * qa)
    s = max(s, 0.0)
    delta_c = math.sqrt(s)
    denom = (a + s) ** 2 + 4.0 * kappa_i**2 * s
    delta_a = (
        2.0 * g2 * delta_c * (a + s + 2.0 * kappa_i**2) / denom if denom > 0 else 0.0
    )
    return DetuningBranches(plus=(delta_c, delta_a), minus=(-delta_c, -delta_a))


def fidelity_gain_estimate(kappa_i: float, kappa_ex: float, c_t: float) -> float:
    """Fidelity recovered by detuning optimization near the symmetric point.

    The unoptimized infidelity scales with the impedance mismatch
    a = kappa_i / kappa_ex - 1 / (2 c_t); optimization removes it, so the
    gain is a^2 / (1 + a^2) ... expressed through the mismatch amplitude.
    """
    if kappa_ex <= 0 or c_t <= 0:
        raise ConfigError("kappa_ex and c_t must be positive")
    a = abs(kappa_i / kappa_ex - 1.0 / (2.0 * c_t)) ** 2
    return a / (1.0 + a)


# ---------------------------------------------------------------------------
# numerical optimization over (delta_c, delta_a, B)


@dataclass(frozen=True)
class OptimizationBounds:
    """Box bounds, rad/s for the detunings and gauss for the field.

    Setting lo == hi pins that axis (e.g. b_field=(0, 0) for no bias field).
    """

    delta_c: tuple[float, float]
    delta_a: tuple[float, float]
    b_field: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        for lo, hi in (self.delta_c, self.delta_a, self.b_field):
            if hi < lo:
                raise ConfigError("bound upper edge below lower edge")


@dataclass(frozen=True)
class OptimizationResult:
    delta_c: float
    delta_a: float
    b_field: float
    mean_fidelity: float
    mean_efficiency: float
    baseline_fidelity: float
    converged: bool
    n_evaluations: int


def _field_axis(lo: float, hi: float, n: int) -> np.ndarray:
    """Grid for the bias-field axis.  The Zeeman response spans many decades
    (the useful scale is kappa_t over the Larmor slope, often far below the
    bound), so straddle zero with sign-symmetric geometric spacing."""
    if lo == hi:
        return np.array([lo])
    top = max(abs(lo), abs(hi))
    if lo < 0.0 < hi or lo == 0.0 or hi == 0.0:
        decades = np.geomspace(top * 1e-6, top, (n - 1) // 2)
        axis = np.concatenate([-decades[::-1], [0.0], decades])
    else:
        axis = np.linspace(lo, hi, n)
    return axis[(axis >= lo) & (axis <= hi)]


def optimize_asymmetric(
    system: LambdaSystem,
    cavity: CavityParams,
    bounds: OptimizationBounds,
    sampler: SamplerSpec,
    kappa_s: float = 0.0,
    grid_points: int = 21,
    n_starts: int = 5,
) -> OptimizationResult:
    """Maximize the ensemble-mean fidelity over the drive knobs.

    One fixed batch of sampled states (common random numbers) is reused for
    every candidate point, so the search is deterministic given the sampler
    seed.  A coarse grid pre-scan seeds multi-start Nelder-Mead; the
    baseline (all knobs at zero, clipped into bounds) is always kept as a
    candidate, so the result never falls below it.
    """
    a, b, ap, bp = sample_qubit_pairs(sampler)
    # make the batch conjugation-symmetric: P(conj state; knobs) equals
    # P(state; -knobs) for real couplings, so the +/- sign branches become
    # exactly degenerate and the canonicalization below is deterministic
    a = np.concatenate([a, np.conj(a)])
    b = np.concatenate([b, np.conj(b)])
    ap = np.concatenate([ap, np.conj(ap)])
    bp = np.concatenate([bp, np.conj(bp)])
    n_eval = 0

    def mean_fid(dc: float, da: float, bf: float) -> float:
        nonlocal n_eval
        n_eval += 1
        drive = DriveSettings(delta_c=dc, delta_a=da, b_field=bf, kappa_s=kappa_s)
        dets = effective_detunings(drive, system)
        p_d, p_b = gate_probabilities(a, b, ap, bp, system, cavity, dets)
        eta = p_d + p_b
        ok = eta > 1e-300
        if not np.any(ok):
            return 0.0
        return float(np.mean(p_b[ok] / eta[ok]))

    box = [bounds.delta_c, bounds.delta_a, bounds.b_field]
    free = [i for i, (lo, hi) in enumerate(box) if hi > lo]
    pinned = [lo for lo, _ in box]

    def full_point(x):
        p = list(pinned)
        for xi, i in zip(x, free):
            lo, hi = box[i]
            p[i] = lo + xi * (hi - lo)
        return p

    baseline = [min(max(0.0, lo), hi) for lo, hi in box]
    f_baseline = mean_fid(*baseline)

    if not free:
        return OptimizationResult(
            *baseline,
            mean_fidelity=f_baseline,
            mean_efficiency=_mean_eta(system, cavity, baseline, kappa_s, (a, b, ap, bp)),
            baseline_fidelity=f_baseline,
            converged=False,
            n_evaluations=n_eval,
        )

    axes = []
    for i, (lo, hi) in enumerate(box):
        if hi == lo:
            axes.append(np.array([lo]))
        elif i == 2:
            axes.append(_field_axis(lo, hi, grid_points))
        else:
            axes.append(np.linspace(lo, hi, grid_points))
    grid_pts = []
    for dc in axes[0]:
        for da in axes[1]:
            for bf in axes[2]:
                grid_pts.append((dc, da, bf))
    grid_f = np.array([mean_fid(*p) for p in grid_pts])
    order = np.argsort(grid_f)[::-1]

    best_pt = list(baseline)
    best_f = f_baseline
    starts = [grid_pts[i] for i in order[:n_starts]]
    for p0 in starts:
        x0 = np.array(
            [(p0[i] - box[i][0]) / (box[i][1] - box[i][0]) for i in free]
        )
        simplex = [x0]
        for k in range(len(free)):
            v = x0.copy()
            v[k] = v[k] + 0.06 if v[k] + 0.06 <= 1.0 else v[k] - 0.06
            simplex.append(v)
        res = minimize(
            lambda x: -mean_fid(*full_point(x)),
            x0,
            method="Nelder-Mead",
            bounds=[(0.0, 1.0)] * len(free),
            options={
                "initial_simplex": np.array(simplex),
                "xatol": 1e-5,
                "fatol": 1e-12,
                "maxiter": 600 * len(free),
            },
        )
        cand = full_point(np.clip(res.x, 0.0, 1.0))
        f_cand = mean_fid(*cand)
        if f_cand > best_f:
            best_f = f_cand
            best_pt = cand
    for i in order[: n_starts]:
        if grid_f[i] > best_f:
            best_f = float(grid_f[i])
            best_pt = list(grid_pts[i])

    # sign symmetry: for real couplings the mirrored point is equivalent;
    # prefer the branch with delta_a >= 0 when both are admissible
    mirror = [-v for v in best_pt]
    if all(box[i][0] <= mirror[i] <= box[i][1] for i in range(3)):
        f_mirror = mean_fid(*mirror)
        if f_mirror > best_f + 1e-12 or (
            abs(f_mirror - best_f) <= 1e-12 and mirror[1] > best_pt[1]
        ):
            best_pt, best_f = mirror, f_mirror

    converged = best_f > f_baseline
    return OptimizationResult(
        delta_c=best_pt[0],
        delta_a=best_pt[1],
        b_field=best_pt[2],
        mean_fidelity=best_f,
        mean_efficiency=_mean_eta(system, cavity, best_pt, kappa_s, (a, b, ap, bp)),
        baseline_fidelity=f_baseline,
        converged=converged,
        n_evaluations=n_eval,
    )


def _mean_eta(system, cavity, point, kappa_s, samples):
    a, b, ap, bp = samples
    drive = DriveSettings(
        delta_c=point[0], delta_a=point[1], b_field=point[2], kappa_s=kappa_s
    )
    dets = effective_detunings(drive, system)
    p_d, p_b = gate_probabilities(a, b, ap, bp, system, cavity, dets)
    return float(np.mean(p_d + p_b))


# ---------------------------------------------------------------------------
# coupling-rate sweeps


@dataclass(frozen=True)
class SweepPoint:
    kappa_ex: float
    delta_c: float
    delta_a: float
    b_field: float
    mean_fidelity: float
    mean_efficiency: float
    heralded_fidelity: float
    mean_fidelity_0: float
    mean_efficiency_0: float
    heralded_fidelity_0: float


def sweep_coupling(
    system: LambdaSystem,
    kappa_i: float,
    kappa_ex_values,
    sampler: SamplerSpec,
    optimize: bool = True,
    branch: str = "plus",
) -> list[SweepPoint]:
    """Gate statistics vs coupling rate, with and without detuning correction.

    Symmetric systems use the analytic working points wherever they exist
    (kappa_i < kappa_ex <= kappa_opt); beyond the optimal coupling the
    uncorrected point is reported as the optimum.  Asymmetric systems fall
    back to the numerical optimizer with default detuning bounds.
    """
    if branch not in ("plus", "minus"):
        raise ConfigError("branch must be 'plus' or 'minus'")
    a, b, ap, bp = sample_qubit_pairs(sampler)
    g2d = abs(system.g_down) ** 2
    g2u = abs(system.g_up) ** 2
    symmetric = abs(g2d - g2u) <= 1e-9 * max(g2d, g2u)
    k_opt = optimal_coupling(system, kappa_i) if kappa_i > 0 else math.inf

    def stats(cavity, dc, da):
        dets = effective_detunings(DriveSettings(delta_c=dc, delta_a=da), system)
        p_d, p_b = gate_probabilities(a, b, ap, bp, system, cavity, dets)
        eta = p_d + p_b
        fid = p_b / np.where(eta > 1e-300, eta, 1.0)
        sum_eta = float(np.sum(eta))
        her = float(np.sum(p_b) / sum_eta) if sum_eta > 0 else float("nan")
        return float(np.mean(fid)), float(np.mean(eta)), her

    out = []
    for kex in kappa_ex_values:
        cavity = CavityParams(kappa_ex=float(kex), kappa_i=kappa_i)
        f0, e0, h0 = stats(cavity, 0.0, 0.0)
        dc = da = 0.0
        f1, e1, h1 = f0, e0, h0
        if optimize:
            if symmetric:
                if kappa_i < kex <= k_opt:
                    br = symmetric_optimal_detunings(system, cavity)
                    dc, da = br.plus if branch == "plus" else br.minus
                    f1, e1, h1 = stats(cavity, dc, da)
            else:
                kt = cavity.kappa_t
                res = optimize_asymmetric(
                    system,
                    cavity,
                    OptimizationBounds(
                        delta_c=(-10.0 * kt, 10.0 * kt),
                        delta_a=(-15.0 * system.gamma, 15.0 * system.gamma),
                    ),
                    sampler,
                )
                dc, da = res.delta_c, res.delta_a
                f1, e1 = res.mean_fidelity, res.mean_efficiency
                _, _, h1 = stats(cavity, dc, da)
        out.append(
            SweepPoint(
                kappa_ex=float(kex),
                delta_c=dc,
                delta_a=da,
                b_field=0.0,
                mean_fidelity=f1,
                mean_efficiency=e1,
                heralded_fidelity=h1,
                mean_fidelity_0=f0,
                mean_efficiency_0=e0,
                heralded_fidelity_0=h0,
            )
        )
    return out
