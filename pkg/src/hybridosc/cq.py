"""Hybrid classical-quantum layer built on the classical solver stack.

A classical oscillator (mass m_C, stiffness k_C, friction alpha, diffusion D)
couples through a position-position spring to a quantum oscillator
(m_Q, k_Q).  Consistency of the hybrid dynamics demands both classical
diffusion and quantum decoherence, with rates bounded by 4 D D0 >= 1; this
module saturates the bound, D0 = 1/(4 D), the minimal-decoherence choice.

For quadratic potentials the hybrid evolution of all symmetrised moments
maps exactly onto the two-oscillator classical stochastic system of
:mod:`hybridosc.model` under

    q2 -> Q+ (average branch),  q2~ -> i Q- (difference branch),
    D1 -> D,                    D2 -> D0 lam^2 hbar^2 = lam^2 hbar^2 / (4 D).

Everything downstream (stability, stationary covariances, spectral
correlators) then applies verbatim to the hybrid observables.  hbar defaults
to 1 and is exposed only as an overall scale on the induced decoherence
diffusion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import OverdampedUnsupported, TradeoffViolation
from .model import OscillatorParams, SystemParams
from .steadystate import closed_form_covariances


@dataclass(frozen=True)
class CQParams:
    """Parameters of the hybrid pair, trade-off saturated by default.

    ``decoherence`` may be given explicitly; values violating
    4 * diffusion * decoherence >= 1 are rejected.  Omitting it selects the
    saturated rate 1/(4 * diffusion).
    """

    classical_mass: float
    classical_spring: float
    damping: float
    diffusion: float
    quantum_mass: float
    quantum_spring: float
    coupling: float
    decoherence: float | None = None
    hbar: float = 1.0

    def __post_init__(self) -> None:
        for name in (
            "classical_mass",
            "classical_spring",
            "damping",
            "diffusion",
            "quantum_mass",
            "quantum_spring",
            "coupling",
            "hbar",
        ):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.classical_mass <= 0 or self.quantum_mass <= 0:
            raise ValueError("masses must be positive")
        if min(self.classical_spring, self.quantum_spring, self.damping, self.coupling) < 0:
            raise ValueError("springs, damping and coupling must be >= 0")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        if self.diffusion < 0:
            raise ValueError("diffusion must be >= 0")
        if self.coupling > 0 and self.diffusion <= 0:
            raise TradeoffViolation(
                "nonzero coupling requires classical diffusion (the trade-off bound "
                "cannot be met at D = 0)"
            )
        if self.decoherence is not None:
            d0 = float(self.decoherence)
            object.__setattr__(self, "decoherence", d0)
            if self.diffusion > 0 and 4.0 * self.diffusion * d0 < 1.0 - 1e-12:
                raise TradeoffViolation(
                    f"4*D*D0 = {4.0 * self.diffusion * d0:.6g} < 1 violates the "
                    "decoherence-diffusion bound"
                )

    @property
    def decoherence_rate(self) -> float:
        """D0; the saturated value 1/(4 D) unless supplied explicitly."""
        if self.decoherence is not None:
            return self.decoherence
        return 1.0 / (4.0 * self.diffusion)

    @property
    def classical_frequency(self) -> float:
        return math.sqrt(self.classical_spring / self.classical_mass)

    @property
    def quantum_frequency(self) -> float:
        return math.sqrt(self.quantum_spring / self.quantum_mass)

    @property
    def damping_rate(self) -> float:
        return self.damping / self.classical_mass

    @property
    def effective_temperature(self) -> float:
        """T_C = D / (2 alpha), the Einstein-relation temperature of the bath."""
        if self.damping == 0.0:
            return math.inf
        return self.diffusion / (2.0 * self.damping)


def map_to_classical(cq: CQParams) -> SystemParams:
    """The equivalent classical pair for symmetrised hybrid observables.

    Oscillator 1 is the classical one unchanged; oscillator 2 represents the
    quantum average branch, undamped, with induced diffusion
    D2 = D0 * coupling^2 * hbar^2.  At zero coupling the induced diffusion
    vanishes: decoupled, the quantum oscillator suffers no decoherence.
    """
    induced = cq.decoherence_rate * cq.coupling**2 * cq.hbar**2
    return SystemParams(
        osc1=OscillatorParams(
            mass=cq.classical_mass,
            spring_constant=cq.classical_spring,
            damping=cq.damping,
            diffusion=cq.diffusion,
        ),
        osc2=OscillatorParams(
            mass=cq.quantum_mass,
            spring_constant=cq.quantum_spring,
            damping=0.0,
            diffusion=induced,
        ),
        coupling=cq.coupling,
    )


class Occupation(NamedTuple):
    n: float
    temperature: float


def occupation_number(cq: CQParams) -> Occupation:
    """Stationary excitation number of the quantum oscillator.

    Identical-oscillator, leading-order closed form in the effective
    temperature T_C = D/(2 alpha):

        N = (omega/(2 T_C) + 2 T_C/omega - 1) / 2.

    N is minimised at T_C = omega/2 where N = 1/2: the oscillator can never
    be emptied under this dynamics.  For T_C >> omega, N ~ T_C/omega
    (thermalisation to the classical temperature).
    """
    w = cq.quantum_frequency
    if w == 0.0:
        raise ValueError("occupation number requires a confining quantum spring")
    t_c = cq.effective_temperature
    if not math.isfinite(t_c):
        raise ValueError("occupation number requires nonzero damping")
    if t_c <= 0:
        raise ValueError("effective temperature must be positive")
    n = 0.5 * (w / (2.0 * t_c) + 2.0 * t_c / w - 1.0)
    return Occupation(n=float(n), temperature=float(t_c))


def occupation_from_keldysh(cq: CQParams) -> float:
    """Excitation number read off the equal-time statistical propagator.

    Uses N = m_Q omega_Q <<Q+ Q+>>(0) - 1/2 with the leading-order
    equal-time value gamma1/(8 D) + D/(2 gamma1 omega^2 m^2).  This is the
    number the mapped dynamics actually produces; it differs from
    :func:`occupation_number` in the decoherence-induced term (factor 4 on
    omega/(2 T_C)), a normalisation mismatch between the two published
    routes that we deliberately expose rather than hide.  Its minimum is 0
    at T_C = omega/4.
    """
    g1 = cq.damping_rate
    m = cq.quantum_mass
    w = cq.quantum_frequency
    d = cq.diffusion
    if g1 <= 0 or w <= 0 or d <= 0:
        raise ValueError("requires damping, diffusion and a confining quantum spring")
    gk0 = g1 / (8.0 * d) + d / (2.0 * g1 * w**2 * m**2)
    return float(m * w * gk0 - 0.5)


@dataclass(frozen=True)
class HybridCorrelators:
    """Leading-order hybrid two-point functions on a time grid.

    ``keldysh`` is <<Q+(0) Q+(t)>> (the statistical propagator), ``classical``
    is <<q(0) q(t)>>, ``classical_response`` is <<q(0) q~(t)>> (real,
    supported on t <= 0) and ``retarded`` is <<Q+(0) Q-(t)>> (imaginary,
    supported on t <= 0).  <<Q- Q->> vanishes identically and is not stored.
    """

    times: np.ndarray
    classical: np.ndarray
    keldysh: np.ndarray
    classical_response: np.ndarray
    retarded: np.ndarray
    mass_frequency_product: float

    @property
    def occupation_equal_time(self) -> float:
        """m_Q omega_Q G^K(0) - 1/2 evaluated on this table (diagnostic)."""
        idx = int(np.argmin(np.abs(self.times)))
        return float(self.mass_frequency_product * self.keldysh[idx] - 0.5)


def hybrid_correlators(cq: CQParams, t_grid: np.ndarray) -> HybridCorrelators:
    """Printed leading-order correlators for identical oscillators.

    With m* = m_C = m_Q, omega* the common frequency, s = sqrt(omega*^2 -
    gamma1^2/4) and T_C-independent prefactors:

        <<q(0)q(t)>>   = D/(2 g1 w^2 m^2) e^{-g1|t|/2} (cos s|t| + g1/(2s) sin s|t|)
        <<Q+(0)Q+(t)>> = (g1/(8D) + D/(2 g1 w^2 m^2)) cos(w|t|)
        <<q(0)q~(t)>>  = (1/m) e^{g1 t/2} sin(s t)/s * theta(-t)
        <<Q+(0)Q-(t)>> = -(i/(m w)) sin(w t) * theta(-t)

    Every entry is finite and coupling-independent at this order: the
    trade-off makes the induced decoherence scale as lam^2, cancelling the
    lam^-2 growth the classical analogue would show.  Requires (near-)
    identical oscillator parameters; for the general case map the system to
    its classical equivalent and use :mod:`hybridosc.spectral`.
    """
    if not (
        np.isclose(cq.classical_mass, cq.quantum_mass, rtol=1e-6)
        and np.isclose(cq.classical_frequency, cq.quantum_frequency, rtol=1e-6)
    ):
        raise ValueError(
            "printed hybrid correlators assume identical oscillators; use "
            "map_to_classical + spectral for general parameters"
        )
    m = cq.classical_mass
    w = cq.classical_frequency
    g1 = cq.damping_rate
    d = cq.diffusion
    if g1 <= 0 or d <= 0:
        raise ValueError("requires damping and diffusion on the classical oscillator")
    if w <= g1 / 2:
        raise OverdampedUnsupported("printed hybrid correlators require the underdamped regime")
    s = math.sqrt(w**2 - g1**2 / 4)

    t = np.asarray(t_grid, dtype=float)
    at = np.abs(t)
    classical = (
        d / (2 * g1 * w**2 * m**2)
        * np.exp(-g1 * at / 2)
        * (np.cos(s * at) + g1 / (2 * s) * np.sin(s * at))
    )
    keldysh = (g1 / (8 * d) + d / (2 * g1 * w**2 * m**2)) * np.cos(w * at)
    support = t < 0
    classical_response = np.where(support, (1 / m) * np.exp(g1 * t / 2) * np.sin(s * t) / s, 0.0)
    retarded = np.where(support, -1j / (m * w) * np.sin(w * t), 0.0 + 0.0j)
    return HybridCorrelators(
        times=t,
        classical=classical,
        keldysh=keldysh,
        classical_response=classical_response,
        retarded=retarded,
        mass_frequency_product=m * w,
    )


_EQUAL_TIME_SLOTS = {
    "qq": (0, 0),
    "pp": (1, 1),
    "QQ": (2, 2),
    "PP": (3, 3),
    "qQ": (0, 2),
    "Pq": (0, 3),
    "pQ": (2, 1),
    "pP": (1, 3),
}


def hybrid_equal_time(cq: CQParams) -> dict[str, float]:
    """All non-zero equal-time second moments of the hybrid state.

    These are the closed-form stationary covariances of the mapped classical
    pair with D1 -> D and D2 -> lam^2/(4D), relabelled with hybrid variable
    names: lowercase q, p for the classical oscillator, uppercase Q, P for
    the quantum one.  Notable entries:

        <<P q>> = -lam/(8 D),    <<p Q>> = +(lam/(8 D)) (m_C/m_Q),

    equal and opposite up to the mass ratio; both vanish in equilibrium, so
    they are the fingerprint of the non-equilibrium stationary state.

    Raises
    ------
    CouplingZero
        At lam = 0 (the closed forms carry 1/lam factors).
    """
    cov = closed_form_covariances(map_to_classical(cq))
    return {name: float(cov[idx]) for name, idx in _EQUAL_TIME_SLOTS.items()}


def gibbs_covariances(params: SystemParams, temperature: float) -> np.ndarray:
    """Equal-time covariances of the classical Gibbs state exp(-H/T).

    H is the full quadratic Hamiltonian including the coupling spring, so
    this is a 4x4 Gaussian moment computation: C = T * W^{-1} with W the
    energy weight matrix.  Positions and momenta decouple; momenta are
    diagonal with m_i T.
    """
    if temperature <= 0 or not math.isfinite(temperature):
        raise ValueError("temperature must be positive and finite")
    o1, o2, lam = params.osc1, params.osc2, params.coupling
    weight = np.array(
        [
            [o1.spring_constant + lam, 0.0, -lam, 0.0],
            [0.0, 1.0 / o1.mass, 0.0, 0.0],
            [-lam, 0.0, o2.spring_constant + lam, 0.0],
            [0.0, 0.0, 0.0, 1.0 / o2.mass],
        ]
    )
    return temperature * np.linalg.inv(weight)


def high_temperature_forms(cq: CQParams) -> dict[str, float]:
    """The five printed large-D equal-time moments.

    These coincide exactly with the Gibbs covariances at T = T_C for the
    coupled quadratic Hamiltonian; the q-p cross moments are zero here,
    reflecting equilibrium.
    """
    t_c = cq.effective_temperature
    m_c, m_q = cq.classical_mass, cq.quantum_mass
    w_cs = cq.classical_frequency**2
    w_qs = cq.quantum_frequency**2
    lam = cq.coupling
    l_c = lam / m_c
    l_q = lam / m_q
    return {
        "pp": m_c * t_c,
        "PP": m_q * t_c,
        "qq": t_c / m_c / (w_qs * l_c / (l_q + w_qs) + w_cs),
        "QQ": t_c / m_q / (w_cs * l_q / (l_c + w_cs) + w_qs),
        "qQ": t_c / m_q / (w_qs + (m_c * w_cs / lam) * (w_qs + l_q)),
    }


@dataclass(frozen=True)
class ThermalReport:
    """Hybrid stationary moments compared against the Gibbs state at T_C.

    Deviations are normalised like correlations: |hybrid - gibbs| divided by
    the geometric mean of the corresponding Gibbs variances, which keeps the
    q-p cross moments (zero in equilibrium) comparable with the rest.
    """

    temperature: float
    equal_time: dict
    gibbs: dict
    high_temperature: dict
    deviation_by_moment: dict
    max_deviation_gibbs: float
    max_deviation_high_t: float


def thermal_limit(cq: CQParams) -> ThermalReport:
    """Quantify how close the stationary hybrid state is to thermal.

    At large D (T_C >> omega) all moments converge to the Gibbs values at
    beta = 1/T_C, with the non-equilibrium q-p cross moments dying off as
    1/D; the normalised deviations shrink like 1/D^2.
    """
    t_c = cq.effective_temperature
    mapped = map_to_classical(cq)
    exact = hybrid_equal_time(cq)
    gibbs_cov = gibbs_covariances(mapped, t_c)
    gibbs = {name: float(gibbs_cov[idx]) for name, idx in _EQUAL_TIME_SLOTS.items()}
    high_t = high_temperature_forms(cq)

    diag_of = {
        "qq": ("qq", "qq"), "pp": ("pp", "pp"), "QQ": ("QQ", "QQ"), "PP": ("PP", "PP"),
        "qQ": ("qq", "QQ"), "Pq": ("qq", "PP"), "pQ": ("pp", "QQ"), "pP": ("pp", "PP"),
    }

    def normalised(reference: dict) -> dict:
        out = {}
        for name in _EQUAL_TIME_SLOTS:
            ref = reference.get(name, 0.0)
            ii, jj = diag_of[name]
            scale = math.sqrt(gibbs[ii] * gibbs[jj])
            out[name] = abs(exact[name] - ref) / scale
        return out

    dev_gibbs = normalised(gibbs)
    dev_high_t = normalised({**{k: 0.0 for k in _EQUAL_TIME_SLOTS}, **high_t})
    return ThermalReport(
        temperature=float(t_c),
        equal_time=exact,
        gibbs=gibbs,
        high_temperature=high_t,
        deviation_by_moment=dev_gibbs,
        max_deviation_gibbs=max(dev_gibbs.values()),
        max_deviation_high_t=max(dev_high_t.values()),
    )
