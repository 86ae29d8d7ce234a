"""Frequency-domain two-point functions, poles, residue transforms.

Stationary correlation and response functions of the coupled pair, obtained
by inverting the Gaussian kernel of the doubled-field (response-variable)
representation of the dynamics.  Fields are ordered (q1, q1~, q2, q2~) where
the tilde marks the response variable of each oscillator.

Conventions (fixed once; every formula below is stated in these):

* Fourier transform pair  G(t) = (1/2pi) \\int G(w) e^{-iwt} dw.
* With A(w)  = m1 w^2 - i alpha w - k1 - lam,
       A*(w) = m1 w^2 + i alpha w - k1 - lam   (coefficient conjugate),
       B(w)  = m2 w^2 - k2 - lam,
  the response denominator is  D(w) = A(w) B(w) - lam^2.  For a stable
  system all four roots of D lie strictly in the upper half plane and equal
  i times the drift-matrix eigenvalues; its coefficient conjugate D*(w) has
  the reflected roots in the lower half plane, and |D(w)|^2 = D(w) D*(w) on
  the real axis.
* Consequently response functions, which carry 1/D(w), are supported on
  t <= 0: a response-variable insertion correlates only with observations
  made after it.
* Correlation entries carry 1/|D(w)|^2 and decay in both time directions.

The four upper roots come in the reflection pattern {W1, W2, -W1*, -W2*};
W1 and W2 are the two independent generators in the open first quadrant
(W1 the more strongly damped one, continuously connected to the damped
oscillator's pole; W2 to the undamped oscillator's).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ClassificationFailure,
    CouplingZero,
    DegeneratePoles,
    NotStable,
    OverdampedUnsupported,
    PerfectCorrelation,
    PoleOnAxis,
)
from .model import SystemParams

FIELD_ORDER = ("q1", "q1_tilde", "q2", "q2_tilde")

_NEWTON_ROUNDS = 2
_AXIS_TOL = 1e-9          # relative: treat |Re root| below this as "on the imaginary axis"
_SEPARATION_TOL = 1e-8    # relative minimum pole separation for residue arithmetic
_IMAG_LEAK_TOL = 1e-8     # tolerated imaginary leakage in provably real outputs


# ---------------------------------------------------------------------------
# frequency-domain kernel and its inverse


def _abc(params: SystemParams, w):
    o1, o2, lam = params.osc1, params.osc2, params.coupling
    w = np.asarray(w, dtype=complex)
    a = o1.mass * w**2 - 1j * o1.damping * w - o1.spring_constant - lam
    a_conj = o1.mass * w**2 + 1j * o1.damping * w - o1.spring_constant - lam
    b = o2.mass * w**2 - o2.spring_constant - lam
    return a, a_conj, b


def greens_inverse(params: SystemParams, omega: float) -> np.ndarray:
    """The 4x4 frequency-domain kernel whose inverse is the Green's function.

    Entry layout in (q1, q1~, q2, q2~) order: the (q, q~) slots hold the
    deterministic operators A*(w) / A(w) / B(w), the (q~, q~) slots the noise
    strengths -D1 / -D2, and the coupling sits on the q/q~ cross blocks.
    """
    o1, o2, lam = params.osc1, params.osc2, params.coupling
    a, a_conj, b = _abc(params, omega)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = a_conj
    m[0, 3] = lam
    m[1, 0] = a
    m[1, 1] = -o1.diffusion
    m[1, 2] = lam
    m[2, 1] = lam
    m[2, 3] = b
    m[3, 0] = lam
    m[3, 2] = b
    m[3, 3] = -o2.diffusion
    return m


@dataclass(frozen=True)
class GreensFrequency:
    """Closed-form Green's function at one real frequency."""

    omega: float
    matrix: np.ndarray

    field_order = FIELD_ORDER

    @property
    def g11(self) -> complex:
        return complex(self.matrix[0, 0])

    @property
    def g22(self) -> complex:
        return complex(self.matrix[2, 2])

    @property
    def g12(self) -> complex:
        return complex(self.matrix[0, 2])

    @property
    def g21(self) -> complex:
        return complex(self.matrix[2, 0])

    @property
    def response_11(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def response_22(self) -> complex:
        return complex(self.matrix[2, 3])

    @property
    def response_21(self) -> complex:
        return complex(self.matrix[2, 1])


def greens(params: SystemParams, omega: float) -> GreensFrequency:
    """Closed-form components of the inverse kernel at real ``omega``.

    Equal to the numerical inverse of :func:`greens_inverse` to full
    precision; assembled from the factor functions instead so each component
    is available in the rational form the residue transform needs:

        G_q1q1 = (D1 B^2 + lam^2 D2) / |D|^2
        G_q2q2 = (D2 A A* + lam^2 D1) / |D|^2
        G_q1q2 = -lam (D1 B + D2 A*) / |D|^2       (conjugate in slot q2,q1)
        G_q1q1~ = B / D,   G_q2q2~ = A / D,   G_q2q1~ = G_q1q2~ = -lam / D

    with the remaining non-zero slots fixed by coefficient conjugation and
    the response-variable diagonal identically zero.

    Raises
    ------
    PoleOnAxis
        If |D(omega)| vanishes at the requested real frequency relative to
        the size of its constituent terms (reachable only at zero coupling,
        where the undamped factor has real zeros).
    """
    o1, o2, lam = params.osc1, params.osc2, params.coupling
    d1, d2 = o1.diffusion, o2.diffusion
    a, a_conj, b = _abc(params, omega)
    den_up = a * b - lam**2
    den_lo = a_conj * b - lam**2
    # magnitude of the constituent terms, immune to cancellation inside A or B
    w = abs(float(omega))
    a_size = o1.mass * w**2 + o1.damping * w + o1.spring_constant + lam
    b_size = o2.mass * w**2 + o2.spring_constant + lam
    scale = a_size * b_size + lam**2
    if abs(den_up) <= 1e-12 * scale:
        raise PoleOnAxis(f"denominator vanishes at omega = {omega}")
    dd = den_up * den_lo

    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = (d1 * b**2 + lam**2 * d2) / dd
    m[2, 2] = (d2 * a * a_conj + lam**2 * d1) / dd
    m[0, 2] = -lam * (d1 * b + d2 * a_conj) / dd
    m[2, 0] = -lam * (d1 * b + d2 * a) / dd
    m[0, 1] = b / den_up
    m[1, 0] = b / den_lo
    m[2, 3] = a / den_up
    m[3, 2] = a_conj / den_lo
    m[2, 1] = -lam / den_up
    m[0, 3] = -lam / den_up
    m[1, 2] = -lam / den_lo
    m[3, 0] = -lam / den_lo
    return GreensFrequency(omega=float(omega), matrix=m)


# ---------------------------------------------------------------------------
# poles


def response_denominator_coefficients(params: SystemParams) -> np.ndarray:
    """Descending coefficients of D(w) = A(w) B(w) - lam^2 (quartic in w)."""
    o1, o2, lam = params.osc1, params.osc2, params.coupling
    m1, m2 = o1.mass, o2.mass
    k1l = o1.spring_constant + lam
    k2l = o2.spring_constant + lam
    al = o1.damping
    return np.array(
        [
            m1 * m2,
            -1j * al * m2,
            -(m1 * k2l + m2 * k1l),
            1j * al * k2l,
            k1l * k2l - lam**2,
        ]
    )


def _polyval(coeffs: np.ndarray, x):
    out = np.zeros_like(np.asarray(x, dtype=complex))
    for c in coeffs:
        out = out * x + c
    return out


def _polyder(coeffs: np.ndarray) -> np.ndarray:
    n = len(coeffs) - 1
    return coeffs[:-1] * np.arange(n, 0, -1)


def _upper_roots(params: SystemParams) -> np.ndarray:
    """Roots of the response denominator, Newton-polished, sorted by real part."""
    coeffs = response_denominator_coefficients(params)
    roots = np.roots(coeffs)
    deriv = _polyder(coeffs)
    for _ in range(_NEWTON_ROUNDS):
        slope = _polyval(deriv, roots)
        ok = np.abs(slope) > 0
        roots = np.where(ok, roots - _polyval(coeffs, roots) / np.where(ok, slope, 1.0), roots)
    return roots[np.argsort(roots.real)]


@dataclass(frozen=True)
class PoleSet:
    """The two independent first-quadrant poles and the full upper-plane set.

    ``omega1``/``omega2`` are the generators: omega1 carries the larger
    imaginary part (the heavily damped branch), omega2 the smaller (the
    branch whose damping is coupling-induced).  ``upper_roots`` holds all
    four roots {W1, W2, -W1*, -W2*} of the response denominator.
    """

    omega1: complex
    omega2: complex
    upper_roots: np.ndarray

    @property
    def lower_roots(self) -> np.ndarray:
        """Roots of the coefficient-conjugated denominator."""
        return np.conj(self.upper_roots)

    def to_dict(self) -> dict:
        return {
            "omega1": {"re": self.omega1.real, "im": self.omega1.imag},
            "omega2": {"re": self.omega2.real, "im": self.omega2.imag},
            "upper_roots": [[z.real, z.imag] for z in self.upper_roots],
        }


def _root_scale(roots: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(roots))))


def _check_separation(roots: np.ndarray, context: str) -> None:
    n = len(roots)
    scale = _root_scale(roots)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) < _SEPARATION_TOL * scale:
                raise DegeneratePoles(
                    f"{context}: poles {roots[i]:.6g} and {roots[j]:.6g} nearly coincide"
                )


def find_poles(params: SystemParams) -> PoleSet:
    """Locate the independent first-quadrant pole pair.

    Roots are found as companion-matrix eigenvalues of the denominator
    quartic and polished with Newton steps.  The returned pair satisfies the
    reflection structure: together with -conj(pair) it exhausts the quartic's
    roots, and the coefficient-conjugated quartic has exactly the complex
    conjugates as roots.

    Raises
    ------
    DegeneratePoles
        If two roots coincide within tolerance (near-critical damping, or
        couplings so small the undamped branch degenerates).
    ClassificationFailure
        If there are not exactly two roots in the open first quadrant with
        matching mirrors (e.g. zero coupling, or the deeply overdamped
        regime where roots sit on the imaginary axis).
    """
    roots = _upper_roots(params)
    _check_separation(roots, "find_poles")
    scale = _root_scale(roots)
    if np.any(roots.imag <= _AXIS_TOL * scale):
        raise ClassificationFailure(
            "denominator roots do not all lie in the upper half plane; "
            "the system is not strictly stable"
        )
    first_quadrant = [z for z in roots if z.real > _AXIS_TOL * scale]
    if len(first_quadrant) != 2:
        raise ClassificationFailure(
            f"expected 2 first-quadrant poles, found {len(first_quadrant)}"
        )
    mirrors = [z for z in roots if z.real <= _AXIS_TOL * scale]
    for z in first_quadrant:
        if min(abs(w - (-np.conj(z))) for w in mirrors) > 1e-6 * scale:
            raise ClassificationFailure(f"pole {z:.6g} has no mirror partner")
    first_quadrant.sort(key=lambda z: -z.imag)
    return PoleSet(
        omega1=complex(first_quadrant[0]),
        omega2=complex(first_quadrant[1]),
        upper_roots=roots,
    )


def perturbative_poles(params: SystemParams, order: int = 2) -> PoleSet:
    """Small-coupling expansion of the pole pair.

    At ``order=1`` the poles shift only along the real axis:

        W1 = sqrt(w1^2 - g1^2/4) + i g1/2 + lam/(2 m1 sqrt(w1^2 - g1^2/4))
        W2 = w2 + lam/(2 m2 w2)

    At ``order=2`` the real shifts gain their quadratic corrections and the
    imaginary parts move for the first time, by

        dgamma1 = -lam^2 g1 / (2 m1 m2 R),   dgamma2 = +lam^2 g1 / (2 m1 m2 R),

    with R = (w1^2 - w2^2)^2 + g1^2 w2^2.  The expansion is meaningful when
    lam^2/(m1 m2) << w1 w2 g1^2 and requires the underdamped regime.

    Raises
    ------
    OverdampedUnsupported
        If w1 <= g1/2 (the undamped-frequency square root turns imaginary).
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    o1, o2, lam = params.osc1, params.osc2, params.coupling
    g1 = o1.damping_rate
    w1s = o1.frequency**2
    w2s = o2.frequency**2
    w2 = o2.frequency
    m1, m2 = o1.mass, o2.mass
    if w1s <= g1**2 / 4:
        raise OverdampedUnsupported(
            "small-coupling pole expansion requires the underdamped regime (w1 > gamma1/2)"
        )
    if w2 == 0.0 or g1 == 0.0:
        raise NotStable("expansion requires w2 > 0 and damping on oscillator 1")
    s1 = np.sqrt(w1s - g1**2 / 4)
    big_r = (w1s - w2s) ** 2 + g1**2 * w2s

    d_w1 = lam / (2 * m1 * s1)
    d_w2 = lam / (2 * m2 * w2)
    d_g1 = 0.0
    d_g2 = 0.0
    if order >= 2:
        d_w1 *= 1 + (lam / (m2 * big_r)) * (
            w1s - w2s - g1**2 / 2
            - (m2 / (4 * m1)) * (g1**2 * w2s + (w1s - w2s) ** 2) / (w1s - g1**2 / 4)
        )
        d_w2 *= 1 - (lam / (m1 * big_r)) * ((m1 / (4 * m2)) * big_r / w2s + w1s - w2s)
        d_g1 = -(lam**2) * g1 / (2 * m1 * m2 * big_r)
        d_g2 = +(lam**2) * g1 / (2 * m1 * m2 * big_r)

    omega1 = complex(s1 + d_w1, g1 / 2 + d_g1)
    omega2 = complex(w2 + d_w2, d_g2)
    upper = np.array([omega1, omega2, -np.conj(omega1), -np.conj(omega2)])
    return PoleSet(omega1=omega1, omega2=omega2, upper_roots=upper[np.argsort(upper.real)])


# ---------------------------------------------------------------------------
# time-domain correlators


@dataclass(frozen=True)
class CorrelatorTable:
    """Sampled unequal-time two-point functions.

    ``g11``, ``g22`` are position autocorrelations E[q_i(s) q_i(s+t)];
    ``g12`` is E[q1(s) q2(s+t)] and ``g21`` its time reflection.  The
    response entries pair a position with the other (or own) oscillator's
    response variable and are supported on t <= 0.
    """

    times: np.ndarray
    g11: np.ndarray
    g22: np.ndarray
    g12: np.ndarray
    g21: np.ndarray
    response_11: np.ndarray
    response_22: np.ndarray
    response_21: np.ndarray
    method: str

    PAIR_COLUMNS = ("g11", "g22", "g12", "g21", "response_11", "response_22", "response_21")


def _numerators(params: SystemParams) -> dict[str, np.ndarray]:
    """Descending polynomial coefficients of each component's numerator."""
    o1, o2, lam = params.osc1, params.osc2, params.coupling
    d1, d2 = o1.diffusion, o2.diffusion
    a = np.array([o1.mass, -1j * o1.damping, -(o1.spring_constant + lam)])
    a_conj = np.conj(a)
    b = np.array([o2.mass, 0.0, -(o2.spring_constant + lam)], dtype=complex)

    n11 = d1 * np.convolve(b, b)
    n11[-1] += lam**2 * d2
    n22 = d2 * np.convolve(a, a_conj)
    n22[-1] += lam**2 * d1
    n12 = -lam * (d1 * b + d2 * a_conj)
    n21 = -lam * (d1 * b + d2 * a)
    return {
        "g11": n11,
        "g22": n22,
        "g12": n12,
        "g21": n21,
        "response_11": b,
        "response_22": a,
        "response_21": np.array([-lam], dtype=complex),
    }


def _residue_transform(num: np.ndarray, roots: np.ndarray, lead: complex, t: np.ndarray) -> np.ndarray:
    """Inverse transform of N(w) / (lead * prod (w - roots)) by residues.

    Upper-half poles are collected for t < 0 (contour closed above, +2pi i),
    lower-half poles for t >= 0.  Simple poles assumed; residues use the
    analytic derivative of the denominator.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape, dtype=complex)
    neg = t < 0
    pos = ~neg
    for k, pk in enumerate(roots):
        dprime = lead * np.prod(pk - np.delete(roots, k))
        coeff = _polyval(num, pk) / dprime
        if pk.imag > 0:
            if neg.any():
                out[neg] += 1j * coeff * np.exp(-1j * pk * t[neg])
        else:
            if pos.any():
                out[pos] += -1j * coeff * np.exp(-1j * pk * t[pos])
    return out


def _real_part(values: np.ndarray, context: str) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(values))))
    leak = float(np.max(np.abs(values.imag)))
    if leak > _IMAG_LEAK_TOL * scale:
        raise DegeneratePoles(f"{context}: imaginary leakage {leak:.3e} signals unreliable residues")
    return values.real.copy()


def correlators_exact(params: SystemParams, t_grid: np.ndarray) -> CorrelatorTable:
    """Exact residue-sum correlators on ``t_grid``.

    Valid whenever all poles are simple and strictly off the real axis;
    this includes the overdamped regime.  Near-degenerate poles (couplings
    below roughly 1e-4 in natural units, where the undamped branch and its
    reflection collide across the axis) are refused because their residues
    cancel to all available precision; use the small-coupling forms there.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    roots_up = _upper_roots(params)
    if np.any(roots_up.imag <= 0.0):
        raise PoleOnAxis("correlators require a strictly stable system (all poles off axis)")
    roots_lo = np.conj(roots_up)
    roots_all = np.concatenate([roots_up, roots_lo])
    _check_separation(roots_all, "correlators_exact")

    coeffs = response_denominator_coefficients(params)
    lead4 = coeffs[0]
    lead8 = lead4 * np.conj(lead4)
    nums = _numerators(params)

    values: dict[str, np.ndarray] = {}
    for name in ("g11", "g22", "g12", "g21"):
        raw = _residue_transform(nums[name], roots_all, lead8, t_grid)
        values[name] = _real_part(raw, name)
    for name in ("response_11", "response_22", "response_21"):
        raw = _residue_transform(nums[name], roots_up, lead4, t_grid)
        raw[t_grid >= 0] = 0.0
        values[name] = _real_part(raw, name)
    return CorrelatorTable(times=t_grid, method="exact-residue", **values)


def exact_equal_time(params: SystemParams) -> dict[str, float]:
    """Equal-time values and first derivatives of the exact correlators.

    Besides the three position covariances this exposes the one-sided time
    derivatives that map onto the position-momentum covariances:
    m2 * d/dt g12(0+) = E[q1 p2] and m1 * d/dt g21(0+) = E[q2 p1].
    """
    roots_up = _upper_roots(params)
    if np.any(roots_up.imag <= 0.0):
        raise PoleOnAxis("equal-time values require a strictly stable system")
    roots_all = np.concatenate([roots_up, np.conj(roots_up)])
    _check_separation(roots_all, "exact_equal_time")
    coeffs = response_denominator_coefficients(params)
    lead8 = coeffs[0] * np.conj(coeffs[0])
    nums = _numerators(params)

    lower_idx = np.flatnonzero(roots_all.imag < 0)

    def value_and_slope(num):
        val = 0.0 + 0.0j
        slope = 0.0 + 0.0j
        for k in lower_idx:
            pk = roots_all[k]
            dprime = lead8 * np.prod(pk - np.delete(roots_all, k))
            coeff = _polyval(num, pk) / dprime
            val += -1j * coeff
            slope += -1j * coeff * (-1j * pk)
        return val, slope

    out: dict[str, float] = {}
    for name in ("g11", "g22", "g12", "g21"):
        val, slope = value_and_slope(nums[name])
        out[name + "_0"] = float(val.real)
        out["d" + name + "_dt0"] = float(slope.real)
    m1, m2 = params.osc1.mass, params.osc2.mass
    out["q1p2"] = m2 * out["dg12_dt0"]
    out["q2p1"] = m1 * out["dg21_dt0"]
    return out


def correlators_small_lambda(
    params: SystemParams, t_grid: np.ndarray, identical: bool = False
) -> CorrelatorTable:
    """Leading small-coupling closed forms of the correlators.

    General parameters (s1 = sqrt(w1^2 - g1^2/4), R = (w1^2-w2^2)^2 + g1^2 w2^2):

        g11(t) = D1/(2 g1 m1^2 w1^2) e^{-g1|t|/2} (cos s1|t| + g1/(2 s1) sin s1|t|)
                 + D2/(2 g1 m1 m2 w2^2) cos(w2 t)
        g22(t) = D2 m1 R / (2 g1 w2^2 m2 lam^2) cos(w2 t)
        g12(t) = D2/(2 m2 w2 lam) (-sin(w2 t) - (w2^2-w1^2)/(g1 w2) cos(w2 t))
        g21(t) = g12(-t)
        response_11(t) = (1/m1) e^{g1 t/2} sin(s1 t)/s1 * theta(-t)
        response_22(t) = (1/(m2 w2)) sin(w2 t) * theta(-t)
        response_21(t) = O(lam), reported as zero.

    The cross correlator deserves a note: its even part is a smooth cosine
    but its leading oscillation is odd in t, fixed by the exact stationary
    value E[q1 p2] = -D2/(2 lam) < 0.  An even sin(w2|t|) continuation would
    produce a slope of the wrong sign for t > 0 (verified against the exact
    residue transform); consequently g12 != g21, the two being time
    reflections of one another.

    With ``identical=True`` the oscillators must match (m1 = m2, w1 = w2)
    and the simplified forms are used; they are the equal-parameter limits
    of the general ones, e.g. g22(t) = D2 g1/(2 lam^2) cos(w t).
    """
    o1, o2, lam = params.osc1, params.osc2, params.coupling
    if lam == 0.0:
        raise CouplingZero("small-coupling correlators are singular at zero coupling")
    g1 = o1.damping_rate
    if g1 == 0.0:
        raise NotStable("small-coupling correlators require damping on oscillator 1")
    w1s = o1.frequency**2
    w2s = o2.frequency**2
    if w1s <= g1**2 / 4:
        raise OverdampedUnsupported(
            "small-coupling correlators require the underdamped regime (w1 > gamma1/2)"
        )
    if identical:
        if not (
            np.isclose(o1.mass, o2.mass, rtol=1e-9) and np.isclose(w1s, w2s, rtol=1e-9)
        ):
            raise ValueError("identical=True requires matching masses and frequencies")
    m1, m2 = o1.mass, o2.mass
    d1, d2 = o1.diffusion, o2.diffusion
    w2 = o2.frequency
    s1 = np.sqrt(w1s - g1**2 / 4)
    big_r = g1**2 * w2s if identical else (w1s - w2s) ** 2 + g1**2 * w2s

    t = np.asarray(t_grid, dtype=float)
    at = np.abs(t)
    damped = np.exp(-g1 * at / 2) * (np.cos(s1 * at) + g1 / (2 * s1) * np.sin(s1 * at))
    g11 = d1 / (2 * g1 * m1**2 * w1s) * damped + d2 / (2 * g1 * m1 * m2 * w2s) * np.cos(w2 * t)
    g22 = d2 * m1 * big_r / (2 * g1 * w2s * m2 * lam**2) * np.cos(w2 * t)
    skew = 0.0 if identical else (w2s - w1s) / (g1 * w2)
    g12 = d2 / (2 * m2 * w2 * lam) * (-np.sin(w2 * t) - skew * np.cos(w2 * t))
    g21 = d2 / (2 * m2 * w2 * lam) * (+np.sin(w2 * t) - skew * np.cos(w2 * t))
    support = t < 0
    resp11 = np.where(support, (1 / m1) * np.exp(g1 * t / 2) * np.sin(s1 * t) / s1, 0.0)
    resp22 = np.where(support, (1 / (m2 * w2)) * np.sin(w2 * t), 0.0)
    return CorrelatorTable(
        times=t,
        g11=g11,
        g22=g22,
        g12=g12,
        g21=g21,
        response_11=resp11,
        response_22=resp22,
        response_21=np.zeros_like(t),
        method="small-lambda",
    )


def sigma_ratio(params: SystemParams) -> float:
    """Ratio of the rms displacement of oscillator 1 to oscillator 2.

    Computed as sqrt(g11(0)/g22(0)) from the small-coupling forms; for
    identical oscillators this reduces to

        sigma1/sigma2 = lam sqrt(1 + D1/D2) / (gamma1 omega m),

    linear in the coupling.  (The 1/omega factor is required for the ratio
    to be dimensionless and for consistency with the correlator table; in
    the natural units m = omega = 1 it is invisible.)
    """
    o2 = params.osc2
    if o2.diffusion == 0.0:
        raise ValueError("sigma_ratio undefined for D2 = 0 (oscillator 2 has no spread)")
    table = correlators_small_lambda(params, np.array([0.0]))
    return float(np.sqrt(table.g11[0] / table.g22[0]))


_PAIR_FIELDS = {(1, 1): "g11", (2, 2): "g22", (1, 2): "g12", (2, 1): "g21"}


def correlation_coefficient(
    params: SystemParams, pair: tuple[int, int], t, exact: bool = False
):
    """Normalised correlation r_ij(t) = C_ij(t) / sqrt(C_ii(0) C_jj(0))."""
    if pair not in _PAIR_FIELDS:
        raise ValueError(f"pair must be one of {sorted(_PAIR_FIELDS)}")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    compute = correlators_exact if exact else correlators_small_lambda
    table = compute(params, t_arr)
    zero = compute(params, np.array([0.0]))
    i, j = pair
    c_ii = getattr(zero, _PAIR_FIELDS[(i, i)])[0]
    c_jj = getattr(zero, _PAIR_FIELDS[(j, j)])[0]
    r = getattr(table, _PAIR_FIELDS[pair]) / np.sqrt(c_ii * c_jj)
    return r if np.ndim(t) else float(r[0])


def mutual_information(
    params: SystemParams, pair: tuple[int, int], t, exact: bool = False
):
    """Gaussian mutual information I_ij(t) = -log(1 - r_ij(t)^2) / 2 in nats.

    Uses the small-coupling correlators by default; pass ``exact=True`` to
    normalise with the exact residue transform instead.

    Raises
    ------
    PerfectCorrelation
        If |r| >= 1 - 1e-12 anywhere on ``t`` (e.g. the same-oscillator pair
        at t = 0, where the information diverges).
    """
    r = np.atleast_1d(correlation_coefficient(params, pair, t, exact=exact))
    if np.any(np.abs(r) >= 1 - 1e-12):
        raise PerfectCorrelation(f"|r| reaches 1 for pair {pair}")
    info = -0.5 * np.log1p(-(r**2))
    return info if np.ndim(t) else float(info[0])
