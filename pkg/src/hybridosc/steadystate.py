"""Stationary second moments: direct solve, closed forms, and moment flow.

Three independent routes to the same object:

* :func:`solve_lyapunov` solves theta C + C theta^T = sigma sigma^T by
  vectorisation (a 16x16 Kronecker linear system; at 4x4 this is exact and
  dependency-free).
* :func:`closed_form_covariances` evaluates the analytic solution of that
  equation for this model, entry by entry.
* :func:`evolve_moments` integrates the moment ODEs
  dC/dt = -theta C - C theta^T + sigma sigma^T, dmu/dt = -theta mu
  and converges to the same fixed point for stable systems.

Agreement of the three routes is the backbone of the test suite.
"""

from __future__ import annotations

import numpy as np

from .errors import CouplingZero, NotStable, SingularSystem
from .model import DriftNoise, SystemParams
from .stability import routh_hurwitz

SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-10
RESIDUAL_RTOL = 1e-10


def validate_covariance(cov: np.ndarray, scale: float | None = None) -> np.ndarray:
    """Check symmetry and positive semi-definiteness (report-only, no projection)."""
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (4, 4):
        raise ValueError("covariance must be 4x4")
    scale = float(scale) if scale is not None else max(1.0, float(np.max(np.abs(cov))))
    asym = float(np.max(np.abs(cov - cov.T)))
    if asym > SYMMETRY_TOL * scale:
        raise SingularSystem(f"covariance asymmetric by {asym:.3e}")
    eigs = np.linalg.eigvalsh(0.5 * (cov + cov.T))
    if eigs.min() < -PSD_TOL * scale:
        raise SingularSystem(f"covariance indefinite: min eigenvalue {eigs.min():.3e}")
    return cov


def lyapunov_residual(theta: np.ndarray, cov: np.ndarray, diffusion: np.ndarray) -> float:
    """Max-norm of theta C + C theta^T - Q."""
    return float(np.max(np.abs(theta @ cov + cov @ theta.T - diffusion)))


def solve_lyapunov(dn: DriftNoise) -> np.ndarray:
    """Stationary covariance from the Lyapunov equation.

    Raises
    ------
    NotStable
        If the steady state does not exist (certificate fails).
    SingularSystem
        If the linear solve is rank-deficient or the residual exceeds
        tolerance.
    """
    if dn.params is not None:
        report = routh_hurwitz(dn.params)
        if not report.routh_hurwitz_pass:
            raise NotStable(f"no steady state: stability certificate fails ({report.reason})")
    else:
        eigs = np.linalg.eigvals(dn.theta)
        if eigs.real.min() <= 0.0:
            raise NotStable("no steady state: drift eigenvalues not in the right half plane")

    theta = dn.theta
    q = dn.diffusion_matrix
    eye = np.eye(4)
    # vec convention: (A @ X @ B.T).ravel() == kron(A, B) @ X.ravel()
    kron = np.kron(theta, eye) + np.kron(eye, theta)
    try:
        cov = np.linalg.solve(kron, q.ravel()).reshape(4, 4)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"Lyapunov solve failed: {exc}") from exc
    cov = 0.5 * (cov + cov.T)

    q_scale = max(float(np.max(np.abs(q))), np.finfo(float).tiny)
    resid = lyapunov_residual(theta, cov, q)
    if resid > RESIDUAL_RTOL * q_scale:
        raise SingularSystem(f"Lyapunov residual {resid:.3e} exceeds {RESIDUAL_RTOL:.0e} * |Q|")
    return validate_covariance(cov)


def closed_form_covariances(params: SystemParams) -> np.ndarray:
    """The analytic stationary covariance, evaluated entry by entry.

    Requires coupling > 0 (several entries carry 1/coupling factors; at zero
    coupling with a driven undamped oscillator there is no steady state to
    describe) and damping > 0 on oscillator 1.

    The ten independent entries, with g1 = alpha/m1, w_i the bare
    frequencies, l_i = coupling/m_i and den = w2^2 l1 + w1^2 (w2^2 + l2):

        E[p1^2] = (D1 + (m1/m2) D2) / (2 g1)
        E[p2^2] = [D2 (1 + (m1 m2/lam^2) ((w1^2-w2^2+l1-l2)^2
                   + g1^2 (w2^2+l2))) + (m2/m1) D1] / (2 g1)
        E[q1^2] = [D1 (l2+w2^2) + (m1/m2) D2 (l1+w1^2)] / (2 g1 m1^2 den)
        E[q2^2] = [(m2/m1) D1 (w1^2+l1) + D2 (m1 m2/lam^2) ((w1^2+l1)^3
                   + (w1^2 (w2^2+l2) + w2^2 l1)
                     (w2^2 - 2 w1^2 + l2 - 2 l1 + g1^2))] / (2 g1 m2^2 den)
        E[p1 p2] = (D2 m1 / (2 g1 lam)) (w1^2 - w2^2 + l1 - l2)
        E[q1 p2] = -D2 / (2 lam)
        E[q2 p1] = (D2 / (2 lam)) (m1/m2)
        E[q1 q2] = [D1 l1 + D2 (m1/lam) ((w1^2+l1)^2 - w2^2 l1
                   - w1^2 (w2^2+l2))] / (2 g1 m1 m2 den)
        E[q1 p1] = E[q2 p2] = 0.
    """
    o1, o2, lam = params.osc1, params.osc2, params.coupling
    if lam == 0.0:
        raise CouplingZero("closed-form covariances are singular at zero coupling")
    g1 = o1.damping_rate
    if g1 == 0.0:
        raise NotStable("closed-form covariances require damping on oscillator 1")
    m1, m2 = o1.mass, o2.mass
    d1, d2 = o1.diffusion, o2.diffusion
    w1s = o1.frequency**2
    w2s = o2.frequency**2
    l1 = lam / m1
    l2 = lam / m2
    den = w2s * l1 + w1s * (w2s + l2)
    if den <= 0.0:
        raise NotStable("no steady state: both spring constants vanish")

    p1p1 = (d1 + (m1 / m2) * d2) / (2 * g1)
    p2p2 = (
        d2 * (1 + (m1 * m2 / lam**2) * ((w1s - w2s + l1 - l2) ** 2 + g1**2 * (w2s + l2)))
        + (m2 / m1) * d1
    ) / (2 * g1)
    q1q1 = (d1 * (l2 + w2s) + (m1 / m2) * d2 * (l1 + w1s)) / (2 * g1 * m1**2 * den)
    q2q2 = (
        (m2 / m1) * d1 * (w1s + l1)
        + d2
        * (m1 * m2 / lam**2)
        * ((w1s + l1) ** 3 + (w1s * (w2s + l2) + w2s * l1) * (w2s - 2 * w1s + l2 - 2 * l1 + g1**2))
    ) / (2 * g1 * m2**2 * den)
    p1p2 = (d2 / (2 * g1)) * (m1 / lam) * (w1s - w2s + l1 - l2)
    q1p2 = -d2 / (2 * lam)
    q2p1 = (d2 / (2 * lam)) * (m1 / m2)
    q1q2 = (
        d1 * l1 + d2 * (m1 / lam) * ((w1s + l1) ** 2 - w2s * l1 - w1s * (w2s + l2))
    ) / (2 * g1 * m1 * m2 * den)

    cov = np.array(
        [
            [q1q1, 0.0, q1q2, q1p2],
            [0.0, p1p1, q2p1, p1p2],
            [q1q2, q2p1, q2q2, 0.0],
            [q1p2, p1p2, 0.0, p2p2],
        ]
    )
    return cov


def _moment_rhs(theta: np.ndarray, q: np.ndarray, mean: np.ndarray, cov: np.ndarray):
    dmean = -theta @ mean
    dcov = -theta @ cov - cov @ theta.T + q
    return dmean, dcov


def evolve_moments(
    dn: DriftNoise,
    cov0: np.ndarray,
    mean0: np.ndarray,
    t_grid: np.ndarray,
    max_step: float | None = None,
):
    """Integrate the first and second moment ODEs on ``t_grid``.

    Classic fixed-step RK4 between grid points.  For a linear constant
    system the RK4 fixed point coincides with the exact stationary moments,
    so ``max_step`` trades trajectory accuracy against runtime without
    biasing the late-time limit; it defaults to 0.25 / max|eigenvalue|.

    Returns
    -------
    (means, covs):
        Arrays of shape (n, 4) and (n, 4, 4) sampled at ``t_grid``.
    """
    theta = dn.theta
    q = dn.diffusion_matrix
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 1 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing with at least one point")
    cov = validate_covariance(np.array(cov0, dtype=float))
    mean = np.array(mean0, dtype=float).reshape(4)

    theta_scale = float(np.max(np.abs(np.linalg.eigvals(theta))))
    if max_step is None:
        max_step = 0.25 / theta_scale if theta_scale > 0 else np.inf
    if max_step <= 0:
        raise ValueError("max_step must be positive")

    means = np.empty((len(t_grid), 4))
    covs = np.empty((len(t_grid), 4, 4))
    means[0], covs[0] = mean, cov
    for idx in range(1, len(t_grid)):
        span = t_grid[idx] - t_grid[idx - 1]
        n_sub = max(1, int(np.ceil(span / max_step)))
        h = span / n_sub
        for _ in range(n_sub):
            k1m, k1c = _moment_rhs(theta, q, mean, cov)
            k2m, k2c = _moment_rhs(theta, q, mean + 0.5 * h * k1m, cov + 0.5 * h * k1c)
            k3m, k3c = _moment_rhs(theta, q, mean + 0.5 * h * k2m, cov + 0.5 * h * k2c)
            k4m, k4c = _moment_rhs(theta, q, mean + h * k3m, cov + h * k3c)
            mean = mean + (h / 6.0) * (k1m + 2 * k2m + 2 * k3m + k4m)
            cov = cov + (h / 6.0) * (k1c + 2 * k2c + 2 * k3c + k4c)
            cov = 0.5 * (cov + cov.T)
        means[idx], covs[idx] = mean, cov
    return means, covs


def evolve_covariances_batch(
    thetas: np.ndarray,
    diffusions: np.ndarray,
    t_final: np.ndarray,
    n_steps: int,
    cov0: np.ndarray | None = None,
) -> np.ndarray:
    """Vectorised RK4 of dC/dt = -theta C - C theta^T + Q over a batch.

    Each system b is integrated from ``cov0[b]`` (zero if omitted) to its own
    ``t_final[b]`` in ``n_steps`` equal steps.  Used by sweep studies and the
    acceptance checks, where evolving 10^3 systems one by one would be
    needlessly slow; the single-system :func:`evolve_moments` is the
    readable reference implementation.
    """
    thetas = np.asarray(thetas, dtype=float)
    diffusions = np.asarray(diffusions, dtype=float)
    n = thetas.shape[0]
    t_final = np.asarray(t_final, dtype=float).reshape(n, 1, 1)
    cov = np.zeros_like(thetas) if cov0 is None else np.array(cov0, dtype=float)
    h = t_final / n_steps
    theta_t = np.swapaxes(thetas, 1, 2)

    def rhs(c):
        return -(thetas @ c) - (c @ theta_t) + diffusions

    for _ in range(n_steps):
        k1 = rhs(cov)
        k2 = rhs(cov + 0.5 * h * k1)
        k3 = rhs(cov + 0.5 * h * k2)
        k4 = rhs(cov + h * k3)
        cov = cov + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        cov = 0.5 * (cov + np.swapaxes(cov, 1, 2))
    return cov
