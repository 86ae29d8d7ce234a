"""Euler-Maruyama ensemble integration with streaming moment statistics.

The scheme is the plain forward step

    z <- z - theta z dt + sigma sqrt(dt) eta,      eta ~ N(0, I) iid,

which is weakly first order and entirely adequate for additive noise (and,
for additive noise, the Ito/Stratonovich distinction is moot).

Reproducibility model: trajectory ``i`` consumes a dedicated counter-based
substream, ``Philox(key=seed).jumped(i)``.  If an initial Gaussian is
requested the first four normals of the substream seed the initial state;
the rest drive the noise.  Statistics are reduced with Welford/Chan moment
accumulators merged in fixed chunk order, so results are bitwise identical
for any thread count.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import NumericalOverflow
from .model import DriftNoise, SystemParams

# fixed work decomposition; part of the reproducibility contract
CHUNK_TRAJECTORIES = 1024
BLOCK_STEPS = 2048

DT_WARN_FACTOR = 0.1
DT_ERROR_FACTOR = 1.0


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("HYBRID_OSC_THREADS")
    return max(1, int(env)) if env else 1


@dataclass(frozen=True)
class SimConfig:
    """Ensemble integration settings.

    ``initial_state`` fixes a deterministic initial condition; alternatively
    supply ``initial_mean`` and ``initial_cov`` to draw each trajectory's
    start from a Gaussian.  ``output_stride`` records every k-th step
    (the initial and final steps are always recorded).
    """

    dt: float
    t_final: float
    n_trajectories: int
    seed: int = 0
    initial_state: np.ndarray | None = None
    initial_mean: np.ndarray | None = None
    initial_cov: np.ndarray | None = None
    output_stride: int | None = None

    def __post_init__(self) -> None:
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise ValueError("dt must be positive and finite")
        if not (self.t_final > 0 and np.isfinite(self.t_final)):
            raise ValueError("t_final must be positive and finite")
        if self.n_trajectories < 1:
            raise ValueError("n_trajectories must be >= 1")
        gaussian = self.initial_mean is not None or self.initial_cov is not None
        if gaussian and self.initial_state is not None:
            raise ValueError("give either initial_state or an initial Gaussian, not both")
        if gaussian and (self.initial_mean is None or self.initial_cov is None):
            raise ValueError("initial Gaussian needs both initial_mean and initial_cov")
        if self.output_stride is not None and self.output_stride < 1:
            raise ValueError("output_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_final / self.dt)))

    def resolved_stride(self) -> int:
        if self.output_stride is not None:
            return self.output_stride
        return max(1, self.n_steps // 400)


@dataclass
class EnsembleStats:
    """Per-time ensemble moments with standard errors.

    ``cov`` holds unbiased sample covariances; their standard errors use the
    Gaussian sampling formula Var(C_ij) = (C_ii C_jj + C_ij^2)/(n-1), exact
    for this process.  ``energy_mean`` is the sample mean of the total
    mechanical energy (kinetic + both springs + coupling spring); it is NaN
    when the drift/noise pair carries no originating parameters.
    """

    times: np.ndarray
    mean: np.ndarray
    mean_stderr: np.ndarray
    cov: np.ndarray
    cov_stderr: np.ndarray
    energy_mean: np.ndarray
    energy_stderr: np.ndarray
    n_trajectories: int

    _CSV_MOMENTS = (
        ("var_q1", 0, 0), ("var_p1", 1, 1), ("var_q2", 2, 2), ("var_p2", 3, 3),
        ("cov_q1p1", 0, 1), ("cov_q1q2", 0, 2), ("cov_q1p2", 0, 3),
        ("cov_p1q2", 1, 2), ("cov_p1p2", 1, 3), ("cov_q2p2", 2, 3),
    )

    def csv_header(self) -> list[str]:
        cols = ["t", "mean_q1", "mean_p1", "mean_q2", "mean_p2"]
        cols += [name for name, _, _ in self._CSV_MOMENTS]
        cols += ["energy"]
        cols += [f"{c}_stderr" for c in cols[1:]]
        return cols

    def write_csv(self, stream) -> None:
        stream.write(",".join(self.csv_header()) + "\n")
        for k, t in enumerate(self.times):
            row = [t, *self.mean[k]]
            row += [self.cov[k, i, j] for _, i, j in self._CSV_MOMENTS]
            row.append(self.energy_mean[k])
            row += list(self.mean_stderr[k])
            row += [self.cov_stderr[k, i, j] for _, i, j in self._CSV_MOMENTS]
            row.append(self.energy_stderr[k])
            stream.write(",".join(f"{v:.17g}" for v in row) + "\n")


def energy_weight_matrix(params: SystemParams) -> np.ndarray:
    """W such that the total energy is z^T W z / 2 in (q1, p1, q2, p2) order."""
    o1, o2, lam = params.osc1, params.osc2, params.coupling
    return np.array(
        [
            [o1.spring_constant + lam, 0.0, -lam, 0.0],
            [0.0, 1.0 / o1.mass, 0.0, 0.0],
            [-lam, 0.0, o2.spring_constant + lam, 0.0],
            [0.0, 0.0, 0.0, 1.0 / o2.mass],
        ]
    )


def total_energy(params: SystemParams, states: np.ndarray) -> np.ndarray:
    """Total mechanical energy for states of shape (..., 4)."""
    w = energy_weight_matrix(params)
    states = np.asarray(states, dtype=float)
    return 0.5 * np.einsum("...i,ij,...j->...", states, w, states)


def energy_drift(params: SystemParams, cov: np.ndarray) -> float:
    """Mean rate of change of the total energy in a state with covariance ``cov``.

    Ito's lemma applied to the energy gives
    -(alpha/m1^2) Var(p1) + D1/(2 m1) + D2/(2 m2); the drift vanishes exactly
    when Var(p1) = (D1 + (m1/m2) D2)/(2 gamma1).
    """
    o1, o2 = params.osc1, params.osc2
    cov = np.asarray(cov, dtype=float)
    return float(
        -(o1.damping / o1.mass**2) * cov[1, 1]
        + o1.diffusion / (2 * o1.mass)
        + o2.diffusion / (2 * o2.mass)
    )


def _check_step_size(dn: DriftNoise, cfg: SimConfig) -> None:
    scale = float(np.max(np.abs(np.linalg.eigvals(dn.theta))))
    if scale == 0.0:
        return
    product = cfg.dt * scale
    if product > DT_ERROR_FACTOR:
        raise ValueError(
            f"dt * max|eigenvalue| = {product:.3g} > {DT_ERROR_FACTOR}; the forward scheme is unstable"
        )
    if product > DT_WARN_FACTOR:
        warnings.warn(
            f"dt * max|eigenvalue| = {product:.3g} exceeds {DT_WARN_FACTOR}; "
            "expect visible discretisation bias",
            stacklevel=3,
        )


def _trajectory_rng(seed: int, index: int) -> np.random.Generator:
    key = np.uint64(int(seed) % (1 << 64))
    return np.random.Generator(np.random.Philox(key=key).jumped(index))


def _gaussian_factor(cov: np.ndarray) -> np.ndarray:
    """PSD square root tolerant of semidefinite covariances."""
    vals, vecs = np.linalg.eigh(np.asarray(cov, dtype=float))
    vals = np.clip(vals, 0.0, None)
    return vecs * np.sqrt(vals)


def _output_steps(n_steps: int, stride: int) -> np.ndarray:
    steps = np.arange(0, n_steps + 1, stride)
    if steps[-1] != n_steps:
        steps = np.append(steps, n_steps)
    return steps


class _MomentAccumulator:
    """Welford/Chan accumulator over the state 4-vector plus an energy channel."""

    __slots__ = ("count", "mean", "m2", "e_mean", "e_m2")

    def __init__(self) -> None:
        self.count = 0
        self.mean = np.zeros(4)
        self.m2 = np.zeros((4, 4))
        self.e_mean = 0.0
        self.e_m2 = 0.0

    def add_batch(self, states: np.ndarray, energies: np.ndarray) -> None:
        n = states.shape[0]
        mean = states.mean(axis=0)
        centred = states - mean
        m2 = centred.T @ centred
        e_mean = float(energies.mean())
        e_m2 = float(((energies - e_mean) ** 2).sum())
        self._merge_raw(n, mean, m2, e_mean, e_m2)

    def merge(self, other: "_MomentAccumulator") -> None:
        self._merge_raw(other.count, other.mean, other.m2, other.e_mean, other.e_m2)

    def _merge_raw(self, n, mean, m2, e_mean, e_m2) -> None:
        if n == 0:
            return
        total = self.count + n
        delta = mean - self.mean
        self.mean = self.mean + delta * (n / total)
        self.m2 = self.m2 + m2 + np.outer(delta, delta) * (self.count * n / total)
        e_delta = e_mean - self.e_mean
        self.e_mean = self.e_mean + e_delta * (n / total)
        self.e_m2 = self.e_m2 + e_m2 + e_delta**2 * (self.count * n / total)
        self.count = total


def _run_chunk(
    dn: DriftNoise,
    cfg: SimConfig,
    indices: range,
    output_steps: np.ndarray,
    weight: np.ndarray | None,
):
    """Integrate one contiguous block of trajectories; returns accumulators per output step."""
    dt = cfg.dt
    theta_dt_t = (dn.theta * dt).T
    noise_t = dn.sigma.T * np.sqrt(dt)
    n_steps = cfg.n_steps
    rngs = [_trajectory_rng(cfg.seed, i) for i in indices]
    n_traj = len(rngs)

    if cfg.initial_state is not None:
        z = np.tile(np.asarray(cfg.initial_state, dtype=float).reshape(1, 4), (n_traj, 1))
    elif cfg.initial_mean is not None:
        factor = _gaussian_factor(cfg.initial_cov)
        draws = np.stack([rng.standard_normal(4) for rng in rngs])
        z = np.asarray(cfg.initial_mean, dtype=float).reshape(1, 4) + draws @ factor.T
    else:
        z = np.zeros((n_traj, 4))

    accs = [_MomentAccumulator() for _ in output_steps]
    out_pos = {int(s): k for k, s in enumerate(output_steps)}

    def record(step: int) -> None:
        k = out_pos.get(step)
        if k is None:
            return
        if not np.isfinite(z).all():
            bad = int(indices[np.flatnonzero(~np.isfinite(z).all(axis=1))[0]])
            raise NumericalOverflow(
                f"trajectory {bad} overflowed near t = {step * dt:.6g}"
            )
        if weight is not None:
            energies = 0.5 * np.einsum("ti,ij,tj->t", z, weight, z)
        else:
            energies = np.full(n_traj, np.nan)
        accs[k].add_batch(z, energies)

    record(0)
    step = 0
    with np.errstate(over="ignore", invalid="ignore"):
        while step < n_steps:
            block = min(BLOCK_STEPS, n_steps - step)
            noise = np.empty((block, n_traj, 4))
            for j, rng in enumerate(rngs):
                noise[:, j, :] = rng.standard_normal((block, 4))
            for b in range(block):
                z = z - z @ theta_dt_t + noise[b] @ noise_t
                step += 1
                record(step)
    return accs


def simulate_ensemble(dn: DriftNoise, cfg: SimConfig, threads: int | None = None) -> EnsembleStats:
    """Integrate an ensemble and return streaming moment statistics.

    Trajectories are partitioned into fixed-size chunks; chunks may run on a
    thread pool (capped by ``threads`` or the HYBRID_OSC_THREADS environment
    variable) but are always merged in chunk order, so the result does not
    depend on the thread count.
    """
    _check_step_size(dn, cfg)
    stride = cfg.resolved_stride()
    output_steps = _output_steps(cfg.n_steps, stride)
    weight = energy_weight_matrix(dn.params) if dn.params is not None else None

    chunks = [
        range(lo, min(lo + CHUNK_TRAJECTORIES, cfg.n_trajectories))
        for lo in range(0, cfg.n_trajectories, CHUNK_TRAJECTORIES)
    ]
    n_workers = min(_thread_count(threads), len(chunks))
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            per_chunk = list(pool.map(
                lambda idx: _run_chunk(dn, cfg, idx, output_steps, weight), chunks
            ))
    else:
        per_chunk = [_run_chunk(dn, cfg, idx, output_steps, weight) for idx in chunks]

    totals = per_chunk[0]
    for chunk_accs in per_chunk[1:]:
        for acc, extra in zip(totals, chunk_accs):
            acc.merge(extra)

    n = cfg.n_trajectories
    n_out = len(output_steps)
    times = output_steps * cfg.dt
    mean = np.stack([acc.mean for acc in totals])
    if n > 1:
        cov = np.stack([acc.m2 for acc in totals]) / (n - 1)
        diag = np.einsum("kii->ki", cov)
        cov_stderr = np.sqrt(
            (diag[:, :, None] * diag[:, None, :] + cov**2) / (n - 1)
        )
        mean_stderr = np.sqrt(np.clip(diag, 0.0, None) / n)
        e_var = np.array([acc.e_m2 for acc in totals]) / (n - 1)
        energy_stderr = np.sqrt(np.clip(e_var, 0.0, None) / n)
    else:
        cov = np.full((n_out, 4, 4), np.nan)
        cov_stderr = np.full((n_out, 4, 4), np.nan)
        mean_stderr = np.full((n_out, 4), np.nan)
        energy_stderr = np.full(n_out, np.nan)
    energy_mean = np.array([acc.e_mean for acc in totals])
    if weight is None:
        energy_mean = np.full(n_out, np.nan)

    return EnsembleStats(
        times=times,
        mean=mean,
        mean_stderr=mean_stderr,
        cov=cov,
        cov_stderr=cov_stderr,
        energy_mean=energy_mean,
        energy_stderr=energy_stderr,
        n_trajectories=n,
    )


def sample_trajectory(dn: DriftNoise, cfg: SimConfig, index: int):
    """Integrate the single trajectory ``index`` of the ensemble.

    Returns (times, states) sampled at the output stride.  The path is
    bitwise identical to ensemble member ``index`` for the same config.
    """
    _check_step_size(dn, cfg)
    if not 0 <= index < cfg.n_trajectories:
        raise ValueError(f"index {index} outside [0, {cfg.n_trajectories})")
    dt = cfg.dt
    theta_dt_t = (dn.theta * dt).T
    noise_t = dn.sigma.T * np.sqrt(dt)
    n_steps = cfg.n_steps
    stride = cfg.resolved_stride()
    output_steps = _output_steps(n_steps, stride)
    rng = _trajectory_rng(cfg.seed, index)

    if cfg.initial_state is not None:
        z = np.asarray(cfg.initial_state, dtype=float).reshape(4).copy()
    elif cfg.initial_mean is not None:
        factor = _gaussian_factor(cfg.initial_cov)
        z = np.asarray(cfg.initial_mean, dtype=float).reshape(4) + factor @ rng.standard_normal(4)
    else:
        z = np.zeros(4)

    states = np.empty((len(output_steps), 4))
    out_pos = {int(s): k for k, s in enumerate(output_steps)}
    states[0] = z
    step = 0
    with np.errstate(over="ignore", invalid="ignore"):
        while step < n_steps:
            block = min(BLOCK_STEPS, n_steps - step)
            noise = rng.standard_normal((block, 4))
            for b in range(block):
                z = z - z @ theta_dt_t + noise[b] @ noise_t
                step += 1
                k = out_pos.get(step)
                if k is not None:
                    if not np.isfinite(z).all():
                        raise NumericalOverflow(
                            f"trajectory {index} overflowed near t = {step * dt:.6g}"
                        )
                    states[k] = z
    return output_steps * dt, states
