"""
Time-domain integration of the coupled field equations.

With the SQUID field eliminated adiabatically, the variables
q = (phi_a, phi_h, phi_c) obey

    M q'' + C q' + K(phi_b) q = (0, xi_h, xi_c)

    M = [[1, -alpha_ha, -alpha_ca], [-alpha_h, 1, 0], [-alpha_c, 0, 1]]
    C = diag(0, 2 gamma_h, 2 gamma_c)
    K = diag(omega_a^2 (1 - omega_a^2 / (omega_s^2 - 2 g_s^2 phi_b)), omega_h^2, omega_c^2)

and phi_s = omega_a^2 phi_a / (omega_s^2 - 2 g_s^2 phi_b). The noise is held
constant over each step and the linear part is propagated exactly through
an augmented matrix exponential. A time-dependent phi_b enters as a kick on
the phi_a row between two half steps.

States are batched: shape (6, seeds), so an ensemble advances together.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.linalg import expm

from ..constants import FILTERS, ORACLE_TRANSIENT_DECAYS
from ..errors import PreconditionViolated, StiffnessDetected
from ..models import DerivedParameters
from .noise import NoiseTrace

logger = logging.getLogger(__name__)


def squid_stiffness(derived: DerivedParameters, phi_b) -> np.ndarray:
    """omega_s^2 - 2 g_s^2 phi_b."""
    return derived.omega_s ** 2 - 2.0 * derived.g_s_sq * np.asarray(phi_b, dtype=float)


def field_matrices(derived: DerivedParameters,
                   phi_b: float = 0.0) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(M, C, K) of the three-field system at a fixed slow-mode flux."""
    mass = np.array([
        [1.0, -derived.alpha_ha, -derived.alpha_ca],
        [-derived.alpha_h, 1.0, 0.0],
        [-derived.alpha_c, 0.0, 1.0],
    ])
    damping = np.diag([0.0, 2.0 * derived.gamma_h, 2.0 * derived.gamma_c])
    k_a = derived.omega_a ** 2 - derived.omega_a ** 4 / float(squid_stiffness(derived, phi_b))
    stiffness = np.diag([k_a, derived.omega_h ** 2, derived.omega_c ** 2])
    return mass, damping, stiffness


def state_matrices(derived: DerivedParameters,
                   phi_b: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """First-order form x' = A x + B u with x = (q, q') and u = (xi_h, xi_c)."""
    mass, damping, stiffness = field_matrices(derived, phi_b)
    inv = np.linalg.inv(mass)
    a = np.zeros((6, 6))
    a[:3, 3:] = np.eye(3)
    a[3:, :3] = -inv @ stiffness
    a[3:, 3:] = -inv @ damping
    b = np.zeros((6, 2))
    b[3:, :] = inv[:, 1:]
    return a, b


def discretize(a: np.ndarray, b: np.ndarray, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """Exact zero-order-hold propagators (Phi, Gamma) from one augmented exponential."""
    n, m = b.shape
    augmented = np.zeros((n + m, n + m))
    augmented[:n, :n] = a
    augmented[:n, n:] = b
    propagator = expm(augmented * dt)
    return propagator[:n, :n], propagator[:n, n:]


def check_damped(derived: DerivedParameters, phi_b: float = 0.0) -> float:
    """Slowest decay rate of the fixed-phi_b system.

    Raises:
        PreconditionViolated: if any eigenmode is not damped.
    """
    a, _ = state_matrices(derived, phi_b)
    rate = -float(np.max(np.linalg.eigvals(a).real))
    if not rate > 0:
        raise PreconditionViolated(f"field equations are not damped at phi_b={phi_b:.4g}")
    return rate


def transient_steps(derived: DerivedParameters, dt: float) -> int:
    return int(math.ceil(ORACLE_TRANSIENT_DECAYS / min(derived.gamma_h, derived.gamma_c) / dt))


@dataclass
class FieldRun:
    """Time series of one or more realisations (columns are seeds)."""

    dt: float
    phi_a: np.ndarray = field(repr=False)
    phi_s: np.ndarray = field(repr=False)
    phi_h: np.ndarray = field(repr=False)
    phi_c: np.ndarray = field(repr=False)
    transient: int = 0
    phi_b: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def t(self) -> np.ndarray:
        return self.dt * np.arange(self.phi_s.shape[0])

    def steady(self, name: str = "phi_s") -> np.ndarray:
        return getattr(self, name)[self.transient:]

    def to_frame(self, column: int = 0) -> pd.DataFrame:
        """One realisation as a table, transient included."""
        frame = pd.DataFrame({"t": self.t})
        if self.phi_b is not None:
            frame["phi_b"] = self.phi_b
        for name in ("phi_a", "phi_s", "phi_h", "phi_c"):
            frame[name] = getattr(self, name)[:, column]
        return frame


def _stack(traces: Mapping[str, NoiseTrace]) -> Tuple[np.ndarray, float]:
    dts = {traces[f].dt for f in FILTERS}
    if len(dts) != 1:
        raise PreconditionViolated("noise traces must share one time step")
    u = np.stack([np.asarray(traces[f].samples, dtype=float) for f in FILTERS], axis=1)
    if u.ndim == 2:
        u = u[:, :, None]
    return u, dts.pop()


def propagate(derived: DerivedParameters, u: np.ndarray, dt: float,
              phi_b: Optional[Callable[[np.ndarray], np.ndarray]] = None,
              phi_b_fixed: float = 0.0, initial: Optional[np.ndarray] = None,
              steps: Optional[int] = None) -> FieldRun:
    """Integrate the batched system driven by noise `u` of shape (steps, 2, seeds).

    Args:
        derived: Derived circuit parameters.
        u: Dimensionless noise, held constant over each step.
        dt: Time step (s).
        phi_b: Optional prescribed slow-mode flux as a function of time.
        phi_b_fixed: Constant flux used when `phi_b` is None; also the base
            point of the split propagation otherwise.
        initial: Initial state of shape (6,) or (6, seeds).
        steps: Number of steps; defaults to the noise length.

    Raises:
        StiffnessDetected: if the state stops being finite.
    """
    steps = u.shape[0] if steps is None else steps
    seeds = u.shape[2]
    a, b = state_matrices(derived, phi_b_fixed)
    x = np.zeros((6, seeds))
    if initial is not None:
        x[:] = np.asarray(initial, dtype=float).reshape(6, -1)

    out = np.empty((steps + 1, 3, seeds))
    out[0] = x[:3]
    times = dt * np.arange(steps + 1)

    if phi_b is None:
        phi, gamma = discretize(a, b, dt)
        for k in range(steps):
            x = phi @ x + gamma @ u[k]
            out[k + 1] = x[:3]
        flux = np.full(steps + 1, phi_b_fixed)
    else:
        phi, gamma = discretize(a, b, 0.5 * dt)
        mass_inv_col = np.linalg.inv(field_matrices(derived, phi_b_fixed)[0])[:, 0]
        k0 = derived.omega_a ** 4 / float(squid_stiffness(derived, phi_b_fixed))
        # stiffness of phi_a relative to the base point, sampled at mid-step
        flux = np.asarray(phi_b(times), dtype=float)
        mid = np.asarray(phi_b(times[:-1] + 0.5 * dt), dtype=float)
        delta = k0 - derived.omega_a ** 4 / squid_stiffness(derived, mid)
        kick = dt * mass_inv_col[:, None]
        for k in range(steps):
            x = phi @ x + gamma @ u[k]
            x[3:] -= kick * (delta[k] * x[0])
            x = phi @ x + gamma @ u[k]
            out[k + 1] = x[:3]

    if not np.all(np.isfinite(x)):
        raise StiffnessDetected("field integration produced non-finite values")

    phi_a = out[:, 0]
    phi_s = derived.omega_a ** 2 * phi_a / squid_stiffness(derived, flux)[:, None]
    return FieldRun(dt=dt, phi_a=phi_a, phi_s=phi_s, phi_h=out[:, 1], phi_c=out[:, 2],
                    transient=min(transient_steps(derived, dt), steps), phi_b=flux)


def simulate_linear(derived: DerivedParameters, traces: Mapping[str, NoiseTrace],
                    phi_b_fixed: float = 0.0, t_end: Optional[float] = None,
                    initial: Optional[np.ndarray] = None) -> FieldRun:
    """Fields at fixed phi_b driven by the filter noise traces.

    Raises:
        PreconditionViolated: if the traces do not cover t_end or the system is not damped.
        StiffnessDetected: see `propagate`.
    """
    u, dt = _stack(traces)
    steps = _steps(u, dt, t_end)
    check_damped(derived, phi_b_fixed)
    return propagate(derived, u, dt, phi_b_fixed=phi_b_fixed, initial=initial, steps=steps)


def simulate_driven(derived: DerivedParameters, traces: Mapping[str, NoiseTrace], A_b: float,
                    theta_b: float = 0.0, t_end: Optional[float] = None) -> FieldRun:
    """Fields under the prescribed flux phi_b(t) = 2 A_b cos(omega_b t + theta_b)."""
    u, dt = _stack(traces)
    steps = _steps(u, dt, t_end)
    check_damped(derived, 0.0)
    omega_b = derived.omega_b

    def flux(t):
        return 2.0 * A_b * np.cos(omega_b * t + theta_b)

    return propagate(derived, u, dt, phi_b=flux, steps=steps)


def _steps(u: np.ndarray, dt: float, t_end: Optional[float]) -> int:
    if t_end is None:
        return u.shape[0]
    steps = int(round(t_end / dt))
    if steps > u.shape[0]:
        raise PreconditionViolated(f"noise covers {u.shape[0] * dt:.3e} s < t_end={t_end:.3e} s")
    return steps


def first_harmonic(run: FieldRun, omega_b: float, theta_b: float = 0.0) -> np.ndarray:
    """Lock-in estimate exp(i theta_b) mean(phi_s^2 exp(i omega_b t)) per seed.

    The average runs over a whole number of slow periods after the transient.
    """
    t = run.t[run.transient:]
    period = 2.0 * math.pi / omega_b
    whole = int(math.floor((t[-1] - t[0]) / period))
    if whole < 1:
        raise PreconditionViolated("run is shorter than one slow period after the transient")
    keep = t - t[0] < whole * period
    square = run.steady()[keep] ** 2
    reference = np.exp(1j * (omega_b * t[keep] + theta_b))
    return reference @ square / keep.sum()
