"""RK4 pseudospectral integration of the damped cubic Szego equation.

The evolution is i du/dt + i*alpha*(u|1) = P(|u|^2 u) with P the
nonnegative-frequency projector.  The cubic term is evaluated by
transforming to the grid, multiplying pointwise and projecting back;
the damping acts on the zero mode only.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUpError, ResolutionLossWarning
from .hardy import HardyState

__all__ = [
    "SolverConfig",
    "DiagnosticsSeries",
    "SolverResult",
    "rhs",
    "rk4_step",
    "krasny_filter",
    "evolve",
    "check_lyapunov",
]

# Abort threshold for the squared L2 norm; the flow only decreases it, so
# anything this large is integrator overflow in progress.
_L2_ABORT = 1e12
_RESOLUTION_RATIO = 1e-8


@dataclass(frozen=True)
class SolverConfig:
    """Numerical parameters of one time-integration run."""

    alpha: float
    dt: float
    t_end: float
    grid_size: int
    krasny_threshold: float = 1e-12
    krasny_relative: bool = False
    record_stride: int = 1
    sobolev_exponents: tuple = (1.0,)
    dealias: bool = False

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.dt <= 0 or self.t_end <= 0:
            raise ValueError("dt and t_end must be positive")
        if self.grid_size <= 0 or self.grid_size % 2 != 0:
            raise ValueError("grid_size must be even and positive")
        if not 0 <= self.krasny_threshold < 1:
            raise ValueError("krasny_threshold must lie in [0, 1)")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        object.__setattr__(self, "sobolev_exponents", tuple(float(s) for s in self.sobolev_exponents))
        for s in self.sobolev_exponents:
            if s < 0.5:
                raise ValueError(f"Sobolev exponent must be >= 1/2, got {s}")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))


@dataclass
class DiagnosticsSeries:
    """Per-record scalar diagnostics of a run (times strictly increasing)."""

    t: np.ndarray
    l2_sq: np.ndarray
    momentum: np.ndarray
    u0_abs: np.ndarray
    hs_sq: dict = field(default_factory=dict)  # sobolev exponent -> ndarray

    def __post_init__(self):
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("record times must be strictly increasing")
        for arr in (self.t, self.l2_sq, self.momentum, self.u0_abs, *self.hs_sq.values()):
            if not np.all(np.isfinite(arr)):
                raise ValueError("diagnostics must be finite")

    def __len__(self):
        return self.t.shape[0]


@dataclass
class SolverResult:
    """Final state, diagnostics and optional snapshots of one run."""

    u_final: HardyState
    diagnostics: DiagnosticsSeries
    snapshots: list
    resolution_loss: bool = False
    resolution_loss_time: float = None


def _nonlinear_coeffs(c: np.ndarray, n: int, dealias: bool) -> np.ndarray:
    """Projected cubic term P(|u|^2 u) in coefficient space.

    The collocation-grid offset drops out of the round trip for even N, so
    the plain FFT grid is used here.  With ``dealias`` the product is formed
    on a doubled grid, which removes aliasing from the cubic term entirely.
    """
    k = c.shape[0]
    m = 2 * n if dealias else n
    full = np.zeros(m, dtype=complex)
    full[:k] = c
    v = np.fft.ifft(full) * m
    w = v * v * np.conj(v)
    return np.fft.fft(w)[:k] / m


def _rhs_coeffs(c: np.ndarray, n: int, alpha: float, dealias: bool) -> np.ndarray:
    out = -1j * _nonlinear_coeffs(c, n, dealias)
    out[0] -= alpha * c[0]
    return out


def rhs(u: HardyState, alpha: float, dealias: bool = False) -> HardyState:
    """Time derivative du/dt = -i P(|u|^2 u) - alpha*(u|1) e_0."""
    return HardyState(_rhs_coeffs(u.coeffs, u.grid_size, alpha, dealias), u.grid_size)


def _rk4_coeffs(c, n, alpha, dt, dealias):
    k1 = _rhs_coeffs(c, n, alpha, dealias)
    k2 = _rhs_coeffs(c + (0.5 * dt) * k1, n, alpha, dealias)
    k3 = _rhs_coeffs(c + (0.5 * dt) * k2, n, alpha, dealias)
    k4 = _rhs_coeffs(c + dt * k3, n, alpha, dealias)
    return c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(u: HardyState, alpha: float, dt: float, krasny_threshold: float = 0.0,
             dealias: bool = False) -> HardyState:
    """One classical RK4 step, followed by the roundoff filter when enabled."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    c = _rk4_coeffs(u.coeffs, u.grid_size, alpha, dt, dealias)
    if not np.all(np.isfinite(c)):
        raise BlowUpError(dt)
    if krasny_threshold > 0:
        c = np.where(np.abs(c) < krasny_threshold, 0.0, c)
    return HardyState(c, u.grid_size)


def krasny_filter(u: HardyState, threshold: float) -> HardyState:
    """Zero every coefficient with modulus below ``threshold``."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    if threshold == 0:
        return u
    c = np.where(np.abs(u.coeffs) < threshold, 0.0, u.coeffs)
    return HardyState(c, u.grid_size)


def evolve(u0: HardyState, cfg: SolverConfig, snapshot_times=()) -> SolverResult:
    """Integrate to ``cfg.t_end`` recording diagnostics every ``record_stride`` steps.

    Snapshots of the full state are taken at the steps nearest the requested
    times.  Raises :class:`BlowUpError` on overflow; flags resolution loss
    when the last retained mode stops being negligible.
    """
    if u0.grid_size != cfg.grid_size:
        raise ValueError(f"initial state has grid_size {u0.grid_size}, config says {cfg.grid_size}")

    n = cfg.grid_size
    n_steps = cfg.n_steps
    dt = cfg.dt
    c = u0.coeffs.astype(complex).copy()
    kk = np.arange(c.shape[0], dtype=float)
    hs_weights = {s: (1.0 + kk * kk) ** s for s in cfg.sobolev_exponents}

    threshold = cfg.krasny_threshold
    if cfg.krasny_relative and threshold > 0:
        threshold *= float(np.max(np.abs(c))) if c.shape[0] else 0.0

    snap_steps = {}
    for ts in snapshot_times:
        if ts < 0 or ts > n_steps * dt * (1 + 1e-12):
            raise ValueError(f"snapshot time {ts} outside [0, t_end]")
        snap_steps.setdefault(int(round(ts / dt)), []).append(ts)

    rows_t, rows_l2, rows_mom, rows_u0 = [], [], [], []
    rows_hs = {s: [] for s in cfg.sobolev_exponents}
    snapshots = []
    resolution_loss = False
    resolution_time = None

    def record(step, a):
        t = step * dt
        rows_t.append(t)
        sq = a * a
        rows_l2.append(float(sq.sum()))
        rows_mom.append(float((kk * sq).sum()))
        rows_u0.append(float(a[0]))
        for s, w in hs_weights.items():
            rows_hs[s].append(float((w * sq).sum()))
        nonlocal resolution_loss, resolution_time
        amax = a.max() if a.shape[0] else 0.0
        if not resolution_loss and amax > 0 and a[-1] > _RESOLUTION_RATIO * amax:
            resolution_loss = True
            resolution_time = t
            warnings.warn(
                f"last retained mode above {_RESOLUTION_RATIO:g} of the maximum at t={t:.6g}",
                ResolutionLossWarning,
                stacklevel=2,
            )

    record(0, np.abs(c))
    if 0 in snap_steps:
        snapshots.append((0.0, HardyState(c, n)))

    for i in range(1, n_steps + 1):
        c = _rk4_coeffs(c, n, cfg.alpha, dt, cfg.dealias)
        if not np.all(np.isfinite(c)):
            raise BlowUpError(i * dt)
        a = np.abs(c)
        if threshold > 0:
            keep = a >= threshold
            c = np.where(keep, c, 0.0)
            a = np.where(keep, a, 0.0)
        if float((a * a).sum()) > _L2_ABORT:
            raise BlowUpError(i * dt)
        if i in snap_steps:
            snapshots.append((i * dt, HardyState(c, n)))
        if i % cfg.record_stride == 0 or i == n_steps:
            record(i, a)

    series = DiagnosticsSeries(
        t=np.asarray(rows_t),
        l2_sq=np.asarray(rows_l2),
        momentum=np.asarray(rows_mom),
        u0_abs=np.asarray(rows_u0),
        hs_sq={s: np.asarray(v) for s, v in rows_hs.items()},
    )
    return SolverResult(
        u_final=HardyState(c, n),
        diagnostics=series,
        snapshots=snapshots,
        resolution_loss=resolution_loss,
        resolution_loss_time=resolution_time,
    )


def check_lyapunov(series: DiagnosticsSeries, alpha: float) -> float:
    """Residual of d/dt ||u||^2 + 2*alpha*|(u|1)|^2 = 0 from recorded data.

    Uses centered differences at interior record times and normalises by
    max(1, initial squared L2 norm).
    """
    if len(series) < 3:
        raise ValueError("need at least three records")
    t, l2, u0 = series.t, series.l2_sq, series.u0_abs
    deriv = (l2[2:] - l2[:-2]) / (t[2:] - t[:-2])
    resid = np.abs(deriv + 2.0 * alpha * u0[1:-1] ** 2)
    return float(resid.max() / max(1.0, l2[0]))
