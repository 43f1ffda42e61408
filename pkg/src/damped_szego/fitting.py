"""Small least-squares helpers used by the asymptotic fits."""

import numpy as np

__all__ = ["linear_fit", "loglog_fit", "r_squared"]


def linear_fit(x, y):
    """Slope and intercept of the least-squares line through (x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    slope = float(np.dot(dx, y - ym) / np.dot(dx, dx))
    return slope, float(ym - slope * xm)


def r_squared(x, y, slope, intercept):
    y = np.asarray(y, dtype=float)
    resid = y - (slope * np.asarray(x, dtype=float) + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        return 1.0
    return 1.0 - float(np.sum(resid**2)) / ss_tot


def loglog_fit(t, y):
    """Power-law fit y ~ prefactor * t^slope via least squares in log-log."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(t <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive data")
    slope, intercept = linear_fit(np.log(t), np.log(y))
    return slope, float(np.exp(intercept))
