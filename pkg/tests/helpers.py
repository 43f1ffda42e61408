"""Independent brute-force oracles used by the test suite only."""

import numpy as np

from damped_szego.hardy import GridField, HardyState, grid_points


def dft_to_grid_oracle(u: HardyState) -> np.ndarray:
    """O(N^2) evaluation of sum_k c_k e^{i k x_n} by direct summation."""
    n = u.grid_size
    x = grid_points(n)
    out = np.zeros(n, dtype=complex)
    for k, ck in enumerate(u.coeffs):
        out += ck * np.exp(1j * k * x)
    return out


def dft_from_grid_oracle(f: GridField, chunk: int = 256) -> np.ndarray:
    """O(N^2) projection oracle: c_k = (1/N) sum_n v_n e^{-i k x_n}, k < N/2."""
    n = f.grid_size
    x = grid_points(n)
    v = f.values
    out = np.empty(n // 2, dtype=complex)
    for start in range(0, n // 2, chunk):
        ks = np.arange(start, min(start + chunk, n // 2))
        out[start : start + ks.shape[0]] = np.exp(-1j * np.outer(ks, x)) @ v / n
    return out


def char_poly_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Eigenvalues via Faddeev-LeVerrier characteristic coefficients + roots.

    Only for tiny matrices; independent of LAPACK's Hermitian solver.
    """
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    mk = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        mk = m @ mk
        coeffs[k] = -np.trace(mk) / k
        mk += coeffs[k] * np.eye(n)
    roots = np.roots(coeffs)
    return np.sort(roots.real)[::-1]


def random_hermitian(rng, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (a + a.conj().T)


def finite_diff(f, t: float, h: float):
    """Five-point first and second derivative stencils."""
    vals = [f(t + j * h) for j in (-2, -1, 0, 1, 2)]
    d1 = (vals[0] - 8 * vals[1] + 8 * vals[3] - vals[4]) / (12 * h)
    d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * h * h)
    return d1, d2
