"""Independent reference calculations used by the tests."""
import numpy as np
from scipy.linalg import eigh_tridiagonal


def fd_spectrum(V, p=0.01, n_levels=6, N=20000):
    """Lowest eigenvalues of -(4/pi^2) d2/dx2 + V 1[|x|<p] on [-1, 1], Dirichlet walls.

    Second-order finite differences with the barrier averaged over each cell,
    Richardson-extrapolated from N and 2N cells.
    """
    def solve(n):
        h = 2.0 / n
        x = -1.0 + h * np.arange(1, n)
        lo = np.clip(x - h / 2, -p, p)
        hi = np.clip(x + h / 2, -p, p)
        c = 4.0 / np.pi**2
        d = 2 * c / h**2 + V * (hi - lo) / h
        e = np.full(n - 2, -c / h**2)
        return eigh_tridiagonal(d, e, select="i", select_range=(0, n_levels - 1),
                                eigvals_only=True)
    a, b = solve(N), solve(2 * N)
    return (4 * b - a) / 3


def fd_level(symmetry, l, V, p=0.01):
    """Levels alternate even, odd, even, ... in the full spectrum."""
    E = fd_spectrum(V, p, n_levels=2 * l)
    return E[2 * l - 2] if symmetry == "even" else E[2 * l - 1]
