"""Sampling, quadrature and angular differentiation on the unit sphere.

Nodes are a tensor product of Gauss-Legendre points in cos(theta) with a
uniform grid in psi.  Both pole rows are excluded by construction, which keeps
cot(theta) and csc(theta) factors of downstream angular fields finite at every
node.  The quadrature integrates products of spherical polynomials up to
degree n_theta - 1 in cos(theta) and Fourier modes up to n_psi/2 - 1 exactly.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

__all__ = [
    "SphereGrid", "SphereField", "DirectionFunctions",
    "build_grid", "integrate", "project_multipole", "angular_derivative",
    "direction_functions",
]

_STENCIL = 9  # 8th-order local polynomial fit for theta derivatives


def _fd_weights(x, x0, m):
    """Fornberg weights for the m-th derivative at x0 on arbitrary nodes x."""
    n = len(x)
    w = np.zeros((m + 1, n))
    w[0, 0] = 1.0
    c1 = 1.0
    c4 = x[0] - x0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    w[k, i] = c1 * (k * w[k - 1, i - 1] - c5 * w[k, i - 1]) / c2
                w[0, i] = -c1 * c5 * w[0, i - 1] / c2
            for k in range(mn, 0, -1):
                w[k, j] = ((x[i] - x0) * w[k, j] - k * w[k - 1, j]) / c3
            w[0, j] = (x[i] - x0) * w[0, j] / c3
        c1 = c2
    return w[m]


@dataclass(frozen=True)
class SphereGrid:
    """Product quadrature grid on S^2; immutable and shareable."""

    n_theta: int
    n_psi: int
    theta: np.ndarray          # (n_theta,), strictly inside (0, pi), increasing
    psi: np.ndarray            # (n_psi,), uniform on [0, 2*pi)
    weights: np.ndarray        # (n_theta, n_psi), sums to 4*pi
    _dtheta: np.ndarray = field(repr=False, default=None)

    def nodes(self):
        """Flattened (theta, psi) arrays over all nodes, C-ordered."""
        T, P = np.meshgrid(self.theta, self.psi, indexing="ij")
        return T.ravel(), P.ravel()

    @property
    def shape(self):
        return (self.n_theta, self.n_psi)

    def field(self, values):
        return SphereField(self, np.asarray(values, dtype=float).reshape(self.shape))

    def field_from(self, fn):
        """Sample a callable fn(theta, psi) over all nodes."""
        T, P = self.nodes()
        return self.field(np.asarray(fn(T, P)) + np.zeros_like(T))


def build_grid(n_theta, n_psi):
    """Build the Gauss-Legendre x uniform-psi product grid.

    Requires n_theta >= 2 and even n_psi >= 4.
    """
    if not (isinstance(n_theta, (int, np.integer)) and n_theta >= 2):
        raise ConfigError(f"n_theta must be an integer >= 2, got {n_theta!r}")
    if not (isinstance(n_psi, (int, np.integer)) and n_psi >= 4 and n_psi % 2 == 0):
        raise ConfigError(f"n_psi must be an even integer >= 4, got {n_psi!r}")
    x, wx = np.polynomial.legendre.leggauss(int(n_theta))
    theta = np.arccos(x)[::-1].copy()          # increasing in theta
    w_theta = wx[::-1].copy()
    psi = np.arange(n_psi) * (2.0 * np.pi / n_psi)
    weights = np.outer(w_theta, np.full(n_psi, 2.0 * np.pi / n_psi))
    dtheta = _theta_derivative_matrix(theta)
    return SphereGrid(int(n_theta), int(n_psi), theta, psi, weights, dtheta)


def _theta_derivative_matrix(theta):
    n = len(theta)
    width = min(_STENCIL, n)
    D = np.zeros((n, n))
    for i in range(n):
        lo = min(max(0, i - width // 2), n - width)
        idx = np.arange(lo, lo + width)
        D[i, idx] = _fd_weights(theta[idx], theta[i], 1)
    return D


class SphereField:
    """Real scalar samples on a SphereGrid."""

    def __init__(self, grid, values):
        values = np.asarray(values, dtype=float)
        if values.shape != grid.shape:
            raise ConfigError(f"field shape {values.shape} != grid shape {grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("sphere field contains non-finite samples")
        self.grid = grid
        self.values = values

    def __add__(self, o):
        v = o.values if isinstance(o, SphereField) else o
        return SphereField(self.grid, self.values + v)

    def __sub__(self, o):
        v = o.values if isinstance(o, SphereField) else o
        return SphereField(self.grid, self.values - v)

    def __mul__(self, o):
        v = o.values if isinstance(o, SphereField) else o
        return SphereField(self.grid, self.values * v)

    __rmul__ = __mul__


@dataclass(frozen=True)
class DirectionFunctions:
    """The four direction functions n^0..n^3 sampled on a grid.

    n^0 = 1, n^1 = sin(theta) cos(psi), n^2 = sin(theta) sin(psi),
    n^3 = cos(theta).
    """

    grid: SphereGrid
    n: tuple  # four SphereFields


def direction_functions(grid):
    T, P = np.meshgrid(grid.theta, grid.psi, indexing="ij")
    st = np.sin(T)
    fields = (
        SphereField(grid, np.ones_like(T)),
        SphereField(grid, st * np.cos(P)),
        SphereField(grid, st * np.sin(P)),
        SphereField(grid, np.cos(T)),
    )
    return DirectionFunctions(grid, fields)


def integrate(f):
    """Quadrature of a SphereField over S^2 (weight includes sin(theta))."""
    return float(np.sum(f.grid.weights * f.values))


def project_multipole(f, nu):
    """(1/4pi) * integral of f * n^nu over the sphere."""
    if nu not in (0, 1, 2, 3):
        raise ValueError(f"multipole index must be 0..3, got {nu!r}")
    n = direction_functions(f.grid).n[nu]
    return integrate(f * n) / (4.0 * np.pi)


def angular_derivative(f, axis):
    """Differentiate a field in theta (local 8th-order fit) or psi (spectral)."""
    if axis in ("theta", 2):
        return SphereField(f.grid, f.grid._dtheta @ f.values)
    if axis in ("psi", 3):
        n_psi = f.grid.n_psi
        spec = np.fft.rfft(f.values, axis=1)
        m = np.arange(spec.shape[1])
        fac = 1j * m
        if n_psi % 2 == 0:
            fac[-1] = 0.0  # Nyquist mode has no well-defined odd derivative
        return SphereField(f.grid, np.fft.irfft(spec * fac, n=n_psi, axis=1))
    raise ValueError(f"axis must be 'theta' or 'psi', got {axis!r}")
