"""Laplace transforms of input signals, reproducing kernels and Hardy norms.

``L f(z) = int_0^inf exp(-z t) f(t) dt``.  For a modulated indicator
``chi_(a,b](t) exp(i c t)`` this is ``(exp(-w a) - exp(-w b)) / w`` with
``w = z - i c``, evaluated as ``exp(-w a) * (1 - exp(-w L)) / w`` so the
removable singularity at ``w = 0`` costs nothing.

Hardy norms use the boundary-line convention
``||F||_{H^p}^p = sup_{eps > 0} int |F(eps + shift + i y)|^p dy`` (no ``1/2pi``),
under which the Laplace transform scales ``L^2`` norms by ``sqrt(2 pi)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import DomainError, UnboundedNormError
from .measure import CarlesonSquare
from .signals import kernel_signal

__all__ = [
    "laplace",
    "kernel",
    "kernel_norm",
    "kernel_norm_quadrature",
    "kernel_square_bounds",
    "KernelBoundCheck",
    "check_kernel_square_bounds",
    "HardyNormEstimate",
    "hardy_norm",
    "reproducing_residual",
]


def _one_minus_exp_over(x):
    """``(1 - exp(-x)) / x`` for complex ``x``, accurate near ``0``."""
    x = np.asarray(x, dtype=complex)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    series = 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0
    return np.where(small, series, -np.expm1(-safe) / safe)


def laplace(f, z):
    """Laplace transform of the signal ``f`` at ``z`` (scalar or array)."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    for p in f.pieces:
        w = z - 1j * p.freq
        length = p.b - p.a
        out = out + p.coef * np.exp(-w * p.a) * length * _one_minus_exp_over(w * length)
    for e in f.exps:
        s = z + e.rate
        if np.any(s.real <= 0):
            raise DomainError("Laplace integral of an exponential term diverges here", "z")
        out = out + e.coef / s
    return out if out.ndim else complex(out)


def kernel(lam, z):
    """Reproducing kernel ``K_lambda(z) = 1 / (2 pi (z + conj(lambda)))``."""
    lam = complex(lam)
    return 1.0 / (2.0 * math.pi * (np.asarray(z, dtype=complex) + lam.conjugate()))


def kernel_norm(lam, p):
    """``||k_lambda||_{L^p} = (p (2 pi)^p Re lambda)^(-1/p)``."""
    lam = complex(lam)
    if not lam.real > 0:
        raise DomainError("kernel needs Re(lambda) > 0", "lambda")
    if not p >= 1:
        raise DomainError("p must be >= 1", "p")
    return (p * (2.0 * math.pi) ** p * lam.real) ** (-1.0 / p)


def kernel_norm_quadrature(lam, p):
    """``||k_lambda||_{L^p}`` by quadrature of ``|k_lambda|^p`` (independent route)."""
    k = kernel_signal(lam)
    return k.integrate_modulus(lambda m: m**p) ** (1.0 / p)


def kernel_square_bounds(interval):
    """``(1/(sqrt(10) pi |I|), 1/(pi |I|))``: bounds for ``|K_lambda|`` on ``Q_I``.

    ``lambda`` is the centre of ``Q_I``, so ``z + conj(lambda)`` ranges over
    a rectangle with real part in ``(|I|/2, 3|I|/2)`` and imaginary part in
    ``[-|I|/2, |I|/2]``.
    """
    L = interval.length
    return 1.0 / (math.sqrt(10.0) * math.pi * L), 1.0 / (math.pi * L)


@dataclass
class KernelBoundCheck:
    lo: float
    hi: float
    samples: int
    min_abs: float
    max_abs: float
    violations: int

    @property
    def ok(self):
        return self.violations == 0


def check_kernel_square_bounds(interval, samples=200, rng=None):
    """Sample ``z`` in ``Q_I`` and count violations of :func:`kernel_square_bounds`."""
    rng = np.random.default_rng(rng)
    sq = CarlesonSquare(interval)
    L = interval.length
    x = rng.uniform(0.0, L, samples)
    y = rng.uniform(interval.lo, interval.hi, samples)
    z = x + 1j * y
    z = z[sq.contains(z)]
    vals = np.abs(kernel(sq.center, z))
    lo, hi = kernel_square_bounds(interval)
    bad = int(np.count_nonzero((vals < lo) | (vals > hi)))
    return KernelBoundCheck(lo, hi, int(z.size), float(vals.min()), float(vals.max()), bad)


@dataclass
class HardyNormEstimate:
    """Boundary-line estimate of ``||L f||_{H^p}^p`` on a shifted half-plane.

    ``value`` is the largest truncated integral over ``epsilon_grid``;
    ``tail_bound`` bounds the neglected ``|y| > cutoff`` part at the
    maximising ``epsilon``.
    """

    p: float
    shift: float
    value: float
    epsilon_grid: list = field(default_factory=list)
    per_epsilon: list = field(default_factory=list)
    cutoff: float = 0.0
    tail_bound: float = 0.0
    converged: bool = True

    @property
    def norm(self):
        return self.value ** (1.0 / self.p)


def _decay_constants(f, x):
    """``(B, centres)`` with ``|L f(x + i y)| <= sum_j B_j / |y - c_j|``."""
    B, centres = [], []
    for p in f.pieces:
        B.append(abs(p.coef) * (math.exp(-x * p.a) + math.exp(-x * p.b)))
        centres.append(p.freq)
    for e in f.exps:
        B.append(abs(e.coef))
        centres.append(-complex(e.rate).imag)
    return float(sum(B)), centres


_GL_NODES, _GL_WEIGHTS = special.roots_legendre(16)


def _panel_integral(g, y0, y1, width, max_nodes):
    """Composite 16-point Gauss-Legendre over panels of about ``width``.

    Returns ``None`` when more than ``max_nodes`` evaluations would be needed.
    """
    n = max(1, math.ceil((y1 - y0) / width))
    if n * _GL_NODES.size > max_nodes:
        return None
    h = 0.5 * (y1 - y0) / n
    total = []
    step = 1 << 14
    for k0 in range(0, n, step):
        k = np.arange(k0, min(n, k0 + step))
        y = (y0 + (2 * k + 1) * h)[:, None] + h * _GL_NODES[None, :]
        total.append(float(h * (g(y) @ _GL_WEIGHTS).sum()))
    return math.fsum(total)


def hardy_norm(f, p, shift=0.0, epsilon_grid=(1.0, 0.1, 1e-2, 1e-3, 1e-4), rtol=1e-8,
               max_nodes=1 << 19):
    """``sup_eps int |L f(eps + shift + i y)|^p dy`` over a decreasing ``eps`` grid.

    The ``y`` range is truncated at ``|y| <= Y``.  With ``|L f| <= 2B/|y|``
    beyond ``Y >= 2 max |c_j|`` the tail is at most ``2 (2B)^p Y^(1-p)/(p-1)``.
    ``Y`` is doubled until that is below ``rtol`` times the running integral,
    or until resolving the oscillations of the next doubling would take more
    than ``max_nodes`` evaluations; ``converged`` records which.

    Raises
    ------
    UnboundedNormError
        For ``p == 1``, where the ``1/|y|`` boundary decay is not integrable.
    """
    if not p >= 1:
        raise DomainError("p must be >= 1", "p")
    if p == 1:
        raise UnboundedNormError("boundary trace of a Laplace transform is not integrable for p = 1")
    if shift < 0:
        raise DomainError("shift must be non-negative", "shift")
    grid = [float(e) for e in epsilon_grid]
    if f.is_zero:
        return HardyNormEstimate(p, shift, 0.0, grid, [0.0] * len(grid))

    # panels resolve exp(-i y t) over the support and the exponential poles
    t_max = max((piece.b for piece in f.pieces), default=0.0)
    osc = math.pi / (4.0 * t_max) if t_max > 0 else math.inf
    best = None
    per_eps = []
    for eps in grid:
        x = eps + shift
        B, centres = _decay_constants(f, x)
        narrow = min((complex(e.rate).real + x for e in f.exps), default=math.inf) / 4.0

        def g(y):
            return np.abs(laplace(f, x + 1j * y)) ** p

        Y = 2.0 * max((abs(c) for c in centres), default=0.0) + 64.0
        total = _panel_integral(g, -Y, Y, min(osc, narrow, Y / 64.0), math.inf)
        converged = True
        while True:
            tail = 2.0 * (2.0 * B) ** p * Y ** (1.0 - p) / (p - 1.0)
            if tail <= rtol * total:
                break
            width = min(osc, Y / 16.0)
            right = _panel_integral(g, Y, 2.0 * Y, width, max_nodes)
            left = _panel_integral(g, -2.0 * Y, -Y, width, max_nodes)
            if right is None or left is None:
                converged = False
                break
            total += right + left
            Y *= 2.0
        per_eps.append(total)
        if best is None or total > best[0]:
            best = (total, Y, tail, converged)
    value, Y, tail, converged = best
    return HardyNormEstimate(p, shift, value, grid, per_eps, Y, tail, converged)


def reproducing_residual(F, lam, points=()):
    """``|F(lambda) - int F(i y) conj(K_lambda(i y)) dy|`` for ``F`` analytic in ``C_+``.

    ``F`` is a callable on complex arguments, or an input signal (then its
    Laplace transform is used).  ``points`` are extra ordinates where the
    integrand peaks, used as quadrature breakpoints.
    """
    if not callable(F) or hasattr(F, "pieces"):
        sig = F
        F = lambda z: laplace(sig, z)  # noqa: E731
    lam = complex(lam)
    if not lam.real > 0:
        raise DomainError("lambda must lie in the right half-plane", "lambda")

    def g(y):
        return F(1j * y) * np.conj(kernel(lam, 1j * y))

    opts = dict(limit=2000, epsabs=1e-13, epsrel=1e-12)
    peaks = sorted({lam.imag, *map(float, points)})
    cuts = [peaks[0] - 1.0, *peaks, peaks[-1] + 1.0]
    parts = []
    for part in (np.real, np.imag):
        h = lambda y: float(part(g(y)))  # noqa: E731
        pieces = [integrate.quad(h, -math.inf, cuts[0], **opts)[0]]
        pieces += [integrate.quad(h, a, b, **opts)[0] for a, b in zip(cuts[:-1], cuts[1:]) if b > a]
        pieces.append(integrate.quad(h, cuts[-1], math.inf, **opts)[0])
        parts.append(math.fsum(pieces))
    integral = complex(parts[0], parts[1])
    return abs(complex(F(lam)) - integral)
