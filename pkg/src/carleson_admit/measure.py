"""Discrete positive measures on the right half-plane and their Carleson intensities.

A measure is a finite list of weighted atoms ``z = x + iy`` with ``x > 0``.
Carleson squares are ``Q_I = {x + iy : y in I, 0 < x < |I|}`` with the
interval ``I`` closed in ``y`` and the depth constraint open in ``x``.

The alpha-intensity ``sup_I mu(Q_I) / |I|**alpha`` is computed exactly: for a
discrete measure the best mass available at depth ``L`` only changes when ``L``
crosses an atom's real part or the imaginary span of a pair of atoms, and
between two such values the ratio decreases in ``L``.  The supremum is thus
the maximum over those critical lengths of the limit ``|I| -> L`` from above,
where atoms with ``x == L`` are counted.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "ImaginaryInterval",
    "CarlesonSquare",
    "DiscreteMeasure",
    "IntensityResult",
    "IntensityTable",
    "Functional",
    "square_mass",
    "alpha_intensity",
    "best_square",
    "window_mass",
    "best_window",
    "strip_index",
    "strips",
    "strip_restrict",
    "restrict_real_part",
    "shift_measure",
    "intensity_table",
    "summability_functionals",
]


@dataclass(frozen=True)
class ImaginaryInterval:
    """Closed interval ``[center - length/2, center + length/2]`` on the imaginary axis."""

    center: float
    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise DomainError(f"interval length must be positive, got {self.length}", "length")

    @property
    def lo(self):
        return self.center - 0.5 * self.length

    @property
    def hi(self):
        return self.center + 0.5 * self.length


@dataclass(frozen=True)
class CarlesonSquare:
    interval: ImaginaryInterval

    @property
    def side(self):
        return self.interval.length

    @property
    def center(self):
        """Centre of the square as a complex number."""
        return complex(0.5 * self.side, self.interval.center)

    def contains(self, z):
        z = np.asarray(z)
        x, y = z.real, z.imag
        iv = self.interval
        return (x > 0) & (x < iv.length) & (y >= iv.lo) & (y <= iv.hi)

    def right_half(self, z):
        """Membership in the right half ``|I|/2 <= x < |I|`` of the square."""
        z = np.asarray(z)
        return self.contains(z) & (z.real >= 0.5 * self.side)


class DiscreteMeasure:
    """Finite positive measure ``sum_k w_k delta_{z_k}`` on the open right half-plane.

    Atoms are stored sorted by ``(re, im)``; coincident atoms are merged by
    summing their weights.  Instances are immutable.
    """

    __slots__ = ("_re", "_im", "_w")

    def __init__(self, points=(), weights=()):
        pts = np.asarray(points, dtype=complex).ravel()
        w = np.asarray(weights, dtype=float).ravel()
        if pts.shape != w.shape:
            raise DomainError("points and weights must have the same length", "weights")
        self._init_arrays(pts.real.copy(), pts.imag.copy(), w.copy())

    @classmethod
    def from_arrays(cls, re, im, weight):
        obj = cls.__new__(cls)
        obj._init_arrays(
            np.array(re, dtype=float).ravel(),
            np.array(im, dtype=float).ravel(),
            np.array(weight, dtype=float).ravel(),
        )
        return obj

    @classmethod
    def empty(cls):
        return cls.from_arrays([], [], [])

    def _init_arrays(self, re, im, w):
        if not (re.shape == im.shape == w.shape):
            raise DomainError("atom arrays must have equal length", "atoms")
        if not np.all(np.isfinite(re)) or not np.all(np.isfinite(im)):
            raise DomainError("atom coordinates must be finite", "atoms")
        bad = np.flatnonzero(~(re > 0))
        if bad.size:
            k = bad[0]
            raise DomainError(
                f"atom {k} at {re[k]}{im[k]:+}i is not in the open right half-plane", "re"
            )
        bad = np.flatnonzero(~(w > 0) | ~np.isfinite(w))
        if bad.size:
            raise DomainError(f"atom {bad[0]} has non-positive weight {w[bad[0]]}", "weight")
        if re.size:
            order = np.lexsort((im, re))
            re, im, w = re[order], im[order], w[order]
            new = np.ones(re.size, dtype=bool)
            new[1:] = (re[1:] != re[:-1]) | (im[1:] != im[:-1])
            if not new.all():
                groups = np.cumsum(new) - 1
                w = np.bincount(groups, weights=w)
                re, im = re[new], im[new]
        for a in (re, im, w):
            a.flags.writeable = False
        self._re, self._im, self._w = re, im, w

    @property
    def re(self):
        return self._re

    @property
    def im(self):
        return self._im

    @property
    def weights(self):
        return self._w

    @property
    def points(self):
        return self._re + 1j * self._im

    @property
    def total_mass(self):
        return float(self._w.sum())

    def __len__(self):
        return self._re.size

    def __bool__(self):
        return self._re.size > 0

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return (
            np.array_equal(self._re, other._re)
            and np.array_equal(self._im, other._im)
            and np.array_equal(self._w, other._w)
        )

    __hash__ = None

    def __repr__(self):
        return f"DiscreteMeasure({len(self)} atoms, mass={self.total_mass:.6g})"

    def __add__(self, other):
        return DiscreteMeasure.from_arrays(
            np.concatenate([self._re, other._re]),
            np.concatenate([self._im, other._im]),
            np.concatenate([self._w, other._w]),
        )

    def scaled(self, c):
        if not c > 0:
            raise DomainError("scale factor must be positive", "c")
        return DiscreteMeasure.from_arrays(self._re, self._im, self._w * c)

    def select(self, mask):
        mask = np.asarray(mask, dtype=bool)
        return DiscreteMeasure.from_arrays(self._re[mask], self._im[mask], self._w[mask])

    def to_list(self):
        return [
            {"re": float(x), "im": float(y), "weight": float(w)}
            for x, y, w in zip(self._re, self._im, self._w)
        ]

    @classmethod
    def from_list(cls, atoms):
        atoms = list(atoms)
        return cls.from_arrays(
            [a["re"] for a in atoms], [a["im"] for a in atoms], [a["weight"] for a in atoms]
        )


def square_mass(mu, interval):
    """Mass of the Carleson square over ``interval``."""
    L = interval.length
    mask = (mu.re < L) & (mu.im >= interval.lo) & (mu.im <= interval.hi)
    return float(mu.weights[mask].sum())


@dataclass(frozen=True)
class IntensityResult:
    """Value of a Carleson-intensity supremum together with a maximising square.

    When ``closed_depth`` is true the value is the limit of ``mu(Q_I)/|I|**alpha``
    as ``|I|`` decreases to ``length``; atoms with real part exactly ``length``
    are counted.
    """

    value: float
    mass: float
    length: float
    center: float
    closed_depth: bool = True

    @property
    def interval(self):
        if self.length > 0:
            return ImaginaryInterval(self.center, self.length)
        return None


def _sorted_by_im(mu):
    order = np.argsort(mu.im, kind="stable")
    im = mu.im[order]
    return mu.re[order], im, mu.weights[order], im[None, :] - im[:, None]


def _best_windows(re, im, w, diffs, L, closed):
    """Best mass among windows ``[im_i, im_i + L]`` with depth ``re < L`` (or ``<=``)."""
    active = w * ((re <= L) if closed else (re < L))
    inside = (diffs >= 0) & (diffs <= L)
    masses = inside @ active
    i = int(np.argmax(masses))
    return float(masses[i]), i


def best_square(mu, alpha):
    """Exact maximiser of ``mu(Q_I) / |I|**alpha`` over all intervals."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}", "alpha")
    if not mu:
        return IntensityResult(0.0, 0.0, 0.0, 0.0)
    re, im, w, diffs = _sorted_by_im(mu)
    spans = diffs[np.triu_indices(im.size, 1)]
    # squares shallower than the leftmost atom are empty
    candidates = np.unique(np.concatenate([re, spans[spans >= re.min()]]))
    total = float(w.sum())
    best = IntensityResult(0.0, 0.0, 0.0, 0.0)
    for L in candidates:
        # ratios only shrink from here on once the total mass cannot beat the best
        if total / L**alpha <= best.value:
            break
        mass, i = _best_windows(re, im, w, diffs, L, closed=True)
        value = mass / L**alpha
        if value > best.value:
            best = IntensityResult(value, mass, float(L), float(im[i] + 0.5 * L))
    return best


def alpha_intensity(mu, alpha):
    """The alpha-Carleson intensity ``sup_I mu(Q_I) / |I|**alpha``."""
    return best_square(mu, alpha).value


def best_window(mu, length):
    """Largest ``mu(Q_I)`` over intervals of the fixed length ``length``."""
    if not length > 0:
        raise DomainError("window length must be positive", "length")
    if not mu:
        return IntensityResult(0.0, 0.0, float(length), 0.0, closed_depth=False)
    re, im, w, diffs = _sorted_by_im(mu)
    mass, i = _best_windows(re, im, w, diffs, length, closed=False)
    return IntensityResult(mass, mass, float(length), float(im[i] + 0.5 * length), False)


def window_mass(mu, length):
    """``sup_{|I| = length} mu(Q_I)``."""
    return best_window(mu, length).mass


def strip_index(x):
    """Index ``n`` of the dyadic strip ``2**n <= x < 2**(n+1)`` (exact)."""
    _, e = np.frexp(np.asarray(x, dtype=float))
    return e - 1


def strips(mu):
    """Sorted indices of the dyadic strips that carry mass."""
    return [int(n) for n in np.unique(strip_index(mu.re))]


def strip_restrict(mu, n):
    return mu.select(strip_index(mu.re) == n)


def restrict_real_part(mu, upper):
    """Restriction to ``0 < re <= upper``."""
    return mu.select(mu.re <= upper)


def shift_measure(mu, h):
    """Move every atom from ``x + iy`` to ``(x - h) + iy``."""
    new_re = mu.re - h
    bad = np.flatnonzero(~(new_re > 0))
    if bad.size:
        k = bad[0]
        raise DomainError(
            f"shift by {h} moves atom {mu.re[k]}{mu.im[k]:+}i out of the right half-plane", "h"
        )
    return DiscreteMeasure.from_arrays(new_re, mu.im, mu.weights)


def _thread_count():
    try:
        return max(1, int(os.environ.get("CARLESON_ADMIT_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class IntensityTable:
    """Per-strip intensities ``C_alpha[mu_n]`` and the global ``C_alpha[mu]``.

    Only strips carrying mass appear in ``entries``; keys are sorted.
    """

    alpha: float
    entries: dict = field(default_factory=dict)
    total: float = 0.0

    def __iter__(self):
        return iter(sorted(self.entries.items()))

    def __len__(self):
        return len(self.entries)

    @property
    def strip_sum(self):
        return math.fsum(self.entries.values())

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "total": self.total,
            "strips": [{"n": n, "intensity": c} for n, c in self],
        }


def intensity_table(mu, alpha):
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}", "alpha")
    ns = strips(mu)
    parts = [strip_restrict(mu, n) for n in ns]
    threads = min(_thread_count(), max(1, len(parts)))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            values = list(pool.map(lambda m: alpha_intensity(m, alpha), parts))
    else:
        values = [alpha_intensity(m, alpha) for m in parts]
    return IntensityTable(alpha, dict(zip(ns, values)), alpha_intensity(mu, alpha))


@dataclass
class Functional:
    """A summability functional with its term-by-term breakdown.

    ``terms`` holds ``(n, intensity, weight, weighted)`` rows sorted by ``n``;
    ``extra`` is the additional non-strip term (window or head term) and
    ``extra_label`` says which.
    """

    value: float
    q: float
    weights: str
    terms: list = field(default_factory=list)
    extra: float = 0.0
    extra_label: str = ""

    def __float__(self):
        return self.value

    def to_dict(self):
        return {
            "value": self.value,
            "q": self.q,
            "weights": self.weights,
            "extra": self.extra,
            "extra_label": self.extra_label,
            "terms": [
                {"n": n, "intensity": c, "weight": wt, "weighted": v}
                for n, c, wt, v in self.terms
            ],
        }


def summability_functionals(mu, q, weights="unit", alpha=None, finite_time=None):
    """Evaluate one of the dyadic summability functionals.

    Parameters
    ----------
    mu : DiscreteMeasure
    q : float
        Intensity exponent, ``q >= 1``.
    weights : {"unit", "n_squared", "n_pow"}
        ``unit`` sums ``C_q[mu_n]`` over all strips.  ``n_squared`` and
        ``n_pow`` sum ``n**2 C_q[mu_n]`` resp. ``n**(2/alpha) C_q[mu_n]`` over
        ``n >= 1`` and add ``sup_{|I|=2} mu(Q_I)``.
    finite_time : int, optional
        ``M`` for the finite-horizon form: the unit sum over ``n >= -M`` plus
        ``C_q`` of the restriction of ``mu`` to ``re <= 2**-M``.
    """
    if not q >= 1:
        raise DomainError(f"q must be >= 1, got {q}", "q")
    if weights == "unit":
        wfun, n_min = (lambda n: 1.0), None
    elif weights == "n_squared":
        wfun, n_min = (lambda n: float(n) ** 2), 1
    elif weights == "n_pow":
        if alpha is None or not alpha > 0:
            raise DomainError("n_pow weights need a positive alpha", "alpha")
        wfun, n_min = (lambda n: float(n) ** (2.0 / alpha)), 1
    else:
        raise DomainError(f"unknown weights {weights!r}", "weights")
    if finite_time is not None:
        if weights != "unit":
            raise DomainError("finite_time only combines with unit weights", "weights")
        n_min = -int(finite_time)

    table = intensity_table(mu, q)
    terms = []
    for n, c in table:
        if n_min is not None and n < n_min:
            continue
        wt = wfun(n)
        terms.append((n, c, wt, wt * c))

    extra, label = 0.0, ""
    if finite_time is not None:
        extra = alpha_intensity(restrict_real_part(mu, 2.0 ** (-int(finite_time))), q)
        label = "head_intensity"
    elif weights != "unit":
        extra = window_mass(mu, 2.0)
        label = "window_mass_length_2"
    value = math.fsum([t[3] for t in terms] + [extra])
    name = weights if weights != "n_pow" else f"n_pow(2/{alpha})"
    return Functional(value, q, name, terms, extra, label)
