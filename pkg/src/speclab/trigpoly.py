"""Exact algebra of real trigonometric polynomials.

A ``TrigPoly`` is a finite real Fourier series on a cell of length
``period``::

    f(x) = mean + sum_k cos_coeffs[k-1]*cos(2*pi*k*x/period)
                + sin_coeffs[k-1]*sin(2*pi*k*x/period)

All operations (differentiation, shifting, products, Fourier data) are
carried out on the coefficients in closed form, never by sampling, so the
only floating-point error downstream comes from the eigensolvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TrigPoly",
    "CoefficientPair",
    "effective_potential",
]


def _as_coeffs(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError("coefficient arrays must be one-dimensional")
    return arr


@dataclass(frozen=True)
class TrigPoly:
    """Real trigonometric polynomial with a declared period.

    Immutable; every operation returns a new instance.
    """

    period: float = 1.0
    mean: float = 0.0
    cos_coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sin_coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("period must be positive")
        a = _as_coeffs(self.cos_coeffs)
        b = _as_coeffs(self.sin_coeffs)
        K = max(len(a), len(b))
        a = np.pad(a, (0, K - len(a)))
        b = np.pad(b, (0, K - len(b)))
        # trim trailing all-zero pairs; eval is unchanged
        while K > 0 and a[K - 1] == 0.0 and b[K - 1] == 0.0:
            K -= 1
        object.__setattr__(self, "cos_coeffs", a[:K].copy())
        object.__setattr__(self, "sin_coeffs", b[:K].copy())
        self.cos_coeffs.setflags(write=False)
        self.sin_coeffs.setflags(write=False)

    # ------------------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.cos_coeffs)

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """Evaluate at scalar or array ``x``."""
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, self.mean)
        w = 2.0 * np.pi / self.period
        for k in range(1, self.degree + 1):
            out = out + self.cos_coeffs[k - 1] * np.cos(w * k * x)
            out = out + self.sin_coeffs[k - 1] * np.sin(w * k * x)
        return out if out.shape else float(out)

    def derivative(self, m: int = 1) -> "TrigPoly":
        """Exact m-th derivative."""
        if m < 0:
            raise ValueError("derivative order must be nonnegative")
        a = self.cos_coeffs.copy()
        b = self.sin_coeffs.copy()
        mean = self.mean
        w = 2.0 * np.pi / self.period
        k = np.arange(1, self.degree + 1)
        for _ in range(m):
            a, b = w * k * b, -w * k * a
            mean = 0.0
        return TrigPoly(self.period, mean, a, b)

    def shift(self, t: float) -> "TrigPoly":
        """Return g with g(x) = f(x + t), via angle addition per frequency."""
        w = 2.0 * np.pi / self.period
        k = np.arange(1, self.degree + 1)
        c = np.cos(w * k * t)
        s = np.sin(w * k * t)
        a = self.cos_coeffs * c + self.sin_coeffs * s
        b = -self.cos_coeffs * s + self.sin_coeffs * c
        return TrigPoly(self.period, self.mean, a, b)

    # -- exponential-coefficient view ----------------------------------
    def exp_coeffs(self) -> np.ndarray:
        """Complex coefficients c_j, j=-K..K, with f = sum c_j e^{i w j x}."""
        K = self.degree
        c = np.zeros(2 * K + 1, dtype=complex)
        c[K] = self.mean
        for k in range(1, K + 1):
            c[K + k] = 0.5 * (self.cos_coeffs[k - 1] - 1j * self.sin_coeffs[k - 1])
            c[K - k] = np.conj(c[K + k])
        return c

    @staticmethod
    def from_exp_coeffs(c: np.ndarray, period: float) -> "TrigPoly":
        K = (len(c) - 1) // 2
        mean = c[K].real
        ks = np.arange(1, K + 1)
        a = 2.0 * c[K + ks].real
        b = -2.0 * c[K + ks].imag
        return TrigPoly(period, mean, a, b)

    def multiply(self, other: "TrigPoly") -> "TrigPoly":
        """Exact product by convolution of exponential coefficients."""
        if self.period != other.period:
            raise ValueError("period mismatch in product")
        if self.degree == 0 and other.degree == 0:
            return TrigPoly(self.period, self.mean * other.mean)
        c = np.convolve(self.exp_coeffs(), other.exp_coeffs())
        return TrigPoly.from_exp_coeffs(c, self.period)

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return self.multiply(other)
        return TrigPoly(self.period, self.mean * other,
                        self.cos_coeffs * other, self.sin_coeffs * other)

    __rmul__ = __mul__

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        if self.period != other.period:
            raise ValueError("period mismatch in sum")
        K = max(self.degree, other.degree)
        a = np.pad(self.cos_coeffs, (0, K - self.degree)) + \
            np.pad(other.cos_coeffs, (0, K - other.degree))
        b = np.pad(self.sin_coeffs, (0, K - self.degree)) + \
            np.pad(other.sin_coeffs, (0, K - other.degree))
        return TrigPoly(self.period, self.mean + other.mean, a, b)

    def __neg__(self) -> "TrigPoly":
        return TrigPoly(self.period, -self.mean, -self.cos_coeffs, -self.sin_coeffs)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-other)

    # ------------------------------------------------------------------
    def mean_and_norm(self):
        """Return (f_0, ||f||^2) on the unit cell, by Parseval."""
        if self.period != 1.0:
            raise ValueError("mean_and_norm requires period 1")
        norm2 = self.mean ** 2 + 0.5 * float(
            np.sum(self.cos_coeffs ** 2) + np.sum(self.sin_coeffs ** 2))
        return self.mean, norm2

    def fourier_on_unit(self, n: int):
        """Cosine/sine Fourier coefficients on [0,1] at frequency 2*pi*n."""
        if self.period != 1.0:
            raise ValueError("fourier_on_unit requires period 1")
        if n < 0:
            raise ValueError("n must be nonnegative")
        if n == 0:
            return self.mean, 0.0
        if n > self.degree:
            return 0.0, 0.0
        return 0.5 * self.cos_coeffs[n - 1], 0.5 * self.sin_coeffs[n - 1]


@dataclass(frozen=True)
class CoefficientPair:
    """The coefficient pair (p, q) of the fourth-order operator."""

    p: TrigPoly
    q: TrigPoly

    def __post_init__(self):
        if self.p.period != 1.0 or self.q.period != 1.0:
            raise ValueError("coefficient pair requires period-1 polynomials")

    def shift(self, t: float) -> "CoefficientPair":
        return CoefficientPair(self.p.shift(t), self.q.shift(t))


def effective_potential(cp: CoefficientPair) -> TrigPoly:
    """The zeroth-order term q - p'' - p^2 of the squared-operator form."""
    return cp.q - cp.p.derivative(2) - cp.p * cp.p
