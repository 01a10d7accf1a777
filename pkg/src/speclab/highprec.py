"""Extended-precision trace-formula residuals.

The raw partial-sum residuals of the trace series decay faster than the
float64 eigensolver noise floor (roughly machine epsilon times the
largest retained eigenvalue, i.e. eps*(pi*N)^order), so statements like
"the residual at M=16 is below the residual at M=8" cannot be resolved
in double precision.  This module rebuilds the truncated operators from
the same closed-form trigonometric integrals in mpmath arithmetic and
eigensolves them symmetrically, pushing the noise floor to 10^-dps.

Matrices are assembled directly in the real bases:

* 2-periodic problems on [0,2] in the orthonormal basis
  [1/sqrt(2), cos(pi m x), sin(pi m x)], m = 1..N;
* Dirichlet-type problems on [0,1] in sqrt(2) sin(pi m x), m = 1..N.

Only coefficient data enters, so entries carry no quadrature error.
"""

from __future__ import annotations

from mpmath import mp

from .errors import SolverError
from .trigpoly import CoefficientPair, TrigPoly

__all__ = [
    "second_residuals_hp",
    "fourth_residuals_hp",
    "periodic_matrix_hp",
    "dirichlet_matrix_hp",
    "eigenvalues_hp",
]

DEFAULT_DPS = 30


def _shifted_coeffs(f: TrigPoly, t):
    """(mean, [a_j], [b_j]) of x -> f(x+t) in mpmath numbers."""
    a0 = mp.mpf(f.mean)
    A, B = [], []
    for j in range(1, f.degree + 1):
        a = mp.mpf(f.cos_coeffs[j - 1])
        b = mp.mpf(f.sin_coeffs[j - 1])
        c = mp.cos(2 * mp.pi * j * t)
        s = mp.sin(2 * mp.pi * j * t)
        A.append(a * c + b * s)
        B.append(b * c - a * s)
    return a0, A, B


def _eval0(coeffs):
    """Value of the shifted coefficient at x = 0, i.e. f(t)."""
    a0, A, _ = coeffs
    return a0 + mp.fsum(A)


def _second_derivative0(coeffs):
    """f''(t) from the shifted coefficient lists."""
    a0, A, _ = coeffs
    return -mp.fsum((2 * mp.pi * (j + 1)) ** 2 * aj
                    for j, aj in enumerate(A))


def _A_of(coeffs):
    """r -> integral_0^2 f cos(pi r x) dx for the 1-periodic f."""
    a0, A, _ = coeffs

    def val(r):
        r = abs(r)
        if r == 0:
            return 2 * a0
        if r % 2 == 0 and r // 2 <= len(A):
            return A[r // 2 - 1]
        return mp.mpf(0)
    return val


def _B_of(coeffs):
    """r -> integral_0^2 f sin(pi r x) dx (odd in r)."""
    _, _, B = coeffs

    def val(r):
        s = 1 if r >= 0 else -1
        r = abs(r)
        if r % 2 == 0 and 0 < r // 2 <= len(B):
            return s * B[r // 2 - 1]
        return mp.mpf(0)
    return val


def _cos_moment_of(coeffs):
    """r -> integral_0^1 f cos(pi r x) dx; sine modes hit odd r."""
    a0, A, B = coeffs

    def val(r):
        r = abs(r)
        if r == 0:
            return a0
        if r % 2 == 0:
            if r // 2 <= len(A):
                return A[r // 2 - 1] / 2
            return mp.mpf(0)
        acc = mp.mpf(0)
        for j, bj in enumerate(B, start=1):
            if bj:
                acc += bj * (4 * j / mp.pi) / (4 * j * j - mp.mpf(r) ** 2)
        return acc
    return val


def periodic_matrix_hp(cp: CoefficientPair, order: int, t, N: int):
    """Real symmetric 2-periodic truncation in mpmath, dim 2N+1.

    Order 4 builds y'''' + 2(p y')' + q y (first-order term in the weak
    form); order 2 builds -y'' + q y.
    """
    dim = 2 * N + 1
    H = mp.zeros(dim, dim)
    r2 = 1 / mp.sqrt(2)
    qc = _shifted_coeffs(cp.q, t)
    Aq, Bq = _A_of(qc), _B_of(qc)
    if order == 4:
        pc = _shifted_coeffs(cp.p, t)
        Ap, Bp = _A_of(pc), _B_of(pc)
    pi2 = mp.pi ** 2

    H[0, 0] = qc[0]
    for m in range(1, N + 1):
        d = (mp.pi * m) ** 4 if order == 4 else (mp.pi * m) ** 2
        H[m, m] += d
        H[N + m, N + m] += d
        H[0, m] = H[m, 0] = Aq(m) * r2
        H[0, N + m] = H[N + m, 0] = Bq(m) * r2
        for k in range(1, N + 1):
            cc = (Aq(k - m) + Aq(k + m)) / 2
            ss = (Aq(k - m) - Aq(k + m)) / 2
            cs = (Bq(k + m) + Bq(k - m)) / 2   # row sin k, col cos m
            if order == 4:
                cc += -2 * pi2 * k * m * (Ap(k - m) - Ap(k + m)) / 2
                ss += -2 * pi2 * k * m * (Ap(k - m) + Ap(k + m)) / 2
                # the sine here comes from (cos pi m x)', hence m - k
                cs += 2 * pi2 * k * m * (Bp(k + m) + Bp(m - k)) / 2
            H[k, m] += cc
            H[N + k, N + m] += ss
            H[N + k, m] += cs
            H[m, N + k] += cs
    return H


def dirichlet_matrix_hp(cp: CoefficientPair, order: int, t, N: int):
    """Real symmetric Dirichlet-type truncation in mpmath, dim N."""
    H = mp.zeros(N, N)
    Iq = _cos_moment_of(_shifted_coeffs(cp.q, t))
    if order == 4:
        Ip = _cos_moment_of(_shifted_coeffs(cp.p, t))
    pi2 = mp.pi ** 2
    for m in range(1, N + 1):
        H[m - 1, m - 1] += ((mp.pi * m) ** 4 if order == 4
                            else (mp.pi * m) ** 2)
        for k in range(1, N + 1):
            v = Iq(abs(m - k)) - Iq(m + k)
            if order == 4:
                v += -2 * pi2 * k * m * (Ip(abs(m - k)) + Ip(m + k))
            H[k - 1, m - 1] += v
    return H


def eigenvalues_hp(H):
    """Ascending eigenvalues of a symmetric mpmath matrix."""
    try:
        E = mp.eigsy(H, eigvals_only=True)
    except Exception as exc:
        raise SolverError("extended-precision eigensolve failed") from exc
    return sorted(E[i] for i in range(H.rows))


def _residuals(vals, mu, leading, terms_of, target, Ms):
    out = {}
    for M in Ms:
        s = leading + mp.fsum(terms_of(n, vals, mu) for n in range(1, M + 1))
        out[M] = float(abs(s - target))
    return out


def second_residuals_hp(q: TrigPoly, x, M_list, N: int,
                        dps: int = DEFAULT_DPS) -> dict:
    """Raw residual of the Hill trace series at each M in M_list."""
    cp = CoefficientPair(TrigPoly(), q)
    with mp.workdps(dps):
        vals = eigenvalues_hp(periodic_matrix_hp(cp, 2, mp.mpf(0), N))
        mu = eigenvalues_hp(dirichlet_matrix_hp(cp, 2, mp.mpf(x), N))
        target = _eval0(_shifted_coeffs(q, mp.mpf(x)))
        return _residuals(
            vals, mu, vals[0],
            lambda n, v, m: (v[2 * n - 1] - m[n - 1]) + (v[2 * n] - m[n - 1]),
            target, M_list)


def fourth_residuals_hp(cp: CoefficientPair, x, M_list, N: int,
                        dps: int = DEFAULT_DPS) -> dict:
    """Raw residual of the fourth-order trace series at each M."""
    with mp.workdps(dps):
        vals = eigenvalues_hp(periodic_matrix_hp(cp, 4, mp.mpf(0), N))
        mu = eigenvalues_hp(dirichlet_matrix_hp(cp, 4, mp.mpf(x), N))
        pc = _shifted_coeffs(cp.p, mp.mpf(x))
        target = (_eval0(_shifted_coeffs(cp.q, mp.mpf(x)))
                  - _second_derivative0(pc) / 2)
        return _residuals(
            vals, mu, vals[0],
            lambda n, v, m: (v[2 * n - 1] - m[n - 1]) + (v[2 * n] - m[n - 1]),
            target, M_list)
