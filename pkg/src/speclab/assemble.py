"""Dense Hermitian truncations of the periodic and Dirichlet-type operators.

Two Galerkin bases are used:

* ``exp2`` -- orthonormal complex exponentials e_m = e^{i pi m x}/sqrt(2)
  on [0,2], m = -N..N, for the 2-periodic problems.  Matrices are built
  from closed-form exponential coefficients of the (1-periodic, shifted)
  coefficients and then realified by the orthogonal change of basis to
  {1/sqrt(2), cos(pi m x), sin(pi m x)}, so eigensolving stays in real
  symmetric arithmetic.

* ``sine1`` -- orthonormal s_m = sqrt(2) sin(pi m x) on [0,1], m = 1..N,
  for the Dirichlet-type problems; the sines satisfy
  y(0)=y''(0)=y(1)=y''(1)=0 exactly.

The first-order term 2(p y')' always enters through its weak form
-2 \int p u' v', which needs only p itself and keeps exact symmetry.

An independent finite-difference oracle (uniform grid, central stencils,
antisymmetric ghost points) is provided for cross-validation, together
with Richardson extrapolation over nested grids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import SolverError
from .trigpoly import CoefficientPair, TrigPoly, effective_potential

__all__ = [
    "OperatorMatrix",
    "fourth_periodic",
    "fourth_dirichlet",
    "second_periodic",
    "second_dirichlet",
    "multiplication_matrix",
    "fd_matrix",
    "fd_lowest",
    "richardson",
    "richardson_lowest",
    "FD_PROBLEMS",
]

FD_PROBLEMS = ("fourth_dirichlet", "fourth_periodic",
               "second_dirichlet", "second_periodic")


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense real symmetric truncation of an operator.

    ``entries`` for basis ``exp2`` are in the realified basis
    [1/sqrt(2), cos(pi m x) (m=1..N), sin(pi m x) (m=1..N)].
    """

    basis: str          # 'exp2' or 'sine1'
    order: int          # 2 or 4
    N: int
    entries: np.ndarray
    shift: float = 0.0

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _check_truncation(N: int, *polys: TrigPoly):
    if N < 1:
        raise ValueError("truncation N must be >= 1")
    deg = max((f.degree for f in polys), default=0)
    if N < deg:
        raise ValueError(
            "N=%d too small to represent coefficients of degree %d in the "
            "coupling band" % (N, deg))


# ----------------------------------------------------------------------
# exp2 basis (2-periodic problems)
# ----------------------------------------------------------------------

def _period2_exp_coeffs(f: TrigPoly, jmax: int) -> np.ndarray:
    """Exponential coefficients c_j, j=-jmax..jmax, of a 1-periodic f
    viewed on [0,2]:  f = sum_j c_j e^{i pi j x}.  Odd j vanish."""
    c = np.zeros(2 * jmax + 1, dtype=complex)
    c[jmax] = f.mean
    for k in range(1, f.degree + 1):
        j = 2 * k
        if j > jmax:
            break
        ck = 0.5 * (f.cos_coeffs[k - 1] - 1j * f.sin_coeffs[k - 1])
        c[jmax + j] = ck
        c[jmax - j] = np.conj(ck)
    return c


def _exp2_complex(cp_or_w, t: float, N: int, order: int) -> np.ndarray:
    """Complex Hermitian matrix <H e_m, e_k>, k,m = -N..N."""
    m = np.arange(-N, N + 1)
    km_diff = m[:, None] - m[None, :]          # k - m
    if order == 4:
        p = cp_or_w.p.shift(t)
        q = cp_or_w.q.shift(t)
        ph = _period2_exp_coeffs(p, 2 * N)
        qh = _period2_exp_coeffs(q, 2 * N)
        # <H e_m, e_k> = (pi m)^4 d_km - 2 pi^2 k m p~_{k-m} + q~_{k-m}
        H = np.diag((np.pi * m) ** 4).astype(complex)
        H += (-2.0 * np.pi ** 2) * (m[:, None] * m[None, :]) * ph[2 * N + km_diff]
        H += qh[2 * N + km_diff]
    else:
        w = cp_or_w.shift(t)
        wh = _period2_exp_coeffs(w, 2 * N)
        H = np.diag((np.pi * m) ** 2).astype(complex)
        H += wh[2 * N + km_diff]
    return H


def _real_basis_transform(N: int) -> np.ndarray:
    """Unitary with columns [u0, cos_1..cos_N, sin_1..sin_N] expressed in
    the exponential basis e_{-N}..e_N."""
    dim = 2 * N + 1
    U = np.zeros((dim, dim), dtype=complex)
    r = 1.0 / np.sqrt(2.0)
    U[N, 0] = 1.0
    for m in range(1, N + 1):
        U[N + m, m] = r
        U[N - m, m] = r
        U[N + m, N + m] = -1j * r
        U[N - m, N + m] = 1j * r
    return U


def _realify(H: np.ndarray, N: int) -> np.ndarray:
    U = _real_basis_transform(N)
    A = U.conj().T @ H @ U
    scale = 1.0 + np.abs(A.real).max()
    if np.abs(A.imag).max() > 1e-9 * scale:
        raise SolverError("realified exp2 matrix has non-negligible "
                          "imaginary part; coefficients must be real")
    Ar = A.real
    return 0.5 * (Ar + Ar.T)


def fourth_periodic(cp: CoefficientPair, t: float, N: int) -> OperatorMatrix:
    """2-periodic truncation of y'''' + 2(p y')' + q y, shifted by t."""
    _check_truncation(N, cp.p, cp.q)
    H = _exp2_complex(cp, t, N, order=4)
    return OperatorMatrix("exp2", 4, N, _realify(H, N), t)


def second_periodic(w: TrigPoly, t: float, N: int) -> OperatorMatrix:
    """2-periodic truncation of -y'' + w y, shifted by t."""
    if w.period != 1.0:
        raise ValueError("potential must have period 1")
    _check_truncation(N, w)
    H = _exp2_complex(w, t, N, order=2)
    return OperatorMatrix("exp2", 2, N, _realify(H, N), t)


# ----------------------------------------------------------------------
# sine1 basis (Dirichlet-type problems)
# ----------------------------------------------------------------------

def _cos_moments(f: TrigPoly, rmax: int) -> np.ndarray:
    """I[r] = int_0^1 f(x) cos(pi r x) dx for r = 0..rmax, in closed form.

    Cosine modes of f land only on even r = 2j; sine modes land on every
    odd r through the (1 - cos(pi r)) integrals.
    """
    I = np.zeros(rmax + 1)
    I[0] = f.mean
    for j in range(1, f.degree + 1):
        if 2 * j <= rmax:
            I[2 * j] += 0.5 * f.cos_coeffs[j - 1]
    r_odd = np.arange(1, rmax + 1, 2, dtype=float)
    for j in range(1, f.degree + 1):
        bj = f.sin_coeffs[j - 1]
        if bj != 0.0:
            I[1::2] += bj * (4.0 * j / np.pi) / (4.0 * j * j - r_odd ** 2)
    return I


def _sine_overlap_matrices(f: TrigPoly, N: int):
    """C[k,m] = I(|m-k|)+I(m+k) and S[k,m] = I(|m-k|)-I(m+k) for the
    orthonormal sine basis (1-based m,k)."""
    I = _cos_moments(f, 2 * N)
    m = np.arange(1, N + 1)
    diff = np.abs(m[None, :] - m[:, None])
    summ = m[None, :] + m[:, None]
    return I[diff] + I[summ], I[diff] - I[summ]


def fourth_dirichlet(cp: CoefficientPair, t: float, N: int) -> OperatorMatrix:
    """Dirichlet-type truncation of the shifted fourth-order operator."""
    _check_truncation(N, cp.p, cp.q)
    p = cp.p.shift(t)
    q = cp.q.shift(t)
    m = np.arange(1, N + 1)
    Cp, _ = _sine_overlap_matrices(p, N)
    _, Sq = _sine_overlap_matrices(q, N)
    A = np.diag((np.pi * m) ** 4)
    A = A - 2.0 * np.pi ** 2 * (m[:, None] * m[None, :]) * Cp + Sq
    return OperatorMatrix("sine1", 4, N, 0.5 * (A + A.T), t)


def second_dirichlet(w: TrigPoly, t: float, N: int) -> OperatorMatrix:
    """Dirichlet truncation of -y'' + w(x+t) y on [0,1]."""
    if w.period != 1.0:
        raise ValueError("potential must have period 1")
    _check_truncation(N, w)
    m = np.arange(1, N + 1)
    _, Sw = _sine_overlap_matrices(w.shift(t), N)
    A = np.diag((np.pi * m) ** 2) + Sw
    return OperatorMatrix("sine1", 2, N, 0.5 * (A + A.T), t)


def multiplication_matrix(f: TrigPoly, basis: str, N: int) -> np.ndarray:
    """Matrix of multiplication by the 1-periodic f in the given basis
    (realified for exp2)."""
    if basis == "sine1":
        _, S = _sine_overlap_matrices(f, N)
        return 0.5 * (S + S.T)
    if basis == "exp2":
        m = np.arange(-N, N + 1)
        fh = _period2_exp_coeffs(f, 2 * N)
        H = fh[2 * N + (m[:, None] - m[None, :])]
        return _realify(H, N)
    raise ValueError("unknown basis %r" % basis)


# ----------------------------------------------------------------------
# finite-difference oracle
# ----------------------------------------------------------------------

def _shift_op(M: int, k: int) -> sp.csr_matrix:
    """Circulant shift: (S_k y)_i = y_{(i+k) mod M}."""
    i = np.arange(M)
    return sp.csr_matrix((np.ones(M), (i, (i + k) % M)), shape=(M, M))


def fd_matrix(cp: CoefficientPair, t: float, problem: str, M: int):
    """Finite-difference matrix on a uniform grid.

    Returns (A, symmetric) with A sparse CSC.  Central stencils
    throughout; 2(p y')' is discretized as 2 p y'' + 2 p' y' with p, p'
    evaluated on the grid.  Dirichlet-type conditions y(0)=y''(0)=0 use
    antisymmetric ghost points, periodic problems wrap on [0,2].
    """
    if problem not in FD_PROBLEMS:
        raise ValueError("unknown problem %r" % problem)
    if M < 64:
        raise ValueError("grid size M must be >= 64")
    p = cp.p.shift(t)
    q = cp.q.shift(t)
    pd = p.derivative(1)
    fourth = problem.startswith("fourth")

    if problem.endswith("dirichlet"):
        h = 1.0 / M
        n = M - 1
        x = np.arange(1, M) * h
        if fourth:
            D4 = sp.diags([1.0, -4.0, 6.0, -4.0, 1.0], [-2, -1, 0, 1, 2],
                          shape=(n, n), format="lil") / h ** 4
            # ghosts y_{-1} = -y_1 and y_{M+1} = -y_{M-1}
            D4[0, 0] -= 1.0 / h ** 4
            D4[n - 1, n - 1] -= 1.0 / h ** 4
            D2 = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n)) / h ** 2
            D1 = sp.diags([-1.0, 1.0], [-1, 1], shape=(n, n)) / (2 * h)
            A = (D4.tocsr()
                 + 2.0 * sp.diags(p.eval(x)) @ D2
                 + 2.0 * sp.diags(pd.eval(x)) @ D1
                 + sp.diags(q.eval(x)))
            symmetric = p.degree == 0 and p.mean == 0.0
        else:
            D2 = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n)) / h ** 2
            A = -D2 + sp.diags(q.eval(x))
            symmetric = True
    else:
        h = 2.0 / M
        x = np.arange(M) * h
        I = sp.identity(M, format="csr")
        S1, Sm1 = _shift_op(M, 1), _shift_op(M, -1)
        S2, Sm2 = _shift_op(M, 2), _shift_op(M, -2)
        D2 = (S1 - 2.0 * I + Sm1) / h ** 2
        if fourth:
            D4 = (S2 - 4.0 * S1 + 6.0 * I - 4.0 * Sm1 + Sm2) / h ** 4
            D1 = (S1 - Sm1) / (2 * h)
            A = (D4
                 + 2.0 * sp.diags(p.eval(x)) @ D2
                 + 2.0 * sp.diags(pd.eval(x)) @ D1
                 + sp.diags(q.eval(x)))
            symmetric = p.degree == 0 and p.mean == 0.0
        else:
            A = -D2 + sp.diags(q.eval(x))
            symmetric = True
    return A.tocsc(), symmetric


def _spectral_floor(cp: CoefficientPair, t: float, problem: str) -> float:
    """A value strictly below the spectrum, used as shift-invert target."""
    xs = np.linspace(0.0, 1.0, 257)
    if problem.startswith("fourth"):
        # H = h^2 + V >= min V
        lo = float(np.min(effective_potential(cp).eval(xs + t)))
    else:
        lo = float(np.min(cp.q.eval(xs + t)))
    return min(0.0, lo) - 3.21


def _fd_apply(cp: CoefficientPair, t: float, problem: str, M: int):
    """Extended-precision application V -> A V of the finite-difference
    operator to a block of column vectors.

    The fourth difference is evaluated as nested first differences, so
    rounding happens at the cancelled scale h^4 ||y''''|| instead of
    ||y||/h^4.  In float64 the latter reaches 1e-2 at M=2048 and
    dominates the Rayleigh quotients; nesting in extended precision
    pushes the floor below the h^2 discretization error on every grid
    used here.
    """
    p = cp.p.shift(t)
    q = cp.q.shift(t)
    pd = p.derivative(1)
    fourth = problem.startswith("fourth")
    dirichlet = problem.endswith("dirichlet")
    h = 1.0 / M if dirichlet else 2.0 / M
    x = np.arange(1, M) * h if dirichlet else np.arange(M) * h
    pv = p.eval(x).astype(np.longdouble)[:, None]
    pdv = pd.eval(x).astype(np.longdouble)[:, None]
    qv = q.eval(x).astype(np.longdouble)[:, None]
    hld = np.longdouble(h)

    def apply(V: np.ndarray) -> np.ndarray:
        n = V.shape[0]
        if dirichlet:
            # ghosts: y_0 = y_M = 0 always; y_{-1} = -y_1 and
            # y_{M+1} = -y_{M-1} for the fourth-order stencil
            z = np.zeros((1, V.shape[1]), dtype=np.longdouble)
            ve = np.vstack([-V[:1], z, V, z, -V[-1:]])
            s = ve[1:] - ve[:-1]
            d = s[1:] - s[:-1]                 # second difference, i=0..M
            d_in = d[1:-1]
            if fourth:
                sd = d[1:] - d[:-1]
                e = sd[1:] - sd[:-1]
                first = (ve[3:3 + n] - ve[1:1 + n]) / (2.0 * hld)
        else:
            up = np.roll(V, -1, axis=0)
            dn = np.roll(V, 1, axis=0)
            d_in = (up - V) - (V - dn)
            if fourth:
                dup = np.roll(d_in, -1, axis=0)
                ddn = np.roll(d_in, 1, axis=0)
                e = (dup - d_in) - (d_in - ddn)
                first = (up - dn) / (2.0 * hld)
        if fourth:
            return (e / hld ** 4 + 2.0 * pv * d_in / hld ** 2
                    + 2.0 * pdv * first + qv * V)
        return -d_in / hld ** 2 + qv * V

    return apply


def _orthonormalize(V: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt; LAPACK QR has no extended-precision path."""
    V = V.copy()
    for j in range(V.shape[1]):
        for i in range(j):
            V[:, j] -= (V[:, i] @ V[:, j]) * V[:, i]
        V[:, j] /= np.sqrt(V[:, j] @ V[:, j])
    return V


def fd_lowest(cp: CoefficientPair, t: float, problem: str, M: int,
              k: int = 16) -> np.ndarray:
    """The k lowest finite-difference eigenvalues, ascending.

    Shift-invert Arnoldi around a point below the spectrum seeds a
    subspace that is then polished by inverse iteration with iteratively
    refined solves and a Rayleigh-Ritz step in extended precision.  The
    start vector is fixed so repeated runs are bit-identical.
    """
    A, symmetric = fd_matrix(cp, t, problem, M)
    n = A.shape[0]
    sigma = _spectral_floor(cp, t, problem)
    v0 = np.ones(n)
    # near-degenerate periodic pairs make the nonsymmetric matrix almost
    # defective there; the extra block columns let subspace iteration
    # capture the slow second Schur direction geometrically
    kb = min(k + 8, n - 2)
    try:
        if symmetric:
            _, V = spla.eigsh(A, k=kb, sigma=sigma, v0=v0)
        else:
            _, V = spla.eigs(A, k=kb, sigma=sigma, v0=v0)
    except spla.ArpackNoConvergence as exc:
        raise SolverError("finite-difference eigensolve did not converge "
                          "(problem=%s, M=%d)" % (problem, M)) from exc
    apply = _fd_apply(cp, t, problem, M)
    lu = spla.splu((A - sigma * sp.identity(n, format="csc")).tocsc())
    V = np.real(V).astype(np.longdouble)
    for _ in range(4):
        X = lu.solve(V.astype(float)).astype(np.longdouble)
        for _ in range(2):
            R = V - (apply(X) - sigma * X)     # refine the float64 solve
            X = X + lu.solve(R.astype(float))
        V = _orthonormalize(X)
    T = (V.T @ apply(V)).astype(float)
    if symmetric:
        vals = np.linalg.eigvalsh(0.5 * (T + T.T))
    else:
        vals = np.linalg.eigvals(T).real
    return np.sort(vals)[:k]


def richardson(tables: list) -> np.ndarray:
    """Richardson extrapolation of eigenvalues from grids M, 2M, 4M, ...

    Assumes an error expansion in even powers of h; each level cancels
    the next power.
    """
    rows = [np.asarray(v, dtype=float) for v in tables]
    if len(rows) < 2:
        raise ValueError("need at least two grids to extrapolate")
    level = 1
    while len(rows) > 1:
        fac = 4.0 ** level
        rows = [(fac * rows[i + 1] - rows[i]) / (fac - 1.0)
                for i in range(len(rows) - 1)]
        level += 1
    return rows[0]


def richardson_lowest(cp: CoefficientPair, t: float, problem: str,
                      grids=(512, 1024, 2048), k: int = 16) -> np.ndarray:
    """Richardson-extrapolated k lowest eigenvalues over nested grids."""
    grids = list(grids)
    for a, b in zip(grids, grids[1:]):
        if b != 2 * a:
            raise ValueError("grids must double: %r" % (grids,))
    return richardson([fd_lowest(cp, t, problem, M, k) for M in grids])
