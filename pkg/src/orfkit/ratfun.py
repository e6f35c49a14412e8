"""Complex rational functions with a fixed pole sequence inside the unit disk.

A rational function of degree n is stored as numerator coefficients
c_0..c_n over the denominator pi_n(z) = prod_{j=1..n} (1 - conj(beta_j) z).
No common-factor cancellation is ever performed: the representation is
canonical, and the superstar conjugate is a pure coefficient reversal.

The distinguished point beta_0 never enters a denominator, but it anchors
the first Blaschke factor zeta_0 and both kernels.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npp

from .errors import (
    DivisionByZeroBlaschke,
    DomainError,
    KernelSingularity,
    PoleMismatch,
    PoleProximity,
)

# Pole-proximity guard: reject |1 - conj(beta) z| < TAU_POLE * (1 + |z|).
TAU_POLE = 1e-13


def _pole_tol(z):
    return TAU_POLE * (1.0 + np.abs(z))


class PoleSequence:
    """Points beta_0, beta_1, ... strictly inside the unit disk.

    beta_0 is a first-class entry: it never appears in a denominator but
    defines zeta_0 and the kernels. Repeated entries are allowed.
    """

    __slots__ = ("beta",)

    def __init__(self, beta):
        arr = np.atleast_1d(np.asarray(beta, dtype=complex)).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("pole sequence must be a nonempty 1-d list")
        if np.any(np.abs(arr) >= 1.0):
            raise DomainError("all poles beta_k must satisfy |beta_k| < 1")
        arr.flags.writeable = False
        self.beta = arr

    def __len__(self):
        return self.beta.size

    def __eq__(self, other):
        return isinstance(other, PoleSequence) and np.array_equal(self.beta, other.beta)

    def __repr__(self):
        return f"PoleSequence({list(self.beta)})"

    def eta(self, k):
        """Unimodular constant eta_k = conj(beta_k)/|beta_k|, or 1 for beta_k = 0."""
        b = self.beta[k]
        return np.conj(b) / abs(b) if b != 0 else 1.0 + 0.0j

    def upsilon(self, k):
        """Product eta_1 * ... * eta_k (equals 1 for k <= 0)."""
        out = 1.0 + 0.0j
        for j in range(1, k + 1):
            out *= self.eta(j)
        return out

    def varpi(self, k, z):
        """1 - conj(beta_k) z."""
        return 1.0 - np.conj(self.beta[k]) * np.asarray(z, dtype=complex)

    def varpi_star(self, k, z):
        """z - beta_k."""
        return np.asarray(z, dtype=complex) - self.beta[k]

    def pi(self, n, z):
        """prod_{j=1..n} (1 - conj(beta_j) z), without proximity checks."""
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for j in range(1, n + 1):
            out = out * (1.0 - np.conj(self.beta[j]) * z)
        return out

    def pi_star(self, n, z):
        """prod_{j=1..n} (z - beta_j)."""
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for j in range(1, n + 1):
            out = out * (z - self.beta[j])
        return out

    def pi_coeffs(self, n):
        """Ascending coefficients of pi_n."""
        out = np.array([1.0 + 0.0j])
        for j in range(1, n + 1):
            out = npp.polymul(out, [1.0, -np.conj(self.beta[j])])
        return out

    def shifted(self, k):
        """The sequence beta_k, beta_{k+1}, ... used by order-k associated systems."""
        if not 0 <= k < len(self):
            raise DomainError(f"shift index {k} out of range")
        return PoleSequence(self.beta[k:])


class RatFun:
    """Element c(z)/pi_n(z) of the space spanned by B_0..B_n.

    The degree n is declared, not inferred: trailing zero coefficients are
    legal and meaningful (the superstar is taken at the declared degree).
    """

    __slots__ = ("poles", "n", "numer")

    def __init__(self, poles: PoleSequence, numer, n: int | None = None):
        arr = np.atleast_1d(np.asarray(numer, dtype=complex)).copy()
        if n is None:
            n = arr.size - 1
        if arr.size != n + 1:
            raise DomainError(f"degree {n} needs {n + 1} coefficients, got {arr.size}")
        if len(poles) < n + 1:
            raise DomainError(f"pole sequence too short for degree {n}")
        arr.flags.writeable = False
        self.poles = poles
        self.n = n
        self.numer = arr

    def __call__(self, z):
        return evaluate(self, z)

    def __eq__(self, other):
        return (
            isinstance(other, RatFun)
            and self.n == other.n
            and np.array_equal(self.numer, other.numer)
            and np.array_equal(self.poles.beta[: self.n + 1], other.poles.beta[: self.n + 1])
        )

    def __mul__(self, c):
        if isinstance(c, (int, float, complex, np.number)):
            return RatFun(self.poles, self.numer * c, self.n)
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        return f"RatFun(n={self.n}, numer={list(self.numer)})"


def evaluate(f: RatFun, z) -> complex | np.ndarray:
    """Evaluate f at z (scalar or array): Horner numerator over the pole product.

    Raises PoleProximity if any point is within tolerance of a pole
    1/conj(beta_j), j = 1..n.
    """
    z = np.asarray(z, dtype=complex)
    num = npp.polyval(z, f.numer)
    den = np.ones_like(z)
    tol = _pole_tol(z)
    for j in range(1, f.n + 1):
        fac = 1.0 - np.conj(f.poles.beta[j]) * z
        if np.any(np.abs(fac) < tol):
            raise PoleProximity(f"evaluation within tolerance of pole 1/conj(beta_{j})")
        den = den * fac
    out = num / den
    return out if out.ndim else complex(out)


def substar_eval(f: RatFun, z) -> complex | np.ndarray:
    """Evaluate the substar conjugate f_*(z) = conj(f(1/conj(z))).

    On |z| = 1 this equals conj(f(z)). z = 0 is rejected unless f is
    constant (degree 0), where the limit is conj(c_0).
    """
    z = np.asarray(z, dtype=complex)
    if f.n == 0:
        out = np.full_like(z, np.conj(f.numer[0]))
        return out if out.ndim else complex(out)
    if np.any(np.abs(z) < _pole_tol(z)):
        raise DomainError("substar of a non-constant function is singular at z = 0")
    return np.conj(evaluate(f, 1.0 / np.conj(z)))


def superstar(f: RatFun) -> RatFun:
    """Superstar conjugate f^* = B_n f_* at the declared degree n.

    At coefficient level this is reversal plus conjugation times the
    unimodular constant upsilon_n; the denominator is unchanged.
    """
    ups = f.poles.upsilon(f.n)
    return RatFun(f.poles, ups * np.conj(f.numer[::-1]), f.n)


def combine(a, f: RatFun, b, g: RatFun) -> RatFun:
    """Linear combination a*f + b*g as a canonical RatFun.

    The operands must share the same pole sequence; the lower-degree
    numerator is rebased onto the common denominator by multiplying in the
    missing (1 - conj(beta_j) z) factors.
    """
    m = max(f.n, g.n)
    pf, pg = f.poles.beta[: f.n + 1], g.poles.beta[: g.n + 1]
    common = f.poles if len(f.poles) >= len(g.poles) else g.poles
    if len(common) < m + 1 or not (
        np.array_equal(pf, common.beta[: f.n + 1]) and np.array_equal(pg, common.beta[: g.n + 1])
    ):
        raise PoleMismatch("operands do not share a pole sequence")

    def rebase(h):
        c = h.numer
        for j in range(h.n + 1, m + 1):
            c = npp.polymul(c, [1.0, -np.conj(common.beta[j])])
        return np.concatenate([c, np.zeros(m + 1 - c.size, dtype=complex)])

    return RatFun(common, a * rebase(f) + b * rebase(g), m)


def blaschke_factor(poles: PoleSequence, k: int, z) -> complex | np.ndarray:
    """Blaschke factor zeta_k(z) = eta_k (z - beta_k)/(1 - conj(beta_k) z).

    Unimodular on |z| = 1, zero at beta_k; reduces to z when beta_k = 0.
    """
    z = np.asarray(z, dtype=complex)
    den = poles.varpi(k, z)
    if np.any(np.abs(den) < _pole_tol(z)):
        raise PoleProximity(f"zeta_{k} evaluated too close to its pole")
    out = poles.eta(k) * poles.varpi_star(k, z) / den
    return out if out.ndim else complex(out)


def blaschke_product(poles: PoleSequence, k: int, z) -> complex | np.ndarray:
    """Blaschke product B_k(z); B_{-1} = 1/zeta_0, B_0 = 1, B_k = zeta_1...zeta_k."""
    z = np.asarray(z, dtype=complex)
    if k < -1:
        raise DomainError("Blaschke product index must be >= -1")
    if k == -1:
        z0 = np.asarray(blaschke_factor(poles, 0, z))
        if np.any(np.abs(z0) < TAU_POLE):
            raise DivisionByZeroBlaschke("B_{-1} requested at a zero of zeta_0")
        out = 1.0 / z0
        return out if out.ndim else complex(out)
    out = np.ones_like(z)
    for j in range(1, k + 1):
        out = out * blaschke_factor(poles, j, z)
    return out if out.ndim else complex(out)


class KernelParams:
    """The distinguished point beta_0 anchoring the two circle kernels."""

    __slots__ = ("beta0",)

    def __init__(self, beta0):
        beta0 = complex(beta0)
        if abs(beta0) >= 1.0:
            raise DomainError("|beta_0| < 1 required")
        self.beta0 = beta0

    def zeta0(self, z):
        z = np.asarray(z, dtype=complex)
        den = 1.0 - np.conj(self.beta0) * z
        if np.any(np.abs(den) < _pole_tol(z)):
            raise PoleProximity("zeta_0 evaluated too close to its pole")
        eta0 = np.conj(self.beta0) / abs(self.beta0) if self.beta0 != 0 else 1.0
        return eta0 * (z - self.beta0) / den


def herglotz_kernel(kp: KernelParams, t, z) -> complex | np.ndarray:
    """Riesz-Herglotz kernel D(t, z) = (zeta_0(t) + zeta_0(z))/(zeta_0(t) - zeta_0(z)).

    Equals 1 at z = beta_0 for every admissible t.
    """
    zt = np.asarray(kp.zeta0(t))
    zz = np.asarray(kp.zeta0(z))
    den = zt - zz
    if np.any(np.abs(den) < 1e-12 * (np.abs(zt) + np.abs(zz) + 1.0)):
        raise KernelSingularity("Herglotz kernel evaluated with zeta_0(t) ~ zeta_0(z)")
    out = (zt + zz) / den
    return out if out.ndim else complex(out)


def poisson_kernel(kp: KernelParams, t, z) -> complex | np.ndarray:
    """Poisson kernel P(t, z) for t on the circle and z in the disk.

    Computed from the closed product form; the value is real and positive
    (any imaginary part is rounding noise). P(t, beta_n) is the weight P_n.
    """
    t = np.asarray(t, dtype=complex)
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(np.abs(t) - 1.0) > 1e-8):
        raise DomainError("Poisson kernel requires |t| = 1")
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("Poisson kernel requires |z| < 1")
    b0 = kp.beta0
    num = (1.0 - np.abs(z) ** 2) * (1.0 - np.conj(b0) * t) * (t - b0)
    den = (1.0 - abs(b0) ** 2) * (1.0 - np.conj(z) * t) * (t - z)
    out = num / den
    return out if out.ndim else complex(out)
