"""Power series: Gauss 2F1, Kummer M and the Frobenius solution of the radial ODE.

Everything here is written against plain Python arithmetic, so passing
``Fraction`` inputs gives exact rational coefficients and passing floats gives
floating-point ones.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Sequence, Tuple

BRANCHES = ("inverted", "mirror", "conjugate")


def _nonpos_int(a) -> int | None:
    """-a if a is a non-positive integer, else None."""
    try:
        if a == int(a) and a <= 0:
            return -int(a)
    except (TypeError, ValueError, OverflowError):
        pass
    return None


def hyp2f1_coefficients(a, b, c, n_terms: int, scale=1) -> List:
    """Coefficients of 2F1(a, b; c; scale * t) as a power series in t."""
    out = [a * 0 + 1]
    for j in range(n_terms - 1):
        out.append(out[-1] * (a + j) * (b + j) * scale / ((j + 1) * (c + j)))
    return out


def hyp2f1(a, b, c, z, max_terms: int = 100_000, rtol: float = 1e-17):
    """Gauss hypergeometric function by its defining series.

    Terminates exactly when a or b is a non-positive integer (any z);
    otherwise |z| < 1 is required.
    """
    if _nonpos_int(c) is not None:
        raise ValueError("c must not be a non-positive integer")
    deg = min(d for d in (_nonpos_int(a), _nonpos_int(b), max_terms) if d is not None)
    terminating = deg < max_terms
    if not terminating and abs(z) >= 1:
        raise ValueError("non-terminating 2F1 series needs |z| < 1")
    term = total = z * 0 + 1
    for j in range(deg if terminating else max_terms):
        term = term * (a + j) * (b + j) * z / ((j + 1) * (c + j))
        total = total + term
        if not terminating and abs(term) <= rtol * abs(total):
            break
    return total


def kummer_coefficients(a, c, n_terms: int, scale=1) -> List:
    """Coefficients of M(a, c, scale * t) as a power series in t."""
    out = [a * 0 + 1]
    for j in range(n_terms - 1):
        out.append(out[-1] * (a + j) * scale / ((j + 1) * (c + j)))
    return out


def kummer_m(a, c, z, max_terms: int = 100_000, rtol: float = 1e-17):
    """Confluent hypergeometric M(a, c, z); the series converges for every z.

    For large negative float z, Kummer's transformation avoids cancellation.
    """
    if _nonpos_int(c) is not None:
        raise ValueError("c must not be a non-positive integer")
    deg = _nonpos_int(a)
    if deg is None and isinstance(z, float) and z < -1.0:
        return math.exp(z) * kummer_m(c - a, c, -z, max_terms, rtol)
    term = total = z * 0 + 1
    for j in range(deg if deg is not None else max_terms):
        term = term * (a + j) * z / ((j + 1) * (c + j))
        total = total + term
        if deg is None and abs(term) <= rtol * abs(total) and j > abs(z):
            break
    return total


def radial_ode_coefficients(scaled_energy, mu: int, kappa, branch: str = "inverted") -> Tuple:
    """(A, D) in  r (1 - k r^2) f'' + (A r^2 + 2 mu + 1) f' + D r f = 0.

    ``f`` is the regular factor left after pulling r^mu (1 - k r^2)^s out of
    the radial wavefunction.  The two admissible exponents are

        inverted:   s = 1/2 - 1/(2k)   (A = 2(1 - k mu - 2k))
        conjugate:  s = 1/(2k)         (A = -2(1 + k mu + k))

    At k = 0 the exponential limits exp(+r^2/2) and exp(-r^2/2) are meant.
    The mirror branch has no ODE of its own and maps to ``inverted`` here.
    """
    E, k = scaled_energy, kappa
    if branch in ("inverted", "mirror"):
        return 2 * (1 - k * mu - 2 * k), 2 * E + 2 * mu + 2 - (mu + 1) * (mu + 2) * k
    if branch == "conjugate":
        return -2 * (1 + k * mu + k), 2 * E - 2 * (mu + 1) - k * mu * (mu + 1)
    raise ValueError(f"unknown branch {branch!r}; expected one of {BRANCHES}")


def frobenius_series(scaled_energy, mu: int, kappa, n_max: int, branch: str = "inverted") -> List:
    """Coefficients a_0..a_n_max of f(r) = sum a_n r^n with a_0 = 1, a_1 = 0.

    Two-step recursion obtained by substituting the series into the ODE of
    :func:`radial_ode_coefficients`:

        a_{n+1} = [k (n-1)(n-2) - A (n-1) - D] / ((n+1)(n+1+2 mu)) * a_{n-1}

    which for the inverted exponent reads
    [(n+mu)(n+mu+1) k - 2(E + mu + n)] / ((n+1)(n+1+2mu)).
    """
    if mu < 0:
        raise ValueError("mu must be a non-negative integer")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    A, D = radial_ode_coefficients(scaled_energy, mu, kappa, branch)
    one = scaled_energy * 0 + kappa * 0 + 1
    coeffs = [one, one * 0]
    for n in range(1, n_max):
        num = kappa * (n - 1) * (n - 2) - A * (n - 1) - D
        coeffs.append(num * coeffs[n - 1] / ((n + 1) * (n + 1 + 2 * mu)))
    return coeffs


def ode_residual_coefficients(coeffs: Sequence, scaled_energy, mu: int, kappa, branch: str = "inverted") -> List:
    """Substitute the truncated polynomial into the radial ODE by brute force.

    Returns the coefficients of r^0 .. r^(len-2) of the left-hand side; the
    top two are polluted by truncation and omitted.
    """
    A, D = radial_ode_coefficients(scaled_energy, mu, kappa, branch)
    n = len(coeffs)
    zero = coeffs[0] * 0
    out = [zero] * (n + 2)
    for j, c in enumerate(coeffs):
        if j >= 2:
            out[j - 1] += j * (j - 1) * c             # r f''
            out[j + 1] -= kappa * j * (j - 1) * c     # -k r^3 f''
        if j >= 1:
            out[j + 1] += A * j * c                   # A r^2 f'
            out[j - 1] += (2 * mu + 1) * j * c        # (2mu+1) f'
        out[j + 1] += D * c                           # D r f
    return out[: n - 1]


def ratio_sequence(coeffs: Sequence) -> List[float]:
    """|a_{n+2} / a_n| over the even coefficients."""
    evens = coeffs[::2]
    return [abs(float(evens[i + 1] / evens[i])) for i in range(len(evens) - 1) if evens[i] != 0]


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def series_eval(coeffs: Sequence[float], z: float) -> Tuple[float, float, float]:
    """(P, P', P'') at z for a power series given by its coefficients."""
    p = dp = d2p = 0.0
    for j in range(len(coeffs) - 1, -1, -1):
        d2p = d2p * z + 2 * dp
        dp = dp * z + p
        p = p * z + float(coeffs[j])
    return p, dp, d2p


__all__ = [
    "BRANCHES", "hyp2f1", "hyp2f1_coefficients", "kummer_m", "kummer_coefficients",
    "radial_ode_coefficients", "frobenius_series", "ode_residual_coefficients",
    "ratio_sequence", "series_eval", "is_exact",
]
