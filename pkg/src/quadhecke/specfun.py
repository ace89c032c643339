"""Dedekind zeta of Q(i) and companion special functions.

zeta_K(s) = zeta(s) L(s, chi_-4) with L(s, chi_-4) = 4^-s (zeta(s,1/4) -
zeta(s,3/4)); both factors come from one Euler-Maclaurin Hurwitz-zeta core
whose shift grows with |Im s|.  Around s = 1 the regular part
Z(s) = (s-1) zeta_K(s) is carried as a Taylor series obtained from Cauchy
integrals, so Z(1) = pi/4 and Z'(1) = gamma_K double as self-tests.

gamma_K = gamma pi/4 + L'(1, chi_-4), the L'-value summed as an accelerated
alternating series.  Euler products A(alpha, beta) and the diagonal
derivative A_alpha run over primary primes (conjugates separately) up to a
configurable norm cutoff with logarithmic tail corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import bernoulli as _bernoulli
from scipy.special import exp1 as _exp1
from scipy.special import loggamma as _loggamma

from . import zint
from ._numerics import alternating_sum

_EM_ORDER = 12  # Bernoulli pairs
_EM_SHIFT = 20
_POLE_GUARD = 1e-4
_B2J = _bernoulli(2 * _EM_ORDER)[2::2]  # B_2, B_4, ..., B_24
_C2J = _B2J / np.array([math.factorial(2 * j) for j in range(1, _EM_ORDER + 1)])

EULER_GAMMA = float(np.euler_gamma)


def hurwitz(s, a: float, deriv: bool = False):
    """Hurwitz zeta(s, a) for complex s (scalar or array), 0 < a <= 1.

    Euler-Maclaurin with shift max(20, 0.55 |Im s|); relative error around
    (|s| / 2 pi K)^24, i.e. ~1e-13 throughout the strips used here.
    Returns value or (value, d/ds value).
    """
    s = np.asarray(s, dtype=complex)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    K = int(max(_EM_SHIFT, math.ceil(0.55 * float(np.max(np.abs(s.imag))))))
    n = np.arange(K, dtype=float) + a
    ln = np.log(n)
    pw = np.exp(-np.multiply.outer(s, ln))
    head = pw.sum(axis=-1)
    Ka = K + a
    lK = math.log(Ka)
    em = np.exp(-s * lK)  # Ka^-s
    sm1 = s - 1.0
    val = head + em * Ka / sm1 + 0.5 * em
    if deriv:
        headd = -(pw * ln).sum(axis=-1)
        dval = headd + em * Ka * (-lK / sm1 - 1.0 / (sm1 * sm1)) - 0.5 * lK * em
    rise = s.copy()                      # (s)_1
    drise = np.ones_like(s)              # d/ds (s)_1
    tail = np.zeros_like(s)
    dtail = np.zeros_like(s)
    for j in range(1, _EM_ORDER + 1):
        if j > 1:
            f1 = s + (2 * j - 3)
            f2 = s + (2 * j - 2)
            drise = drise * f1 * f2 + rise * (f1 + f2)
            rise = rise * f1 * f2
        pw_j = np.exp(-(s + (2 * j - 1)) * lK)
        tail += _C2J[j - 1] * rise * pw_j
        if deriv:
            dtail += _C2J[j - 1] * (drise - rise * lK) * pw_j
    val = val + tail
    if deriv:
        dval = dval + dtail
        if scalar:
            return complex(val[0]), complex(dval[0])
        return val, dval
    return complex(val[0]) if scalar else val


def _l4(s, deriv: bool = False):
    if deriv:
        za, dza = hurwitz(s, 0.25, True)
        zb, dzb = hurwitz(s, 0.75, True)
        f = np.exp(-s * math.log(4.0))
        val = f * (za - zb)
        return val, -math.log(4.0) * val + f * (dza - dzb)
    return np.exp(-s * math.log(4.0)) * (hurwitz(s, 0.25) - hurwitz(s, 0.75))


def zeta_K(s):
    """Dedekind zeta of Q(i); scalar or array, Re(s) > -1/2, away from s=1."""
    arr = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(np.abs(arr - 1.0) < _POLE_GUARD):
        raise ValueError("zeta_K within pole guard of s = 1")
    if np.any(arr.real < -0.5):
        raise ValueError("zeta_K outside implemented strip Re(s) > -1/2")
    out = hurwitz(s, 1.0) * _l4(s)
    return out


def zeta_K_log_deriv(s):
    """zeta_K'/zeta_K(s) = zeta'/zeta(s) + L'/L(s, chi_-4)."""
    arr = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(np.abs(arr - 1.0) < _POLE_GUARD):
        raise ValueError("zeta_K_log_deriv within pole guard of s = 1")
    z, dz = hurwitz(s, 1.0, True)
    l4, dl4 = _l4(s, True)
    return dz / z + dl4 / l4


def zeta_K_with_log_deriv(s):
    """(zeta_K(s), zeta_K'/zeta_K(s)) sharing one Euler-Maclaurin pass."""
    z, dz = hurwitz(s, 1.0, True)
    l4, dl4 = _l4(s, True)
    return z * l4, dz / z + dl4 / l4


def _l4_deriv_at_1() -> tuple[float, float]:
    """(L(1,chi_-4), L'(1,chi_-4)) with the Hurwitz pole pair cancelled.

    The two (K+a)^{1-s}/(s-1) terms are combined before the limit:
    f(1) = log(B/A), f'(1) = (log^2 A - log^2 B)/2 for A=K+1/4, B=K+3/4.
    """
    K = 60
    d = 0.0
    dd = 0.0
    for a in (0.25, 0.75):
        sg = 1.0 if a == 0.25 else -1.0
        n = np.arange(K) + a
        d += sg * float(np.sum(1.0 / n))
        dd += sg * float(np.sum(-np.log(n) / n))
        Ka = K + a
        lK = math.log(Ka)
        d += sg * 0.5 / Ka
        dd += sg * (-0.5 * lK / Ka)
        rise = 1.0
        drise = 1.0
        for j in range(1, _EM_ORDER + 1):
            if j == 1:
                rise, drise = 1.0, 1.0  # (s)_1 = s -> 1 at s=1; d/ds = 1
            else:
                f1 = 1.0 + (2 * j - 3)
                f2 = 1.0 + (2 * j - 2)
                drise = drise * f1 * f2 + rise * (f1 + f2)
                rise = rise * f1 * f2
            pw = Ka ** (-(2.0 * j))
            d += sg * _C2J[j - 1] * rise * pw
            dd += sg * _C2J[j - 1] * (drise - rise * lK) * pw
    A, B = K + 0.25, K + 0.75
    d += math.log(B / A)
    dd += (math.log(A) ** 2 - math.log(B) ** 2) / 2.0
    l41 = 0.25 * d
    dl41 = -math.log(4.0) * l41 + 0.25 * dd
    return l41, dl41


def _l4_deriv_at_1_series(n: int = 40) -> float:
    """L'(1, chi_-4) by the accelerated alternating series."""
    return -alternating_sum(lambda k: math.log(2 * k + 1) / (2 * k + 1), n)


def gamma_K(n: int = 40) -> float:
    """Constant term of zeta_K at s=1: gamma pi/4 + L'(1, chi_-4)."""
    return EULER_GAMMA * math.pi / 4.0 + _l4_deriv_at_1_series(n)


def digamma(s):
    """psi(s), complex scalar or array; recurrence into Re >= 12 plus the
    Bernoulli asymptotic series."""
    arr = np.atleast_1d(np.asarray(s, dtype=complex)).copy()
    if np.any((arr.real <= 0) & (np.abs(arr - np.round(arr.real)) < 1e-12)):
        raise ValueError("digamma pole")
    scalar = np.asarray(s).ndim == 0
    acc = np.zeros_like(arr)
    shifts = int(max(0, 12.0 - float(np.min(arr.real)))) + 1
    for _ in range(shifts):
        mask = arr.real < 12.0
        if not mask.any():
            break
        acc[mask] -= 1.0 / arr[mask]
        arr[mask] += 1.0
    inv2 = 1.0 / (arr * arr)
    out = np.log(arr) - 0.5 / arr
    pw = inv2.copy()
    for nn in range(1, 8):
        out -= _B2J[nn - 1] / (2 * nn) * pw
        pw = pw * inv2
    out = out + acc
    return complex(out[0]) if scalar else out


def X_c(s, norm_c: int):
    """Gamma(1-s)/Gamma(s) (pi^2/(32 N(c)))^(s-1/2)."""
    s = np.asarray(s, dtype=complex)
    lam = math.log(math.pi ** 2 / (32.0 * norm_c))
    out = np.exp(_loggamma(1.0 - s) - _loggamma(s) + (s - 0.5) * lam)
    return complex(out) if out.ndim == 0 else out


# --- Euler products -------------------------------------------------------------

def _a_factors_log(alpha, beta, norms: np.ndarray):
    la = np.log(norms.astype(float))
    ni = 1.0 / (norms + 1.0)
    x = np.exp(-(1.0 + alpha + beta) * la)
    u = np.exp(-(1.0 + 2.0 * alpha) * la) * ni
    v = np.exp(-(alpha + beta) * la) * ni
    return -np.log(1.0 - x) + np.log(1.0 - u - v)


def A_euler_with_error(alpha: complex, beta: complex,
                       ctx: "ZetaKContext | None" = None) -> tuple[complex, float]:
    """A(alpha, beta): prefactor times product over primary primes, truncated
    at euler_cutoff with an exponential-integral tail added; returns
    (value, tail-size error estimate)."""
    ctx = ctx or default_context()
    if np.real(alpha) <= -0.25 + 1e-9 or np.real(beta) <= -0.25 + 1e-9:
        raise ValueError("A_euler needs Re(alpha), Re(beta) > -1/4")
    B = ctx.euler_cutoff
    norms = zint.prime_norms_up_to(B)
    logs = _a_factors_log(alpha, beta, norms)
    lb = math.log(B)
    e1a = _exp1((1.0 + alpha + beta) * lb)
    e1b = _exp1((1.0 + 2.0 * alpha) * lb)
    two = 2.0 ** (1.0 + alpha + beta)
    pref = (two - 2.0 ** (beta - alpha)) / (two - 1.0)
    val = pref * np.exp(np.sum(logs) + e1a - e1b)
    err = float(abs(val)) * (0.5 * (abs(e1a) + abs(e1b)) + 1e-14)
    return complex(val), err


def A_euler(alpha: complex, beta: complex, ctx: "ZetaKContext | None" = None) -> complex:
    return A_euler_with_error(alpha, beta, ctx)[0]


def A_closed_mr(r, ctx: "ZetaKContext | None" = None):
    """Closed form A(-r, r) = 3(2-2^{2r})/(4-2^{2r}) zeta_K(2)/zeta_K(2-2r)."""
    ctx = ctx or default_context()
    r = np.asarray(r, dtype=complex)
    num = 3.0 * (2.0 - 2.0 ** (2.0 * r)) / (4.0 - 2.0 ** (2.0 * r))
    out = num * ctx.zetaK2 / zeta_K(2.0 - 2.0 * r)
    return complex(out) if out.ndim == 0 else out


def A_alpha_series(r, ctx: "ZetaKContext | None" = None):
    """A_alpha(r, r) = log2/(2^{1+2r}-1) + sum logN/((N+1)(N^{1+2r}-1)),
    truncated with integral tail; needs Re(r) > -1/2."""
    ctx = ctx or default_context()
    r = complex(r)
    B = ctx.euler_cutoff
    norms = zint.prime_norms_up_to(B).astype(float)
    la = np.log(norms)
    terms = la / ((norms + 1.0) * (np.exp((1.0 + 2.0 * r) * la) - 1.0))
    tail = B ** (-1.0 - 2.0 * r) / (1.0 + 2.0 * r)
    return math.log(2.0) / (2.0 ** (1.0 + 2.0 * r) - 1.0) + complex(np.sum(terms)) + tail


def A_alpha_diag(r, ctx: "ZetaKContext | None" = None, check: bool = True) -> complex:
    """d/d alpha A(alpha, beta) at alpha = beta = r, two ways.

    (a) complex-step (real r) or central difference of A_euler in alpha;
    (b) the prime-sum identity through zeta_K'/zeta_K(1+2r).
    Disagreement beyond 10x the tail estimates raises.
    """
    ctx = ctx or default_context()
    r = complex(r)
    series = A_alpha_series(r, ctx)
    if check:
        if r.imag == 0.0:
            h = 1e-20
            d = A_euler(r + 1j * h, r, ctx).imag / h
        else:
            h = 1e-5
            d = (A_euler(r + h, r, ctx) - A_euler(r - h, r, ctx)) / (2 * h)
        if abs(d - series) > 1e-4:
            raise ArithmeticError(
                f"A_alpha methods disagree at r={r}: {d} vs {series}")
    return complex(series)


_PP_CUT = 1000
_AIT_CUT = 10 ** 4


def odd_prime_power_sum(w):
    """PS(w) = sum over odd primary primes of log N * N^-w, Re w >= 2.

    Extracted from -zeta_K'/zeta_K(w) by removing the (1+i) column and the
    k >= 2 prime powers (the latter summed directly to N <= 1000; the
    leftover tail is ~ (Re w - fixed) 3e-10 at Re w = 2).
    """
    w = np.asarray(w, dtype=complex)
    lam = -zeta_K_log_deriv(w)
    lam = lam - math.log(2.0) / (np.exp(w * math.log(2.0)) - 1.0)
    norms = zint.prime_norms_up_to(_PP_CUT).astype(float)
    la = np.log(norms)
    nw = np.exp(-np.multiply.outer(w, la))  # N^-w
    pp = (la * nw * nw / (1.0 - nw)).sum(axis=-1)
    return lam - pp


def A_alpha_diag_it(t, ctx: "ZetaKContext | None" = None):
    """A_alpha(it, it) vectorized along real t for oscillatory integrals.

    Series summed directly to N <= 1e4; the remaining tail's leading part
    sum log N * N^(-2-2it) is restored exactly through odd_prime_power_sum,
    leaving ~1e-8 absolute error. Chunks internally to cap the outer
    products.
    """
    ctx = ctx or default_context()
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    norms = zint.prime_norms_up_to(_AIT_CUT).astype(float)
    la = np.log(norms)
    out = np.empty(t.shape, dtype=complex)
    for i0 in range(0, t.size, 256):
        tc = t[i0:i0 + 256]
        z = 1.0 + 2j * tc
        nz = np.exp(-np.multiply.outer(z, la))         # N^-z
        direct = (la / (norms + 1.0) * nz / (1.0 - nz)).sum(axis=-1)
        head = (la * nz / norms).sum(axis=-1)          # sum_{N<=cut} logN N^-z-1
        out[i0:i0 + 256] = (math.log(2.0) / (np.exp(z * math.log(2.0)) - 1.0)
                            + direct + odd_prime_power_sum(z + 1.0) - head)
    return complex(out[0]) if scalar else out


# --- context ---------------------------------------------------------------------

@dataclass
class ZetaKContext:
    """Immutable bundle of cached constants and the Z(s) Taylor series at 1."""

    precision: float = 1e-10
    euler_cutoff: int = 10 ** 6
    gamma: float = field(init=False)
    gamma_K: float = field(init=False)
    zetaK2: float = field(init=False)
    zetaK_logderiv_2: float = field(init=False)
    zetaK0: float = field(init=False)
    zetaK0_prime: float = field(init=False)
    residue: float = field(init=False)
    z_taylor: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.gamma = EULER_GAMMA
        self.gamma_K = gamma_K()
        self.zetaK2 = float(np.real(zeta_K(2.0)))
        self.zetaK_logderiv_2 = float(np.real(zeta_K_log_deriv(2.0)))
        z, dz = hurwitz(0.0, 1.0, True)
        l4, dl4 = _l4(0.0, True)
        self.zetaK0 = float(np.real(z * l4))
        self.zetaK0_prime = float(np.real(dz * l4 + z * dl4))
        s = 1.0 + 1e-6
        self.residue = float(np.real((s - 1.0) * hurwitz(s, 1.0) * _l4(s)))
        self.z_taylor = _z_taylor_coeffs()
        self._check()

    def _check(self):
        if abs(self.zetaK0 + 0.25) > 1e-8:
            raise ArithmeticError(f"zeta_K(0) = {self.zetaK0}, expected -1/4")
        if abs(self.residue - math.pi / 4.0) > 1e-5:
            raise ArithmeticError(f"residue {self.residue} != pi/4")
        lhs = -self.zetaK0_prime
        rhs = -self.gamma_K / math.pi + self.gamma / 2.0 + math.log(math.pi) / 2.0
        if abs(lhs - rhs) > 1e-6:
            raise ArithmeticError(f"zeta_K'(0) loop failed: {lhs} vs {rhs}")
        if abs(self.z_taylor[0] - math.pi / 4.0) > 1e-10:
            raise ArithmeticError("Z(1) != pi/4")
        if abs(self.z_taylor[1] - self.gamma_K) > 1e-8:
            raise ArithmeticError("Z'(1) != gamma_K")

    # Z(s) = (s-1) zeta_K(s) near s = 1
    def Z(self, s):
        d = np.asarray(s, dtype=complex) - 1.0
        out = np.zeros_like(d)
        for c in self.z_taylor[::-1]:
            out = out * d + c
        return out

    def Z_log_deriv(self, s):
        """H(s) = Z'/Z = zeta_K'/zeta_K(s) + 1/(s-1); Taylor branch |s-1|<=0.35."""
        d = np.asarray(s, dtype=complex) - 1.0
        if np.any(np.abs(d) > 0.35):
            raise ValueError("Z_log_deriv Taylor branch needs |s-1| <= 0.35")
        num = np.zeros_like(d)
        den = np.zeros_like(d)
        cs = self.z_taylor
        for k in range(len(cs) - 1, 0, -1):
            num = num * d + k * cs[k]
        for c in cs[::-1]:
            den = den * d + c
        return num / den


def _z_taylor_coeffs(nterms: int = 30, radius: float = 0.8, nodes: int = 128) -> np.ndarray:
    th = 2.0 * np.pi * np.arange(nodes) / nodes
    ring = radius * np.exp(1j * th)
    s = 1.0 + ring
    vals = ring * hurwitz(s, 1.0) * _l4(s)
    coeffs = np.fft.fft(vals) / nodes
    k = np.arange(nterms)
    return np.real(coeffs[:nterms]) / radius ** k


_DEFAULT: ZetaKContext | None = None


def default_context() -> ZetaKContext:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = ZetaKContext()
    return _DEFAULT


def constants_dict(ctx: ZetaKContext | None = None) -> dict[str, float]:
    ctx = ctx or default_context()
    return {
        "gamma": ctx.gamma,
        "gamma_K": ctx.gamma_K,
        "zetaK2": ctx.zetaK2,
        "zetaK_logderiv_2": ctx.zetaK_logderiv_2,
        "zetaK0": ctx.zetaK0,
        "zetaK0_prime": ctx.zetaK0_prime,
        "residue": ctx.residue,
    }
