"""Descending powers of log X: kernel lattice sums and expansion coefficients.

The odd prime sum, after Poisson summation and Moebius inversion, reduces to
a tau-integral J(X) over two kernels built from the weight transforms,

  h1(x) = pref * sum_l mu(l)/N(l) (g1(2 N(l) x) - g1(N(l) x)),
  h2(x) = pref * sum_l mu(l)/N(l)^2 (g(x/(2N(l)))/2 - g(x/N(l))),

with pref = 3 zeta_K(2) / (pi w_hat(0)) and l running over primary squarefree
elements.  g1's hard cutoff makes h1 an exact finite sum vanishing for
x > 112; h2 converges absolutely and its tail past a norm cutoff T is the
constant -g(0)/2 times the Moebius tail, restored here in closed form via
Phi(inf) - Phi(T), so the only error left is the g-variation term O(x/T^2).

Full lattice sums over Z[i] are then

  H1(y) = sum_n r(n) h1(n y),
  H2(y) = 1 + (pref/y) sum_n r(n) (R(2n/y) - R(n/y)),

the second obtained by swapping the two lattice sums through the radial
Poisson identity sum_k g(N(k) z) = (1/z) sum_j g1(N(j)/z); here
R(v) = sum_l mu(l)/N(l) g1(v N(l)) is univariate and tabulated once.
H2(y) decays like y^(-3/2), so the tau-integrals are cut at y_cap with a
fitted-envelope tail estimate reported as error.

The even prime sum expands into coefficients d_m built from four pieces:
prime powers j >= 2, the alternating-geometric constants C1, the boundary
value E(1) = -1 of E(t) = sum_{N <= t} log N - t, and the moments
M_E(n) = int_1^inf E(t) log^n(t) t^(-2) dt.  M_E comes two ways: exact
sieve integration below a cutoff with a zero-mean tail model bounded by the
measured |E|/sqrt(t) envelope, or analytically from
int_1^inf E(t) t^(-s-1) dt = -(1/s)(1 + Z'/Z(s) + log2/(2^s-1) + PP(s))
differentiated at s = 1, where PP collects prime powers k >= 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaincc, gammaln

from . import zint
from ._numerics import CubicTable, cauchy_derivs, panel_nodes
from .specfun import EULER_GAMMA, ZetaKContext, default_context, hurwitz
from .transforms import (TestFunction, WeightFunction, make_gaussian_weight)

_G1_CUT = 112.0          # g1(y) below 1e-13 beyond this
_LOG_32_PI2 = math.log(32.0 / math.pi ** 2)
_PSI_HALF = -EULER_GAMMA - 2.0 * math.log(2.0)


def prefactor(weight: WeightFunction, ctx: ZetaKContext | None = None) -> float:
    ctx = ctx or default_context()
    return 3.0 * ctx.zetaK2 / (math.pi * weight.w_hat0)


@lru_cache(maxsize=8)
def _sf_arrays(bound: int):
    re, im, norm, mu = zint.primary_squarefree_arrays(bound, with_mu=True)
    keep = mu != 0
    return norm[keep].astype(float), mu[keep].astype(float)


def phi_sf_partial(bound: int) -> float:
    """Phi(bound) = sum over primary squarefree N(l) <= bound of mu(l)/N(l)^2."""
    norm, mu = _sf_arrays(bound)
    return float(np.sum(mu / norm ** 2))


def phi_sf_limit(ctx: ZetaKContext | None = None) -> float:
    ctx = ctx or default_context()
    return 4.0 / (3.0 * ctx.zetaK2)


# --- kernels ----------------------------------------------------------------------

def h1(x: float, weight: WeightFunction | None = None,
       ctx: ZetaKContext | None = None) -> float:
    """Exact finite sum; vanishes for x > 112 by the g1 cutoff."""
    if x <= 0.0:
        raise ValueError("h1 needs x > 0")
    w = weight or make_gaussian_weight()
    if x > _G1_CUT:
        return 0.0
    bound = int(_G1_CUT / x) + 1
    norm, mu = _sf_arrays(bound)
    keep = norm * x <= _G1_CUT
    n, m = norm[keep], mu[keep]
    val = float(np.dot(m / n, w.g1(2.0 * n * x) - w.g1(n * x)))
    return prefactor(w, ctx) * val


def h2_with_error(x: float, l_max: int = 10 ** 4,
                  weight: WeightFunction | None = None,
                  ctx: ZetaKContext | None = None) -> tuple[float, float]:
    """h2 by truncation at N(l) <= l_max plus the closed Moebius-tail constant.

    Past the cutoff the bracket is -g(0)/2 + O(x/N), so the constant part is
    restored exactly through Phi(inf) - Phi(l_max) and only the variation
    remains; its size is returned as the error estimate.
    """
    if x < 0.0:
        raise ValueError("h2 needs x >= 0")
    w = weight or make_gaussian_weight()
    ctx = ctx or default_context()
    norm, mu = _sf_arrays(l_max)
    g0 = float(w.g(0.0))
    br = 0.5 * w.g(x / (2.0 * norm)) - w.g(x / norm)
    head = float(np.dot(mu / norm ** 2, br))
    tail_const = -0.5 * g0 * (phi_sf_limit(ctx) - phi_sf_partial(l_max))
    # |g(u) - g(0)| <= max|g'| u with max|g'| about 3.2 for the gaussian chain
    err = 0.3 * 3.2 * 1.5 * x / (4.0 * l_max ** 2) + 1e-12
    return prefactor(w, ctx) * (head + tail_const), prefactor(w, ctx) * err


def h2(x: float, l_max: int = 10 ** 4, weight: WeightFunction | None = None,
       ctx: ZetaKContext | None = None) -> float:
    return h2_with_error(x, l_max, weight, ctx)[0]


# --- full lattice sums ------------------------------------------------------------

class _KernelTables:
    """Per-weight caches: the R(v) table and lattice norm counts."""

    def __init__(self, weight: WeightFunction, ctx: ZetaKContext,
                 y_cap: float = 3000.0):
        self.weight = weight
        self.ctx = ctx
        self.y_cap = y_cap
        self.pref = prefactor(weight, ctx)
        v_min = 1.0 / y_cap
        bound = int(_G1_CUT / v_min) + 1
        norm, mu = _sf_arrays(bound)
        self._norm, self._wmu = norm, mu / norm

        def r_of(v: np.ndarray) -> np.ndarray:
            out = np.empty_like(v)
            for i, vi in enumerate(v):
                keep = norm * vi <= _G1_CUT
                out[i] = np.dot(self._wmu[keep], weight.g1(norm[keep] * vi))
            return out

        n_nodes = int(math.log(_G1_CUT / v_min) / 0.008) + 8
        self.r_table = CubicTable.build(r_of, v_min, _G1_CUT, n_nodes,
                                        log_x=True, fill=0.0)
        self.counts = zint.lattice_norm_counts(int(_G1_CUT * y_cap) + 2).astype(float)

    def r_direct(self, v: float) -> float:
        keep = self._norm * v <= _G1_CUT
        return float(np.dot(self._wmu[keep], self.weight.g1(self._norm[keep] * v)))

    def H1(self, y: float) -> float:
        if y <= 0.0:
            raise ValueError("H1 needs y > 0")
        if y > _G1_CUT:
            return 0.0
        total = 0.0
        for n in range(1, int(_G1_CUT / y) + 1):
            c = self.counts[n]
            if c:
                total += c * h1(n * y, self.weight, self.ctx)
        return total

    def H2(self, y: float) -> float:
        if not 1.0 <= y <= self.y_cap * (1.0 + 1e-12):
            raise ValueError("H2 tabulated for 1 <= y <= y_cap")
        nmax = int(_G1_CUT * y)
        ns = np.arange(1, nmax + 1, dtype=float)
        v = ns / y
        terms = self.r_table(2.0 * v) - self.r_table(v)
        return 1.0 + self.pref / y * float(np.dot(self.counts[1:nmax + 1], terms))


_kernel_cache: dict[tuple[int, float], _KernelTables] = {}


def kernel_tables(weight: WeightFunction | None = None,
                  ctx: ZetaKContext | None = None,
                  y_cap: float = 3000.0) -> _KernelTables:
    w = weight or make_gaussian_weight()
    ctx = ctx or default_context()
    key = (id(w), y_cap)
    if key not in _kernel_cache:
        _kernel_cache[key] = _KernelTables(w, ctx, y_cap)
    return _kernel_cache[key]


# --- the tau-integral and its expansion ---------------------------------------------

def _h2_envelope(tab: _KernelTables) -> float:
    """Fitted constant C with |H2(y)| <= C y^(-3/2) near the cap."""
    ys = np.geomspace(tab.y_cap / 8.0, tab.y_cap, 12)
    return max(abs(tab.H2(float(y))) * float(y) ** 1.5 for y in ys)


def J_X(X: float, test: TestFunction, weight: WeightFunction | None = None,
        ctx: ZetaKContext | None = None, y_cap: float = 3000.0) -> tuple[float, float]:
    """Numeric J(X): value and an error estimate from the y_cap tail."""
    if X <= math.e:
        raise ValueError("J_X needs X > e")
    w = weight or make_gaussian_weight()
    ctx = ctx or default_context()
    tab = kernel_tables(w, ctx, y_cap)
    L = math.log(X)
    sigma = test.sigma
    total = 0.0
    # branch 1: phi_hat(1 + tau/L), support tau < (sigma-1) L and y <= 112
    top1 = min(max(sigma - 1.0, 0.0) * L, 2.0 * math.log(_G1_CUT))
    if top1 > 0.0:
        t1, q1 = panel_nodes(0.0, top1, 0.25, 12)
        f1 = np.array([tab.H1(math.exp(0.5 * t)) for t in t1])
        total += float(np.dot(q1, test.phi_hat(1.0 + t1 / L)
                              * np.exp(0.5 * t1) * f1))
    # branch 2: phi_hat(1 - tau/L), cut at y_cap
    top2 = min((1.0 + sigma) * L, 2.0 * math.log(y_cap))
    t2, q2 = panel_nodes(0.0, top2, 0.25, 12)
    f2 = np.array([tab.H2(math.exp(0.5 * t)) for t in t2])
    total += float(np.dot(q2, test.phi_hat(1.0 - t2 / L) * f2))
    c_env = _h2_envelope(tab)
    tail = c_env * (4.0 / 3.0) * math.exp(-0.75 * top2)
    err = (tail + 3e-6) / L
    return total / L, err


def c_w_coefficients(M: int, weight: WeightFunction | None = None,
                     ctx: ZetaKContext | None = None,
                     y_cap: float = 3000.0) -> list[tuple[float, float]]:
    """Tau-moment integrals of the two kernel lattice sums, orders 1..M."""
    if not 1 <= M <= 8:
        raise ValueError("order must be in 1..8")
    w = weight or make_gaussian_weight()
    ctx = ctx or default_context()
    tab = kernel_tables(w, ctx, y_cap)
    top1 = 2.0 * math.log(_G1_CUT)
    t1, q1 = panel_nodes(0.0, top1, 0.25, 12)
    f1 = np.array([tab.H1(math.exp(0.5 * t)) for t in t1])
    top2 = 2.0 * math.log(y_cap)
    t2, q2 = panel_nodes(0.0, top2, 0.25, 12)
    f2 = np.array([tab.H2(math.exp(0.5 * t)) for t in t2])
    c_env = _h2_envelope(tab)
    out = []
    for m in range(1, M + 1):
        fact = math.gamma(m)
        i1 = float(np.dot(q1, t1 ** (m - 1) * np.exp(0.5 * t1) * f1))
        i2 = float(np.dot(q2, (-t2) ** (m - 1) * f2))
        # tail of int tau^(m-1) C e^(-3 tau/4): (4/3)^m Gamma(m) Q(m, 3 top2/4)
        tail = c_env * (4.0 / 3.0) ** m * fact * float(gammaincc(m, 0.75 * top2))
        out.append(((i1 + i2) / fact, (tail + 3e-6) / fact))
    return out


def c_w1_closed(weight: WeightFunction | None = None,
                ctx: ZetaKContext | None = None) -> float:
    """First-order constant in closed form."""
    w = weight or make_gaussian_weight()
    ctx = ctx or default_context()
    return (2.0 * EULER_GAMMA + math.log(math.pi ** 2 / 2.0 ** (7.0 / 3.0))
            + 2.0 * ctx.zetaK_logderiv_2 - 8.0 / math.pi * ctx.gamma_K
            - w.mw_prime_1 / w.Mw(1.0).real)


def J_first_order(X: float, test: TestFunction,
                  weight: WeightFunction | None = None,
                  ctx: ZetaKContext | None = None) -> float:
    if X <= math.e:
        raise ValueError("X > e required")
    return float(test.phi_hat(1.0)) * c_w1_closed(weight, ctx) / math.log(X)


# --- even-sum coefficients d_m ------------------------------------------------------

def _prime_norm_logs(cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    norms = zint.prime_norms_up_to(cutoff).astype(float)
    return norms, np.log(norms)


def t_a_sum(n: int, cutoff: int = 10 ** 6) -> tuple[float, float]:
    """sum over primary varpi, j >= 2 of logN (2j logN)^n N^-j / (1 + 1/N)."""
    norms, ln = _prime_norm_logs(cutoff)
    total = 0.0
    j = 2
    while True:
        terms = ln * (2.0 * j * ln) ** n * norms ** (-float(j)) / (1.0 + 1.0 / norms)
        s = float(np.sum(terms))
        total += s
        if s < 1e-18 * max(1.0, total) and j > 4:
            break
        j += 1
    lb = math.log(cutoff)
    tail = 4.0 ** n * math.exp(gammaln(n + 1)) * float(gammaincc(n + 1, lb))
    return total, tail


def c1_sum(n: int, cutoff: int = 10 ** 6) -> tuple[float, float]:
    """C1(n) = -sum over varpi of (2 logN)^(n+1) / (N (N+1))."""
    norms, ln = _prime_norm_logs(cutoff)
    total = -float(np.sum((2.0 * ln) ** (n + 1) / (norms * (norms + 1.0))))
    lb = math.log(cutoff)
    tail = 2.0 ** (n + 1) * math.exp(gammaln(n + 2)) * float(gammaincc(n + 2, lb))
    return total, tail


def m_e_moment_sieve(n: int, cutoff: int = 10 ** 6) -> tuple[float, float]:
    """int_1^cutoff E(t) log^n(t) t^-2 dt exactly from the sieve, zero tail model.

    The reported error bounds the dropped tail by the measured |E|/sqrt(t)
    envelope times int_cutoff^inf t^(-3/2) log^n t dt.
    """
    norms, ln = _prime_norm_logs(cutoff)
    ts = np.concatenate(([1.0], norms, [float(cutoff)]))
    cum = np.concatenate(([0.0], np.cumsum(ln)))   # sum logN on [t_k, t_{k+1})

    def anti_a(t: np.ndarray) -> np.ndarray:
        # int log^n t / t^2 dt = -(1/t) sum_{i<=n} (n!/i!) log^i t
        lt = np.log(t)
        s = np.zeros_like(t)
        for i in range(n, -1, -1):
            coef = math.factorial(n) / math.factorial(i)
            s += coef * lt ** i
        return -s / t

    def anti_b(t: np.ndarray) -> np.ndarray:
        return np.log(t) ** (n + 1) / (n + 1)

    da = anti_a(ts[1:]) - anti_a(ts[:-1])
    db = anti_b(ts[1:]) - anti_b(ts[:-1])
    val = float(np.dot(cum, da) - np.sum(db))
    sqs = np.sqrt(norms)
    resid = np.abs(np.cumsum(ln) - norms) / sqs
    lo = np.searchsorted(norms, cutoff ** 0.6)
    env = float(np.max(resid[lo:])) if lo < norms.size else 3.0
    lb = 0.5 * math.log(cutoff)
    tail = env * 2.0 ** (n + 1) * math.exp(gammaln(n + 1)) * float(gammaincc(n + 1, lb))
    return val, tail


def m_e_moment_analytic(max_n: int, cutoff: int = 10 ** 6,
                        ctx: ZetaKContext | None = None) -> list[float]:
    """M_E(0..max_n) from the analytic continuation, differentiated at s = 1."""
    ctx = ctx or default_context()
    norms, ln = _prime_norm_logs(cutoff)
    b = float(cutoff)

    def F(s: np.ndarray) -> np.ndarray:
        out = np.empty_like(s, dtype=complex)
        for i, si in enumerate(s):
            nz = np.exp(-si * ln)
            pp = np.dot(ln, nz * nz / (1.0 - nz))
            pp += b ** (1.0 - 2.0 * si) / (2.0 * si - 1.0)
            out[i] = -(1.0 + ctx.Z_log_deriv(si) + math.log(2.0)
                       / (2.0 ** si - 1.0) + pp) / si
        return out

    ders = cauchy_derivs(F, 1.0, 0.3, max_n)
    return [((-1.0) ** k * ders[k]).real for k in range(max_n + 1)]


def d_coefficients(M: int, cutoff: int = 10 ** 6, route: str = "analytic",
                   ctx: ZetaKContext | None = None) -> list[tuple[float, float]]:
    """d_1..d_M with per-entry error estimates.

    route "analytic" differentiates the continued E-integral (tight errors);
    route "sieve" integrates sieve data with a zero-mean tail model and
    GRH-envelope error bars.
    """
    if not 1 <= M <= 6:
        raise ValueError("order must be in 1..6")
    ctx = ctx or default_context()
    if route == "analytic":
        me = m_e_moment_analytic(M - 1, cutoff, ctx)
        me_err = [3e-6 * math.factorial(k) / 0.3 ** k for k in range(M)]
    elif route == "sieve":
        pairs = [m_e_moment_sieve(k, cutoff) for k in range(M)]
        me = [p[0] for p in pairs]
        me_err = [p[1] for p in pairs]
    else:
        raise ValueError(f"unknown route {route!r}")
    out = []
    for m in range(1, M + 1):
        fct = math.factorial(m - 1)
        ta, ta_err = t_a_sum(m - 1, cutoff)
        c1, c1_err = c1_sum(m - 1, cutoff)
        val = -2.0 * ta / fct - c1 / fct - 2.0 ** m * me[m - 1] / fct
        err = 2.0 * ta_err / fct + c1_err / fct + 2.0 ** m * me_err[m - 1] / fct
        if m == 1:
            val -= 2.0
        if m >= 2:
            f2 = math.factorial(m - 2)
            val += 2.0 ** m * me[m - 2] / f2
            err += 2.0 ** m * me_err[m - 2] / f2
        out.append((val, err))
    return out


# --- assembly ---------------------------------------------------------------------

def digamma_moment(m: int, refine: int = 1) -> float:
    """int_0^inf e^(-x/2) x^(m-1) / (1 - e^(-x)) dx, m >= 2, by quadrature."""
    if m < 2:
        raise ValueError("moment diverges for m < 2")
    top = 80.0 + 10.0 * m
    x, q = panel_nodes(1e-12, top, 0.5 / refine, 12)
    kern = np.exp(-0.5 * x) / (-np.expm1(-x))
    return float(np.dot(q, kern * x ** (m - 1)))


def digamma_moment_closed(m: int) -> float:
    """Gamma(m) (2^m - 1) zeta(m), the sum over exponents (k + 1/2)^-m."""
    z = float(hurwitz(np.array([float(m)], dtype=complex), 1.0)[0].real)
    return math.gamma(m) * (2.0 ** m - 1.0) * z


def phi_hat_half_integral(test: TestFunction) -> float:
    """int_0^1 phi_hat(u) du = half of the symmetric unit-window integral."""
    if test.kind == "fejer":
        s = test.sigma
        return 1.0 - 0.5 / s if s >= 1.0 else 0.5 * s
    top = min(1.0, test.sigma)
    u, q = panel_nodes(0.0, top, top / 16.0, 12)
    return float(np.dot(q, test.phi_hat(u)))


@dataclass
class ExpansionCoefficients:
    M: int
    d: list[float]
    d_err: list[float]
    c_w: list[float]
    c_w_err: list[float]
    R_w: list[float]

    def as_rows(self) -> list[dict]:
        return [{"m": m + 1, "d_m": self.d[m], "c_wm": self.c_w[m],
                 "R_wm": self.R_w[m],
                 "error_m": self.d_err[m] + self.c_w_err[m]}
                for m in range(self.M)]


def expansion_coefficients(M: int, test: TestFunction,
                           weight: WeightFunction | None = None,
                           ctx: ZetaKContext | None = None,
                           cutoff: int = 10 ** 6, route: str = "analytic",
                           y_cap: float = 3000.0) -> ExpansionCoefficients:
    w = weight or make_gaussian_weight()
    ctx = ctx or default_context()
    ds = d_coefficients(M, cutoff, route, ctx)
    cs = c_w_coefficients(M, w, ctx, y_cap)
    log_moment_term = 2.0 * w.mw_prime_1 / w.w_hat0
    r_w = []
    for m in range(1, M + 1):
        p0 = float(test.phi_hat_deriv0(m - 1))
        p1 = float(test.phi_hat_deriv1(m - 1))
        if m == 1:
            r = (p0 * (_LOG_32_PI2 + 2.0 * _PSI_HALF + log_moment_term
                       + ds[0][0]) + cs[0][0] * p1)
        else:
            r = (cs[m - 1][0] * p1 + ds[m - 1][0] * p0
                 - 2.0 * p0 / math.factorial(m - 1) * digamma_moment(m))
        r_w.append(r)
    return ExpansionCoefficients(
        M=M, d=[v for v, _ in ds], d_err=[e for _, e in ds],
        c_w=[v for v, _ in cs], c_w_err=[e for _, e in cs], R_w=r_w)


def thm_prediction(X: float, coeffs: ExpansionCoefficients,
                   test: TestFunction) -> float:
    """phi_hat(0) - int_0^1 phi_hat + sum_m R_wm / L^m."""
    L = math.log(X)
    total = float(test.phi_hat(0.0)) - phi_hat_half_integral(test)
    for m in range(1, coeffs.M + 1):
        total += coeffs.R_w[m - 1] / L ** m
    return total


def precise_decomposition(X: float, test: TestFunction,
                          weight: WeightFunction | None = None,
                          ctx: ZetaKContext | None = None, M: int = 2,
                          cutoff: int = 10 ** 6, route: str = "analytic",
                          y_cap: float = 3000.0) -> dict[str, float]:
    """The five-piece form: unit-window main terms, conductor constants,
    J(X), the digamma integral, and the even-sum expansion through order M."""
    from .empirical import digamma_integral_term
    w = weight or make_gaussian_weight()
    ctx = ctx or default_context()
    L = math.log(X)
    p0 = float(test.phi_hat(0.0))
    main = p0 - phi_hat_half_integral(test)
    cond = p0 / L * (_LOG_32_PI2 + 2.0 * _PSI_HALF
                     + 2.0 * w.mw_prime_1 / w.w_hat0)
    j_val, j_err = J_X(X, test, w, ctx, y_cap)
    dig = digamma_integral_term(test, L)
    ds = d_coefficients(M, cutoff, route, ctx)
    even = sum(ds[m - 1][0] * float(test.phi_hat_deriv0(m - 1)) / L ** m
               for m in range(1, M + 1))
    total = main + cond + j_val + dig + even
    return {"main": main, "conductor": cond, "J": j_val, "J_err": j_err,
            "digamma": dig, "even": even, "total": total}
