"""Analytic gadget suite: the pole-clearing polynomial g_L and its
derivative bounds, Markov-brothers inequality checkers, epsilon-net
comparisons between an interval sup and values at reciprocal integers,
and smooth bump functions with quasi-exponentially decaying Fourier
transforms.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import TheoremViolationError, ValidationError
from .ratfunc import Polynomial

G_L_CAP = 64
INV_G_CALIBRATED_CONSTANT = 8.0  # fitted, not asserted
GRID_SLACK = 1e-9


@lru_cache(maxsize=None)
def g_polynomial(L):
    """g_L(x) = prod_{c=1}^{L} (1 - c^2 x^2)^{floor(L/c)}, exact coefficients."""
    if not 1 <= L <= G_L_CAP:
        raise ValidationError(f"L must be in 1..{G_L_CAP}")
    out = Polynomial((1,))
    for c in range(1, L + 1):
        out = out * Polynomial((1, 0, -c * c)) ** (L // c)
    return out


@lru_cache(maxsize=None)
def _g_derivative_float(L, order):
    return np.array([float(c) for c in g_polynomial(L).derivative(order).coeffs][::-1])


def g_eval(L, t, derivative_order=0):
    """Value of g_L^{(i)}(t); exact polynomial differentiated, evaluated at
    the exact binary rational t, returned as a float."""
    if derivative_order < 0:
        raise ValidationError("derivative order must be >= 0")
    p = g_polynomial(L).derivative(derivative_order)
    return float(p(Fraction(t)))


def _g_derivatives_on_grid(L, max_order, ts):
    """g_L^{(j)}(t) for j <= max_order on a float grid, shape (order+1, len(ts))."""
    return np.stack([np.polyval(_g_derivative_float(L, j), ts)
                     for j in range(max_order + 1)])


def _inv_g_derivatives(g_derivs):
    """Derivatives of 1/g from those of g via the Leibniz recursion
    sum_j C(i,j) g^(j) h^(i-j) = 0 for i >= 1."""
    orders = g_derivs.shape[0]
    h = np.empty_like(g_derivs)
    h[0] = 1.0 / g_derivs[0]
    for i in range(1, orders):
        acc = np.zeros_like(h[0])
        for j in range(1, i + 1):
            acc += math.comb(i, j) * g_derivs[j] * h[i - j]
        h[i] = -acc / g_derivs[0]
    return h


def g_derivative_bound_check(L, i, grid=100):
    """Check 1/2 <= g_L <= 1 and |g_L^{(i)}| <= (3 i L^{3/2})^i on a grid in
    [0, 1/(2 L^2)]; also report how the 1/g_L derivative compares with
    2 i! (C sqrt(i) L^{3/2})^i for the calibrated C."""
    if L < 1 or i < 0:
        raise ValidationError("need L >= 1 and i >= 0")
    ts = np.linspace(0.0, 1.0 / (2 * L * L), grid if isinstance(grid, int) else len(grid))
    if not isinstance(grid, int):
        ts = np.asarray(grid, dtype=float)
    derivs = _g_derivatives_on_grid(L, i, ts)
    g_vals = derivs[0]
    g_min, g_max = float(g_vals.min()), float(g_vals.max())
    bound_i = 1.0 if i == 0 else (3.0 * i * L**1.5) ** i
    sup_gi = float(np.abs(derivs[i]).max())

    inv = _inv_g_derivatives(derivs)
    sup_inv = float(np.abs(inv[i]).max())
    inv_bound = 2.0 * math.factorial(i) * (INV_G_CALIBRATED_CONSTANT * math.sqrt(max(i, 1)) * L**1.5) ** i
    record = {
        "L": L, "i": i, "grid": len(ts),
        "g_min": g_min, "g_max": g_max,
        "sup_derivative": sup_gi, "derivative_bound": bound_i,
        "sup_inverse_derivative": sup_inv,
        "inverse_bound_constant": INV_G_CALIBRATED_CONSTANT,
        "inverse_bound": inv_bound,
        "inverse_bound_holds": sup_inv <= inv_bound * (1 + GRID_SLACK),
    }
    if g_min < 0.5 - GRID_SLACK or g_max > 1.0 + GRID_SLACK:
        raise TheoremViolationError(f"g_{L} left [1/2, 1] on the grid", details=record)
    if sup_gi > bound_i * (1 + GRID_SLACK):
        raise TheoremViolationError(
            f"|g_{L}^({i})| exceeded (3 i L^1.5)^i on the grid", details=record)
    return record


def chebyshev_grid(a, b, points):
    """Chebyshev extrema mapped to [a, b]; includes both endpoints."""
    j = np.arange(points + 1)
    return (a + b) / 2 + (b - a) / 2 * np.cos(np.pi * j / points)


def _float_poly(coeffs):
    return np.array([float(c) for c in coeffs][::-1])


def markov_factor(D, k):
    """D^2 (D^2 - 1) ... (D^2 - (k-1)^2) / (2k-1)!!, exact."""
    num = 1
    for j in range(k):
        num *= D * D - j * j
    den = 1
    for j in range(1, 2 * k, 2):
        den *= j
    return Fraction(num, den)


def markov_check(coeffs, k, interval=(-1.0, 1.0), grid_size=None):
    """sup |P^{(k)}| against the Markov-brothers bound on [a, b], on a
    Chebyshev-extrema grid; the ratio must stay below 1 + 1e-9."""
    a, b = interval
    if b <= a:
        raise ValidationError("empty interval")
    pol = np.asarray([float(c) for c in coeffs], dtype=float)
    D = len(pol) - 1
    while D > 0 and pol[D] == 0:
        D -= 1
    if k < 1 or k > D:
        raise ValidationError("need degree >= k >= 1")
    grid_size = grid_size or 64 * max(D, 1)
    xs = chebyshev_grid(a, b, grid_size)
    base = _float_poly(pol[:D + 1])
    sup_p = float(np.abs(np.polyval(base, xs)).max())
    deriv = base
    for _ in range(k):
        deriv = np.polyder(deriv)
    lhs = float(np.abs(np.polyval(deriv, xs)).max())
    rhs = float(markov_factor(D, k)) * (2.0 / (b - a)) ** k * sup_p
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    record = {"degree": D, "k": k, "interval": [a, b], "lhs": lhs, "rhs": rhs, "ratio": ratio}
    if ratio > 1 + GRID_SLACK:
        raise TheoremViolationError("Markov-brothers ratio exceeded 1", details=record)
    return record


def epsilon_net_check(coeffs, N):
    """Check sup_{[0,1/N]} |P| <= (1 - D^2/(N+1))^{-1} sup_{n>=N} |P(1/n)|,
    and the derived derivative bound
    sup_{[0,1/(2D^2)]} |P^{(k)}| <= 2^{2k+1} D^{4k} / (2k-1)!! * sup_{n>=D^2} |P(1/n)|.

    The right-hand sups are evaluated at n up to N(N+1) together with the
    limit value P(0); that point set has mesh <= 1/(2N(N+1)) in [0, 1/N],
    which is what the underlying argument needs.
    """
    base = _float_poly([float(c) for c in coeffs])
    D = len(base) - 1
    if N < max(D * D, 1):
        raise ValidationError(f"need N >= D^2 = {D * D}")
    xs = chebyshev_grid(0.0, 1.0 / N, 64 * max(D, 1))
    lhs = float(np.abs(np.polyval(base, xs)).max())
    cap = max(N * (N + 1), 4 * N)
    ns = np.arange(N, cap + 1, dtype=float)
    rhs_sup = float(np.abs(np.polyval(base, 1.0 / ns)).max())
    rhs_sup = max(rhs_sup, abs(float(np.polyval(base, 0.0))))
    factor = 1.0 / (1.0 - D * D / (N + 1.0))
    record = {
        "degree": D, "N": N, "lhs": lhs, "rhs_sup": rhs_sup, "factor": factor,
        "net_ok": lhs <= factor * rhs_sup * (1 + GRID_SLACK) + 1e-300,
        "derivative_checks": [],
    }
    if not record["net_ok"]:
        raise TheoremViolationError("epsilon-net comparison failed", details=record)

    if D >= 1:
        n0 = D * D
        cap0 = max(n0 * (n0 + 1), 4 * n0)
        ns0 = np.arange(max(n0, 1), cap0 + 1, dtype=float)
        rhs0 = float(np.abs(np.polyval(base, 1.0 / ns0)).max())
        rhs0 = max(rhs0, abs(float(np.polyval(base, 0.0))))
        xs0 = chebyshev_grid(0.0, 1.0 / (2 * D * D), 64 * D)
        deriv = base
        for k in range(1, min(D, 4) + 1):
            deriv = np.polyder(deriv)
            lhs_k = float(np.abs(np.polyval(deriv, xs0)).max())
            bound = 2.0 ** (2 * k + 1) * float(D) ** (4 * k) / float(math.prod(range(1, 2 * k, 2))) * rhs0
            ok = lhs_k <= bound * (1 + GRID_SLACK) + 1e-300
            record["derivative_checks"].append(
                {"k": k, "lhs": lhs_k, "bound": bound, "ok": ok})
            if not ok:
                raise TheoremViolationError(
                    f"derivative epsilon-net bound failed at k={k}", details=record)
    return record


# ---------------------------------------------------------------------------
# Bump functions: mu = law of sum a_j X_j, X_j uniform in [-1, 1], with
# a_j = c / (j log(2+j)^{1+eps}) normalized so sum a_j = 1.  Then
# mu-hat(t) = prod_j sinc(t a_j).


_NORMALIZATION_HEAD = 200_000
_SINC_LOG_COEFFS = (Fraction(-1, 6), Fraction(-1, 180), Fraction(-1, 2835), Fraction(-1, 37800))
_TAIL_THRESHOLD = 0.3


class BumpProfile:
    """Coefficient profile a_j = c / (j log(2+j)^{1+eps}) with sum 1.

    The normalization and all tail sums use Euler-Maclaurin corrected
    integrals, certified to well below 1e-8; partial sums alone converge
    far too slowly to reach that accuracy directly.
    """

    def __init__(self, epsilon):
        if epsilon <= 0:
            raise ValidationError("epsilon must be positive")
        self.epsilon = float(epsilon)
        self._tail_cache = {}
        s_head, s_tail = self._raw_sum()
        self.c = 1.0 / (s_head + s_tail)
        self.head_sum = s_head * self.c
        self.tail_sum = s_tail * self.c
        self.normalization_head = _NORMALIZATION_HEAD
        self.fitted_m = None

    def _raw_f(self, x, p=1):
        return (1.0 / (x * np.log(2.0 + x) ** (1.0 + self.epsilon))) ** p

    def _raw_sum(self):
        js = np.arange(1, _NORMALIZATION_HEAD + 1, dtype=float)
        head = float(self._raw_f(js).sum())
        tail = self._tail_raw(_NORMALIZATION_HEAD, 1)
        return head, tail

    def _tail_raw(self, J, p):
        """sum_{j>J} (1/(j log(2+j)^{1+eps}))^p by Euler-Maclaurin."""
        eps = self.epsilon

        def f(x):
            return (1.0 / (x * math.log(2.0 + x) ** (1.0 + eps))) ** p

        def fprime(x):
            return f(x) * (-p) * (1.0 / x + (1.0 + eps) / ((2.0 + x) * math.log(2.0 + x)))

        x0 = J + 1.0
        if p == 1:
            # exact integral of 1/((2+x) log(2+x)^{1+eps}) plus a fast
            # correction for the difference 1/x - 1/(2+x)
            u0 = math.log(2.0 + x0)
            main = u0 ** (-eps) / eps
            corr = quad(lambda x: 2.0 / (x * (2.0 + x) * math.log(2.0 + x) ** (1.0 + eps)),
                        x0, np.inf, limit=200)[0]
            integral = main + corr
        else:
            integral = quad(f, x0, np.inf, limit=200)[0]
        return integral + f(x0) / 2.0 - fprime(x0) / 12.0

    def a(self, j):
        """Coefficient a_j; accepts scalars or numpy arrays."""
        j = np.asarray(j, dtype=float)
        return self.c / (j * np.log(2.0 + j) ** (1.0 + self.epsilon))

    def tail_power_sum(self, J, p):
        """sum_{j>J} a_j^p, certified via Euler-Maclaurin."""
        key = (J, p)
        if key not in self._tail_cache:
            self._tail_cache[key] = self.c ** p * self._tail_raw(J, p)
        return self._tail_cache[key]

    def truncation_for(self, t):
        """Smallest power-of-two J >= 1024 with t * a_J below the Taylor
        tail threshold (so the log-sinc series certifies the tail)."""
        t = abs(t)
        J = 1024
        while t * float(self.a(J)) > _TAIL_THRESHOLD:
            J *= 2
            if J > 2 ** 26:
                raise ValidationError("t too large for the bump evaluation")
        return J


def bump_fourier(profile, t):
    """mu-hat(t) = prod_{j>=1} sinc(t a_j), evaluated with an explicit head
    product and a certified log-sinc Taylor tail; mu-hat(0) = 1."""
    t = float(abs(t))
    if t == 0.0:
        return 1.0
    J = profile.truncation_for(t)
    js = np.arange(1, J + 1, dtype=float)
    x = t * profile.a(js)
    vals = np.sinc(x / np.pi)
    if np.any(vals == 0.0):
        return 0.0
    sign = -1.0 if int(np.sum(vals < 0)) % 2 else 1.0
    log_head = float(np.log(np.abs(vals)).sum())
    log_tail = 0.0
    for m, coef in enumerate(_SINC_LOG_COEFFS, start=1):
        log_tail += float(coef) * t ** (2 * m) * profile.tail_power_sum(J, 2 * m)
    return sign * math.exp(log_head + log_tail)


def bump_envelope_check(profile, ts):
    """Check |mu-hat(t)| <= prod_{j <= t / log(2+t)^{1+eps}} 1/(t a_j)."""
    rows = []
    ok = True
    for t in ts:
        t = float(t)
        j_star = int(t / math.log(2.0 + t) ** (1.0 + profile.epsilon))
        value = abs(bump_fourier(profile, t))
        if j_star >= 1:
            js = np.arange(1, j_star + 1, dtype=float)
            log_env = float(-np.log(t * profile.a(js)).sum())
            env = math.exp(log_env)
        else:
            env = 1.0
        good = value <= env * (1 + 1e-9)
        ok = ok and good
        rows.append({"t": t, "fourier": value, "envelope": env, "ok": good})
    return {"rows": rows, "all_ok": ok}


def fit_decay_constant(profile, ts):
    """M = inf over the grid of -log|mu-hat(t)| * log(2+t)^{1+eps} / t; a
    positive fit certifies quasi-exponential decay on the grid."""
    best = math.inf
    for t in ts:
        t = float(t)
        if t <= 0:
            continue
        v = abs(bump_fourier(profile, t))
        if v == 0.0:
            continue
        m = -math.log(v) * math.log(2.0 + t) ** (1.0 + profile.epsilon) / t
        best = min(best, m)
    profile.fitted_m = best
    return best


def periodized_coefficient(profile, alpha, k):
    """Fourier coefficient of the 2-pi periodization scaled to (-alpha, alpha):
    phi_alpha-hat(k) = alpha/(2 pi) mu-hat(k alpha)."""
    if not 0 < alpha < math.pi:
        raise ValidationError("alpha must lie in (0, pi)")
    return alpha / (2 * math.pi) * bump_fourier(profile, k * alpha)
