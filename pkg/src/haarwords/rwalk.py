"""Random walks on free groups: exact return probabilities, spectral
radius brackets, empirical proper-power decay, and rapid-decay
(Haagerup-type) norm bounds with ball-compression lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .errors import (ResourceCapError, TheoremViolationError,
                     UnsupportedSizeError, ValidationError)
from .freegroup import Word, ball, ball_size, is_proper_power

GENERAL_CONVOLUTION_STEP_CAP = 20
RADIAL_EXACT_STEP_CAP = 40
CONVOLUTION_STATE_CAP = 500_000
BALL_COMPRESSION_CAP = 200_000


class WalkMeasure:
    """Finitely supported probability measure on F_r.

    Flags: symmetric (mu(w) = mu(w^-1)), contains_identity, generating
    (the support generates the whole free group, decided by Stallings
    folding).  "Reasonable" is the conjunction of all three.
    """

    def __init__(self, support, rank=None):
        probs = {}
        for w, p in support.items():
            p = Fraction(p)
            if p < 0:
                raise ValidationError("negative probability")
            if p > 0:
                probs[w] = probs.get(w, Fraction(0)) + p
        if sum(probs.values()) != 1:
            raise ValidationError("probabilities must sum to 1")
        self.support = probs
        self.rank = rank if rank is not None else max((w.rank for w in probs), default=1)
        self.symmetric = all(probs.get(w.inverse(), Fraction(0)) == p
                             for w, p in probs.items())
        self.contains_identity = any(w.is_identity() for w in probs)
        self.generating = _support_generates(
            [w for w in probs if not w.is_identity()], self.rank)

    @property
    def reasonable(self):
        return self.symmetric and self.contains_identity and self.generating

    def support_radius(self):
        return max((len(w) for w in self.support), default=0)

    @classmethod
    def uniform_generators(cls, r):
        """Uniform on the 2r generators and inverses (no identity atom)."""
        p = Fraction(1, 2 * r)
        support = {}
        for i in range(1, r + 1):
            support[Word((i,), r)] = p
            support[Word((-i,), r)] = p
        return cls(support, rank=r)

    @classmethod
    def lazy_uniform(cls, r):
        """Uniform on {identity} union generators and inverses."""
        p = Fraction(1, 2 * r + 1)
        support = {Word((), r): p}
        for i in range(1, r + 1):
            support[Word((i,), r)] = p
            support[Word((-i,), r)] = p
        return cls(support, rank=r)

    def is_radial_nearest_neighbor(self):
        """True when the measure is a function of word length with support
        radius <= 1 (the regime of the exact distance-chain DP)."""
        if self.support_radius() > 1:
            return False
        letters = [w for w in self.support if len(w) == 1]
        if len(letters) != 2 * self.rank:
            return not letters  # identity-only point mass is radial
        probs = {self.support[w] for w in letters}
        return len(probs) == 1


def _support_generates(words, r):
    """Stallings folding: the subgroup generated by the words equals F_r
    iff the folded core graph is the wedge of r labelled loops."""
    if r == 0:
        return True
    parent = [0]

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def fresh():
        parent.append(len(parent))
        return len(parent) - 1

    edges = []  # (src, dst, label) with label in 1..r
    for w in words:
        prev = 0
        for idx, x in enumerate(w.letters):
            nxt = 0 if idx == len(w.letters) - 1 else fresh()
            if x > 0:
                edges.append((prev, nxt, x))
            else:
                edges.append((nxt, prev, -x))
            prev = nxt

    changed = True
    while changed:
        changed = False
        out = {}
        inc = {}
        for src, dst, lab in edges:
            src, dst = find(src), find(dst)
            for table, key, other in ((out, (src, lab), dst), (inc, (dst, lab), src)):
                if key in table and find(table[key]) != other:
                    a, b = find(table[key]), other
                    parent[a] = b
                    changed = True
                else:
                    table[key] = other
        if changed:
            edges = [(find(s), find(d), l) for s, d, l in edges]

    vertices = {find(v) for s, d, _ in edges for v in (s, d)}
    vertices.add(find(0))
    if len(vertices) != 1:
        return False
    labels = {lab for _, _, lab in edges}
    return labels == set(range(1, r + 1))


def _radial_transition(measure):
    """Distance-chain step probabilities (p_stay, p_single) for a radial
    nearest-neighbor measure."""
    p_stay = Fraction(0)
    p_single = Fraction(0)
    for w, p in measure.support.items():
        if w.is_identity():
            p_stay = p
        else:
            p_single = p
    return p_stay, p_single


def _radial_return_probabilities(measure, steps, exact=True):
    """P(g_t = e) for t = 0..steps via the birth-death distance chain."""
    r = measure.rank
    p0, p1 = _radial_transition(measure)
    if not exact:
        p0, p1 = float(p0), float(p1)
    zero = Fraction(0) if exact else 0.0
    dist = [zero] * (steps + 1)
    dist[0] = Fraction(1) if exact else 1.0
    out = [dist[0]]
    back = p1
    fwd = p1 * (2 * r - 1)
    for _ in range(steps):
        new = [zero] * (steps + 1)
        for d, mass in enumerate(dist):
            if not mass:
                continue
            if d == 0:
                new[0] += mass * p0
                new[1] += mass * p1 * 2 * r
            else:
                new[d] += mass * p0
                new[d - 1] += mass * back
                if d + 1 <= steps:
                    new[d + 1] += mass * fwd
        dist = new
        out.append(dist[0])
    return out


def _convolve_distribution(measure, steps, cap=CONVOLUTION_STATE_CAP,
                           stop_at_cap=False):
    """Exact walk distribution after each step as Word -> Fraction maps.
    With stop_at_cap the history is truncated at the last step whose
    support fits, instead of raising."""
    state = {Word((), measure.rank): Fraction(1)}
    history = [state]
    for _ in range(steps):
        new = {}
        for w, p in state.items():
            for s, ps in measure.support.items():
                key = w * s
                new[key] = new.get(key, Fraction(0)) + p * ps
        if len(new) > cap:
            if stop_at_cap:
                return history
            raise ResourceCapError(f"convolution support {len(new)} exceeds cap {cap}")
        state = new
        history.append(state)
    return history


def return_probability(measure, steps, exact=True):
    """P(g_steps = e), exact for radial nearest-neighbor measures via the
    distance chain (steps <= 40 when exact) and for general measures via
    truncated convolution (steps <= 20); the walk cannot leave the ball of
    radius steps * support_radius, so truncation is not an approximation."""
    if steps < 0:
        raise ValidationError("steps must be >= 0")
    if measure.is_radial_nearest_neighbor():
        if exact and steps > RADIAL_EXACT_STEP_CAP:
            raise UnsupportedSizeError(
                f"exact radial return probability capped at {RADIAL_EXACT_STEP_CAP} steps")
        value = _radial_return_probabilities(measure, steps, exact=exact)[steps]
        return value
    if steps > GENERAL_CONVOLUTION_STEP_CAP:
        raise UnsupportedSizeError(
            f"general convolution capped at {GENERAL_CONVOLUTION_STEP_CAP} steps")
    history = _convolve_distribution(measure, steps)
    value = history[steps].get(Word((), measure.rank), Fraction(0))
    return value if exact else float(value)


@dataclass
class SpectralRadiusBracket:
    lower: float
    upper: float
    estimate: float
    details: dict = field(default_factory=dict)

    def width(self):
        return self.upper - self.lower

    def to_json(self):
        return {"lower": self.lower, "upper": self.upper,
                "estimate": self.estimate, "width": self.width(),
                "details": self.details, "type": "float"}


def _schur_upper_bound(measure, s_grid=None, a_grid=None, d_max=600):
    """Rigorous Schur-test upper bound for the norm of the convolution
    operator of a symmetric measure, using radial weights (d + a) s^d.

    For any positive weight F the norm is at most
    sup_g sum_h mu(g^-1 h) F(h)/F(g); here each support word of length l
    is bounded through its worst-case distance displacement in
    [|d - l|, d + l], conservative but valid for any symmetric measure."""
    q = max(2 * measure.rank - 1, 2)
    if s_grid is None:
        center = 1.0 / math.sqrt(q)
        s_grid = np.geomspace(center * 0.7, min(0.999, center * 1.4), 40)
    if a_grid is None:
        a_grid = np.linspace(0.5, 10.0, 20)
    items = [(len(w), float(p)) for w, p in measure.support.items()]
    best = math.inf
    for s in s_grid:
        log_s = math.log(s)
        for a in a_grid:
            def f(d):
                return (d + a) * math.exp(d * log_s)

            worst = 0.0
            for d in range(0, d_max + 1):
                total = 0.0
                for ell, p in items:
                    if ell == 0:
                        total += p
                        continue
                    lo = abs(d - ell)
                    total += p * max(f(dd) / f(d) for dd in range(lo, d + ell + 1))
                worst = max(worst, total)
            limit = sum(p * math.exp(ell * abs(log_s)) for ell, p in items)
            worst = max(worst, limit)
            best = min(best, worst)
    return best


def _radial_schur_upper(measure, d_max=2000):
    """Specialized exact Schur bound for radial nearest-neighbor measures:
    with weight f(d) = (d + a) s^d the sup over base points is explicit."""
    r = measure.rank
    q = 2 * r - 1
    p0, p1 = (float(x) for x in _radial_transition(measure))
    center = 1.0 / math.sqrt(q)
    a0 = r / max(r - 1, 0.5)
    d = np.arange(1.0, d_max + 1.0)
    best = math.inf
    for s in np.geomspace(center * 0.9, min(0.9999, center * 1.1), 60):
        for a in np.linspace(0.5 * max(1.0, a0), 3.0 * max(2.0, a0), 60):
            at_zero = p0 + p1 * 2 * r * ((1 + a) * s) / a
            tail = p0 + p1 * ((d - 1 + a) / ((d + a) * s) + q * s * (d + 1 + a) / (d + a))
            limit = p0 + p1 * (1.0 / s + q * s)
            best = min(best, max(at_zero, float(tail.max()), limit))
    return best


def spectral_radius(measure, dp_steps=800, ball_radius=None):
    """Bracket for the spectral radius: even-step return probabilities give
    monotone lower bounds, ball-compression Rayleigh quotients another
    lower bound, and a Schur-test radial weight gives a rigorous upper
    bound.  Returned as an interval, never a point estimate."""
    if not measure.symmetric:
        raise ValidationError("spectral radius bracketing needs a symmetric measure")
    details = {}
    if measure.is_radial_nearest_neighbor():
        probs = _radial_return_probabilities(measure, dp_steps, exact=False)
        upper = _radial_schur_upper(measure)
    else:
        history = _convolve_distribution(measure, GENERAL_CONVOLUTION_STEP_CAP,
                                         cap=100_000, stop_at_cap=True)
        e = Word((), measure.rank)
        probs = [float(h.get(e, Fraction(0))) for h in history]
        l1 = float(sum(measure.support.values()))
        upper = min(_schur_upper_bound(measure), l1)
    lowers = [(probs[m]) ** (1.0 / m) for m in range(2, len(probs), 2) if probs[m] > 0]
    lower_dp = max(lowers) if lowers else 0.0
    details["return_probability_lower"] = lower_dp
    details["dp_steps"] = len(probs) - 1

    lower_ball = 0.0
    if ball_radius is None:
        ball_radius = 1
        while ball_size(ball_radius + 1, measure.rank) <= BALL_COMPRESSION_CAP:
            ball_radius += 1
        ball_radius = min(ball_radius, 12)
    try:
        lower_ball = _compressed_norm(
            {w: complex(p) for w, p in measure.support.items()},
            measure.rank, ball_radius)
        details["ball_lower"] = lower_ball
        details["ball_radius"] = ball_radius
    except ResourceCapError:
        pass
    details["schur_upper"] = upper

    lower = max(lower_dp, lower_ball)
    if lower > upper + 1e-9:
        raise TheoremViolationError(
            "spectral radius lower bound exceeded the upper bound",
            details={"lower": lower, "upper": upper})
    # point estimate from the local limit shape P(2m) ~ C m^{-3/2} rho^{2m}
    est = lower
    evens = [m for m in range(2, len(probs), 2) if probs[m] > 0]
    if len(evens) >= 2:
        m1, m2 = evens[-2], evens[-1]
        ratio = probs[m2] / probs[m1]
        est = (ratio * (m2 / m1) ** 1.5) ** (1.0 / (m2 - m1))
        est = min(max(est, lower), upper)
    return SpectralRadiusBracket(lower=float(lower), upper=float(upper),
                                 estimate=float(est), details=details)


# ---------------------------------------------------------------------------
# Proper-power statistics


def _wilson_interval(hits, n, z=1.96):
    if n == 0:
        return 0.0, 1.0
    phat = hits / n
    denom = 1 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


def _nearest_neighbor_walker(measure, steps, samples, rng):
    """Vectorized walk for supports inside {identity} union letters.
    Yields (step, letter stacks, lengths) after each step; the stacks are
    live buffers, so callers must not mutate them."""
    letters = []
    probs = []
    for w, p in measure.support.items():
        letters.append(0 if w.is_identity() else w.letters[0])
        probs.append(float(p))
    letters = np.array(letters, dtype=np.int8)
    probs = np.array(probs)
    probs = probs / probs.sum()
    buf = np.zeros((samples, steps), dtype=np.int8)
    lengths = np.zeros(samples, dtype=np.int32)
    rows = np.arange(samples)
    for t in range(steps):
        draw = letters[rng.choice(len(letters), size=samples, p=probs)]
        top = np.where(lengths > 0, buf[rows, np.maximum(lengths - 1, 0)], 0)
        cancel = (draw != 0) & (lengths > 0) & (top == -draw)
        push = (draw != 0) & ~cancel
        lengths = lengths - cancel.astype(np.int32)
        buf[rows[push], lengths[push]] = draw[push]
        lengths = lengths + push.astype(np.int32)
        yield t, buf, lengths


def _vectorized_proper_power(words, lengths):
    """Boolean mask of which rows (reduced words) are proper powers."""
    samples, width = words.shape
    out = np.zeros(samples, dtype=bool)
    if width == 0:
        return out
    max_strip = (lengths - 1) // 2
    jmax = int(max_strip.max()) if samples else 0
    strip = np.zeros(samples, dtype=np.int64)
    if jmax > 0:
        js = np.arange(jmax)
        mirror_idx = np.clip(lengths[:, None] - 1 - js[None, :], 0, width - 1)
        left = words[:, :jmax]
        right = np.take_along_axis(words, mirror_idx, axis=1)
        cond = (js[None, :] < max_strip[:, None]) & (left == -right) & (left != 0)
        strip = np.cumprod(cond, axis=1).sum(axis=1)
    core_len = lengths - 2 * strip
    for L in np.unique(core_len):
        L = int(L)
        if L < 2:
            continue
        rows = np.where(core_len == L)[0]
        if not len(rows):
            continue
        found = np.zeros(len(rows), dtype=bool)
        for p in range(1, L // 2 + 1):
            if L % p:
                continue
            t = np.arange(L - p)
            idx_a = strip[rows][:, None] + t[None, :]
            idx_b = idx_a + p
            a = np.take_along_axis(words[rows], idx_a, axis=1)
            b = np.take_along_axis(words[rows], idx_b, axis=1)
            found |= np.all(a == b, axis=1)
        out[rows] = found
    return out


@dataclass
class ProperPowerStats:
    steps: int
    samples: int
    seed: int
    rows: list                # per step: dict with n, hits, phat, ci
    slope: float
    slope_stderr: float
    slope_window: tuple
    parity_locked: bool
    return_probabilities: list

    def to_json(self):
        return {
            "steps": self.steps, "samples": self.samples, "seed": self.seed,
            "rows": self.rows, "slope": self.slope,
            "slope_stderr": self.slope_stderr,
            "slope_window": list(self.slope_window),
            "parity_locked": self.parity_locked,
            "type": "float",
        }


def proper_power_stats(measure, steps, samples, seed, slope_window=(10, 30)):
    """Empirical probability that the walk sits at a proper power, per
    step, with Wilson intervals and a fitted exponential decay slope.

    The guarantee this probes assumes a reasonable measure; the sampler
    also accepts symmetric generating measures without an identity atom
    (their word length has a parity, so the slope is fitted on the
    dominant parity class).
    """
    if not (measure.symmetric and measure.generating):
        raise ValidationError("need a symmetric generating measure")
    if measure.support_radius() > 1:
        return _proper_power_stats_generic(measure, steps, samples, seed, slope_window)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1,)))
    rows = []
    for t, buf, lengths in _nearest_neighbor_walker(measure, steps, samples, rng):
        mask = _vectorized_proper_power(buf, lengths.astype(np.int64))
        hits = int(mask.sum())
        lo, hi = _wilson_interval(hits, samples)
        rows.append({"n": t + 1, "hits": hits, "phat": hits / samples,
                     "ci_low": lo, "ci_high": hi})
    parity_locked = not measure.contains_identity and all(
        len(w) % 2 == 1 for w in measure.support)
    slope, stderr = _fit_slope(rows, samples, slope_window, parity_locked)
    exact_returns = []
    if measure.is_radial_nearest_neighbor():
        exact_returns = [float(p) for p in
                         _radial_return_probabilities(measure, steps, exact=False)]
    return ProperPowerStats(steps=steps, samples=samples, seed=seed, rows=rows,
                            slope=slope, slope_stderr=stderr,
                            slope_window=slope_window, parity_locked=parity_locked,
                            return_probabilities=exact_returns)


def _proper_power_stats_generic(measure, steps, samples, seed, slope_window):
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1,)))
    words = list(measure.support)
    probs = np.array([float(p) for p in measure.support.values()])
    probs /= probs.sum()
    hits = np.zeros(steps, dtype=np.int64)
    for _ in range(samples):
        g = Word((), measure.rank)
        for t in range(steps):
            g = g * words[rng.choice(len(words), p=probs)]
            if is_proper_power(g) is not None:
                hits[t] += 1
    rows = []
    for t in range(steps):
        lo, hi = _wilson_interval(int(hits[t]), samples)
        rows.append({"n": t + 1, "hits": int(hits[t]), "phat": hits[t] / samples,
                     "ci_low": lo, "ci_high": hi})
    slope, stderr = _fit_slope(rows, samples, slope_window, False)
    return ProperPowerStats(steps=steps, samples=samples, seed=seed, rows=rows,
                            slope=slope, slope_stderr=stderr,
                            slope_window=slope_window, parity_locked=False,
                            return_probabilities=[])


def _fit_slope(rows, samples, window, parity_locked):
    """Weighted least-squares slope of log phat over the window; when word
    lengths have a locked parity only the dominant parity class is used."""
    lo, hi = window
    usable = [r for r in rows if lo <= r["n"] <= hi and r["hits"] > 0]
    if parity_locked:
        even = [r for r in usable if r["n"] % 2 == 0]
        odd = [r for r in usable if r["n"] % 2 == 1]
        usable = even if sum(r["hits"] for r in even) >= sum(r["hits"] for r in odd) else odd
    if len(usable) < 3:
        return math.nan, math.inf
    xs = np.array([r["n"] for r in usable], dtype=float)
    ys = np.log(np.array([r["phat"] for r in usable]))
    # inverse variance of log(phat): var ~ (1 - p) / (N p)
    ws = np.array([samples * r["phat"] / max(1 - r["phat"], 1e-9) for r in usable])
    wmean_x = np.average(xs, weights=ws)
    wmean_y = np.average(ys, weights=ws)
    cov = np.average((xs - wmean_x) * (ys - wmean_y), weights=ws)
    var = np.average((xs - wmean_x) ** 2, weights=ws)
    slope = cov / var
    resid = ys - (wmean_y + slope * (xs - wmean_x))
    dof = max(len(usable) - 2, 1)
    stderr = math.sqrt(max(np.average(resid**2, weights=ws), 1e-300) / (var * dof))
    return float(slope), float(stderr)


# ---------------------------------------------------------------------------
# Haagerup / rapid decay


def _ball_index(r, radius, cap=BALL_COMPRESSION_CAP):
    words = ball(radius, r, cap=cap)
    return words, {w: i for i, w in enumerate(words)}


def _compressed_norm(a_map, r, radius, iterations=300, seed=7):
    """Largest singular value of the convolution operator compressed to the
    ball of the given radius: a rigorous lower bound for the true norm."""
    words, index = _ball_index(r, radius)
    size = len(words)
    rows, cols, vals = [], [], []
    for s, c in a_map.items():
        if abs(c) == 0:
            continue
        for j, g in enumerate(words):
            target = s * g
            i = index.get(target)
            if i is not None:
                rows.append(i)
                cols.append(j)
                vals.append(complex(c))
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(size, size), dtype=complex)
    mat_h = mat.conjugate().transpose().tocsr()
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iterations):
        w = mat_h @ (mat @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        est = math.sqrt(float(np.real(np.vdot(v, w))))
        v = w / nw
    return est


def haagerup_check(a_map, radius=None):
    """For a finitely supported a, compare the compressed-ball lower bound
    for ||lambda(a)|| with the rapid-decay upper bound 3 (1 + q^2) ||a||_2.
    Returns {l2, upper, lower, radius, q}."""
    if not a_map:
        raise ValidationError("empty support")
    q = max(len(w) for w in a_map)
    r = max(max((w.rank for w in a_map), default=1), 1)
    l2 = math.sqrt(sum(abs(c) ** 2 for c in a_map.values()))
    upper = 3.0 * (1 + q * q) * l2
    if radius is None:
        radius = q + 3
    lower = _compressed_norm(a_map, r, radius)
    record = {"l2": l2, "upper": upper, "lower": lower, "radius": radius, "q": q}
    if lower > upper * (1 + 1e-9):
        raise TheoremViolationError("rapid-decay upper bound violated", details=record)
    return record


def reduced_norm_lower_bound(terms, r, radius=None):
    """Ball-compression estimate of the reduced free-group norm of a word
    polynomial (a lower bound, improving as the radius grows)."""
    a_map = {}
    for w, c in terms:
        a_map[w] = a_map.get(w, 0) + complex(c)
    q = max(max((len(w) for w in a_map), default=1), 1)
    if radius is None:
        radius = q + 3
        while ball_size(radius + 1, r) <= BALL_COMPRESSION_CAP // 2:
            radius += 1
        radius = min(radius, max(q + 3, 11))
    return _compressed_norm(a_map, r, radius)
