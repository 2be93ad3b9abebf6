"""Haar sampling on U(n) and SU(n), matrix-free mixed tensor
representations, Weyl characters and dimensions, invariant projectors,
operator-norm estimation, and the Monte Carlo word-integral experiments.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import perms, weingarten
from .errors import (ConvergenceError, ResourceCapError, TheoremViolationError,
                     UnsupportedSizeError, ValidationError)
from .freegroup import evaluate_word

DENSE_PROJECTOR_CAP = 10_000
APPLY_VECTOR_CAP = 10_000_000
DIM_LOWER_BOUND_CONSTANT = math.log(2) / 8


def substream(seed, *path):
    """A named, reproducible random substream of a 64-bit root seed."""
    key = tuple(p if isinstance(p, int) else zlib.crc32(str(p).encode()) for p in path)
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def _as_rng(rng_or_seed):
    if isinstance(rng_or_seed, np.random.Generator):
        return rng_or_seed
    return np.random.default_rng(rng_or_seed)


def haar_unitary(n, rng):
    """Haar-distributed U(n) sample: complex Ginibre, QR, then the phase
    gauge fixed so R has positive real diagonal (this removes the QR
    ambiguity and makes the law exactly Haar, not just approximately)."""
    if n < 1:
        raise ValidationError("dimension must be >= 1")
    rng = _as_rng(rng)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_special_unitary(n, rng):
    """Haar on SU(n): draw Haar U(n), multiply one fixed column by the
    conjugate determinant.  For fixed W in SU(n), (WU) gets the same
    column correction as U because det(WU) = det(U), so left translation
    invariance is inherited from U(n); uniqueness of Haar measure then
    gives exact SU(n) distribution."""
    if n < 2:
        raise ValidationError("SU(n) sampling needs n >= 2")
    u = haar_unitary(n, rng).copy()
    det = np.linalg.det(u)
    u[:, 0] *= det.conjugate() / abs(det)
    return u


def unitarity_residual(u):
    n = u.shape[0]
    return float(np.max(np.abs(u.conj().T @ u - np.eye(n))))


@dataclass(frozen=True)
class UnitaryTuple:
    """An r-tuple of sampled unitaries with provenance."""

    n: int
    matrices: tuple
    group: str = "U"
    seed_path: tuple = ()

    def __post_init__(self):
        for u in self.matrices:
            if unitarity_residual(u) >= 1e-12:
                raise ValidationError("matrix fails the unitarity residual bound")
            if self.group == "SU" and abs(np.linalg.det(u) - 1) >= 1e-10:
                raise ValidationError("matrix fails the SU determinant bound")


def sample_tuple(r, n, rng, group="U", seed_path=()):
    draw = haar_special_unitary if group == "SU" else haar_unitary
    return UnitaryTuple(n, tuple(draw(n, rng) for _ in range(r)), group, tuple(seed_path))


# ---------------------------------------------------------------------------
# Highest weights, Weyl dimension formula, and character evaluation


class HighestWeight:
    """Weakly decreasing integer n-tuple modulo (1,...,1), stored as the
    minimal-l1 representative (translate by the lower median)."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        entries = tuple(int(x) for x in entries)
        if any(entries[i] < entries[i + 1] for i in range(len(entries) - 1)):
            raise ValidationError("weight entries must be weakly decreasing")
        n = len(entries)
        if n:
            shift = sorted(entries)[(n - 1) // 2]
            entries = tuple(x - shift for x in entries)
        self.entries = entries

    @property
    def n(self):
        return len(self.entries)

    def l1(self):
        return sum(abs(x) for x in self.entries)

    def __eq__(self, other):
        return isinstance(other, HighestWeight) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"HighestWeight({list(self.entries)})"


def mixed_weight(lam, mu, n):
    """The dominant weight (lambda, 0, ..., 0, -reversed(mu)) in length n."""
    if lam.length + mu.length > n:
        raise ValidationError(
            f"n={n} too small for lambda of length {lam.length} and mu of length {mu.length}")
    pad = n - lam.length - mu.length
    return tuple(lam.parts) + (0,) * pad + tuple(-p for p in reversed(mu.parts))


def weyl_dim(weight, n=None):
    """Irreducible dimension from the Weyl dimension formula, exact integer:
    prod_{i<j} (j - i + L_i - L_j) / (j - i)."""
    entries = weight.entries if isinstance(weight, HighestWeight) else tuple(weight)
    if n is None:
        n = len(entries)
    if len(entries) != n:
        raise ValidationError("weight length must equal n")
    num = 1
    den = 1
    for i in range(n):
        for j in range(i + 1, n):
            num *= (j - i) + entries[i] - entries[j]
            den *= j - i
    assert num % den == 0
    return num // den


def mixed_dimension(lam, mu, n):
    """Dimension of the U(n) irrep with stable-character label (lambda, mu)."""
    return weyl_dim(mixed_weight(lam, mu, n), n)


def _log_int(x):
    """Natural log of a (possibly huge) positive integer."""
    if x <= 0:
        raise ValidationError("log of nonpositive integer")
    bits = x.bit_length()
    if bits <= 900:
        return math.log(x)
    shift = bits - 900
    return math.log(x >> shift) + shift * math.log(2)


def dim_bounds_check(weight, n):
    """Check exp(c min(|L|_1, n)) <= dim <= exp(|L|_1 log n) with
    c = log(2)/8; returns the three quantities and raises on violation."""
    hw = weight if isinstance(weight, HighestWeight) else HighestWeight(weight)
    if hw.n != n:
        raise ValidationError("weight length must equal n")
    dim = weyl_dim(hw, n)
    l1 = hw.l1()
    log_dim = _log_int(dim)
    log_lower = DIM_LOWER_BOUND_CONSTANT * min(l1, n)
    log_upper = l1 * math.log(n)
    record = {
        "n": n,
        "weight": list(hw.entries),
        "l1": l1,
        "dim": dim,
        "log_dim": log_dim,
        "log_lower": log_lower,
        "log_upper": log_upper,
        "passed": log_lower <= log_dim + 1e-12 and log_dim <= log_upper + 1e-12,
    }
    if not record["passed"]:
        raise TheoremViolationError(
            f"dimension bounds failed for weight {hw.entries} at n={n}", details=record)
    return record


def _det_ratio(eig, exponents_num, exponents_den):
    num = np.power.outer(eig, exponents_num)
    den = np.power.outer(eig, exponents_den)
    sign_n, log_n = np.linalg.slogdet(num)
    sign_d, log_d = np.linalg.slogdet(den)
    if sign_d == 0:
        raise ZeroDivisionError("degenerate denominator determinant")
    return sign_n / sign_d * np.exp(log_n - log_d)


def _char_from_weight(weight, eig):
    n = len(eig)
    exps_den = np.arange(n - 1, -1, -1)
    exps_num = np.asarray(weight) + exps_den
    return _det_ratio(np.asarray(eig, dtype=complex), exps_num, exps_den)


DEGENERACY_THRESHOLD = 1e-7


def _char_eval(weight, eig):
    """Weyl character as a ratio of generalized Vandermonde determinants,
    with a deterministic perturbation + Richardson fallback near
    eigenvalue collisions (the character is a polynomial in the
    eigenvalues, so extrapolating the perturbation to zero is exact up to
    the neglected cubic term)."""
    eig = np.asarray(eig, dtype=complex)
    n = len(eig)
    if n == 1:
        return complex(eig[0]) ** int(weight[0])
    gaps = np.abs(eig[:, None] - eig[None, :]) + np.eye(n)
    if gaps.min() > DEGENERACY_THRESHOLD:
        return _char_from_weight(weight, eig)
    if np.max(np.abs(eig - eig[0])) < 1e-12:
        # scalar matrix: central character times the dimension
        k_minus_l = int(sum(weight))
        return complex(eig[0]) ** k_minus_l * weyl_dim(tuple(weight), n)
    offsets = np.arange(n) - (n - 1) / 2.0
    h = 1e-4

    def at(scale):
        return _char_from_weight(weight, eig * np.exp(1j * scale * offsets))

    f_h, f_h2, f_h4 = at(h), at(h / 2), at(h / 4)
    return (8.0 * f_h4 - 6.0 * f_h2 + f_h) / 3.0


def schur_eval(lam, eig):
    """Schur polynomial s_lambda at the given points (0 when the partition
    is longer than the point count)."""
    n = len(eig)
    if lam.length > n:
        return 0j
    return _char_eval(tuple(lam.parts) + (0,) * (n - lam.length), eig)


def weyl_character_eval(lam, mu, eig):
    """Stable character s_{lambda,mu} evaluated on a spectrum of unit
    complex numbers; at the identity this is the irrep dimension."""
    n = len(eig)
    if n < lam.length + mu.length:
        raise ValidationError(
            f"need n >= {lam.length + mu.length} eigenvalues, got {n}")
    return _char_eval(mixed_weight(lam, mu, n), eig)


# ---------------------------------------------------------------------------
# Matrix-free operators on (C^n)^{(x)k} (x) dual^{(x)l}


class ImplicitTensorOperator:
    """Linear operator on the mixed tensor power, given by apply/adjoint
    callables on flat complex vectors of length n^(k+l)."""

    def __init__(self, n, k, l, apply_fn, adjoint_fn):
        self.n = n
        self.k = k
        self.l = l
        self._apply = apply_fn
        self._adjoint = adjoint_fn

    @property
    def dim(self):
        return self.n ** (self.k + self.l)

    def apply(self, vec):
        return self._apply(vec)

    def adjoint(self):
        return ImplicitTensorOperator(self.n, self.k, self.l, self._adjoint, self._apply)

    def _check(self, other):
        if (self.n, self.k, self.l) != (other.n, other.k, other.l):
            raise ValidationError("operator shapes differ")

    def __add__(self, other):
        self._check(other)
        return ImplicitTensorOperator(
            self.n, self.k, self.l,
            lambda v: self._apply(v) + other._apply(v),
            lambda v: self._adjoint(v) + other._adjoint(v))

    def __mul__(self, scalar):
        c = complex(scalar)
        return ImplicitTensorOperator(
            self.n, self.k, self.l,
            lambda v: c * self._apply(v),
            lambda v: c.conjugate() * self._adjoint(v))

    __rmul__ = __mul__

    def compose(self, other):
        """self after other."""
        self._check(other)
        return ImplicitTensorOperator(
            self.n, self.k, self.l,
            lambda v: self._apply(other._apply(v)),
            lambda v: other._adjoint(self._adjoint(v)))

    @classmethod
    def identity(cls, n, k, l):
        return cls(n, k, l, lambda v: v.copy(), lambda v: v.copy())

    @classmethod
    def zero(cls, n, k, l):
        return cls(n, k, l, lambda v: np.zeros_like(v), lambda v: np.zeros_like(v))

    @classmethod
    def from_matrix(cls, mat, n, k, l):
        mat = np.asarray(mat, dtype=complex)
        mat_h = mat.conj().T
        op = cls(n, k, l, lambda v: mat @ v, lambda v: mat_h @ v)
        op.matrix = mat
        return op

    def to_dense(self):
        d = self.dim
        if d > 4096:
            raise ResourceCapError(f"dense realization of dimension {d} refused")
        out = np.zeros((d, d), dtype=complex)
        basis = np.zeros(d, dtype=complex)
        for j in range(d):
            basis[:] = 0
            basis[j] = 1
            out[:, j] = self._apply(basis)
        return out


def _apply_along_axis(mat, tensor, axis):
    moved = np.tensordot(mat, tensor, axes=(1, axis))
    return np.moveaxis(moved, 0, axis)


def tensor_representation(u, k, l):
    """pi0_{k,l}(u) = u^{(x)k} (x) conj(u)^{(x)l} as a matrix-free operator."""
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    uc = u.conj()
    uh = u.conj().T
    uhc = u.T

    def apply_fn(vec):
        t = vec.reshape((n,) * (k + l))
        for axis in range(k):
            t = _apply_along_axis(u, t, axis)
        for axis in range(k, k + l):
            t = _apply_along_axis(uc, t, axis)
        return t.reshape(-1)

    def adjoint_fn(vec):
        t = vec.reshape((n,) * (k + l))
        for axis in range(k):
            t = _apply_along_axis(uh, t, axis)
        for axis in range(k, k + l):
            t = _apply_along_axis(uhc, t, axis)
        return t.reshape(-1)

    return ImplicitTensorOperator(n, k, l, apply_fn, adjoint_fn)


def word_representation(w, unitaries, k, l):
    """pi0_{k,l}(w(u_1, ..., u_r))."""
    return tensor_representation(evaluate_word(w, unitaries), k, l)


@lru_cache(maxsize=None)
def _perm_gram_inverse(kfact_perms, n):
    sigmas = list(kfact_perms)
    size = len(sigmas)
    gram = [[Fraction(n) ** perms.num_cycles(perms.compose(s, perms.inverse(t)))
             for t in sigmas] for s in sigmas]
    from .ratfunc import solve_exact
    cols = []
    for j in range(size):
        rhs = [Fraction(1 if i == j else 0) for i in range(size)]
        cols.append(solve_exact(gram, rhs))
    return np.array([[float(cols[j][i]) for j in range(size)] for i in range(size)])


def _perm_vector(sigma, n, k):
    """The invariant vector v_sigma with components delta(A = B o sigma)."""
    v = np.zeros((n,) * (2 * k))
    grids = np.indices((n,) * k).reshape(k, -1)
    upper = [grids[sigma[t]] for t in range(k)]
    v[tuple(upper) + tuple(grids)] = 1.0
    return v.reshape(-1)


def invariant_projector(k, l, n):
    """Orthogonal projector onto U(n)-invariant vectors of the mixed tensor
    power; the zero operator unless k = l, in which case the invariants are
    spanned by the k! permutation tensors (rank k! for n >= k)."""
    if k != l:
        return ImplicitTensorOperator.zero(n, k, l)
    if k == 0:
        return ImplicitTensorOperator.identity(n, 0, 0)
    if k > 4:
        raise UnsupportedSizeError("invariant projector supported for k <= 4")
    sigmas = perms.all_perms(k)
    ginv = _perm_gram_inverse(sigmas, n)
    vectors = np.stack([_perm_vector(s, n, k) for s in sigmas])

    def apply_fn(vec):
        overlaps = vectors @ vec          # <v_tau, x> for real 0/1 v_tau
        weights = ginv @ overlaps
        return vectors.T @ weights

    return ImplicitTensorOperator(n, k, k, apply_fn, apply_fn)


def q_projector(lam, mu, n, dense_cap=DENSE_PROJECTOR_CAP):
    """The mixed-irrep projector: dimension times the tensor action of the
    Weingarten-based group-algebra element, realized densely."""
    k, l = lam.size, mu.size
    if n < k + l:
        raise ValidationError(f"need n >= k+l = {k + l}")
    dim = n ** (k + l)
    if dim > dense_cap:
        raise UnsupportedSizeError(f"dense dimension {dim} exceeds cap {dense_cap}")
    z = weingarten.z_element(lam, mu)
    coeffs = z.eval_at(n)
    d_mixed = mixed_dimension(lam, mu, n)
    mat = np.zeros((dim, dim), dtype=complex)
    m = k + l
    grids = np.indices((n,) * m).reshape(m, -1)   # X = C (+) B, free
    weights_row = n ** np.arange(k + l - 1, -1, -1)
    for pi, c in coeffs.items():
        upper_out = [grids[pi[t]] for t in range(k)]            # A
        lower_in = [grids[pi[k + t]] for t in range(l)]         # D
        row_parts = upper_out + [grids[k + t] for t in range(l)]    # (A, B)
        col_parts = [grids[t] for t in range(k)] + lower_in         # (C, D)
        rows = sum(w * p for w, p in zip(weights_row, row_parts))
        cols = sum(w * p for w, p in zip(weights_row, col_parts))
        np.add.at(mat, (rows, cols), float(c) * d_mixed)
    return ImplicitTensorOperator.from_matrix(mat, n, k, l)


# ---------------------------------------------------------------------------
# Norm estimation


@dataclass
class NormEstimate:
    value: float
    spread: float
    restarts: int
    iterations: int

    def __float__(self):
        return self.value


def estimate_norm(op, tol=1e-2, max_iter=2000, rng=0, restarts=3):
    """Power iteration on op* op with seeded restarts.

    The returned value is a Rayleigh-quotient estimate, hence never above
    the true operator norm; the relative spread across restarts must come
    in under tol or a ConvergenceError (carrying the best estimate) is
    raised.
    """
    if op.dim > APPLY_VECTOR_CAP:
        raise ResourceCapError(f"vector dimension {op.dim} exceeds apply cap")
    rng = _as_rng(rng)
    best = []
    total_iters = 0
    for _ in range(restarts):
        v = rng.standard_normal(op.dim) + 1j * rng.standard_normal(op.dim)
        v /= np.linalg.norm(v)
        est = 0.0
        prev = -1.0
        for it in range(max_iter):
            w = op.adjoint().apply(op.apply(v))
            lam = float(np.real(np.vdot(v, w)))
            est = math.sqrt(max(lam, 0.0))
            nw = np.linalg.norm(w)
            total_iters += 1
            if nw == 0:
                break
            v = w / nw
            if it % 8 == 7:
                if prev >= 0 and abs(est - prev) <= 0.02 * tol * max(est, 1e-30):
                    break
                prev = est
        best.append(est)
    value = max(best)
    spread = (max(best) - min(best)) / value if value > 0 else 0.0
    result = NormEstimate(value, spread, restarts, total_iters)
    if spread > tol:
        raise ConvergenceError(
            f"power iteration restarts disagree (spread {spread:.3g} > {tol})",
            best_estimate=result)
    return result


# ---------------------------------------------------------------------------
# Monte Carlo experiments


@dataclass
class MCResult:
    mean: complex
    se: float
    samples: int
    n: int

    def within(self, target, k_se=4.0):
        return abs(self.mean - target) <= k_se * max(self.se, 1e-300)


def mc_expect(lam, mu, w, n, samples, rng, group="U"):
    """Monte Carlo estimate of the expected stable character of the word
    map, averaging character evaluations on the spectrum of w(U)."""
    if n < lam.length + mu.length:
        raise ValidationError("n too small for this character")
    rng = _as_rng(rng)
    r = max(w.rank, 1)
    vals = np.empty(samples, dtype=complex)
    for i in range(samples):
        us = sample_tuple(r, n, rng, group=group).matrices
        eig = np.linalg.eigvals(evaluate_word(w, us))
        eig /= np.abs(eig)
        vals[i] = weyl_character_eval(lam, mu, eig)
    mean = complex(vals.mean())
    se = float(np.sqrt(np.mean(np.abs(vals - mean) ** 2) / samples))
    return MCResult(mean, se, samples, n)


def mc_trace_moment(factors, n, samples, rng, group="U"):
    """Monte Carlo estimate of E prod_j tr(w_j(U)) for trace-monomial
    factors given as (word, inverted) pairs."""
    rng = _as_rng(rng)
    r = max((w.rank for w, _ in factors), default=1)
    r = max(r, 1)
    vals = np.empty(samples, dtype=complex)
    for i in range(samples):
        us = sample_tuple(r, n, rng, group=group).matrices
        prod = 1.0 + 0j
        for w, inverted in factors:
            eff = w.inverse() if inverted else w
            prod *= np.trace(evaluate_word(eff, us)) if eff.letters else float(n)
        vals[i] = prod
    mean = complex(vals.mean())
    se = float(np.sqrt(np.mean(np.abs(vals - mean) ** 2) / samples))
    return MCResult(mean, se, samples, n)


@dataclass
class StrongConvergenceReport:
    n: int
    k: int
    l: int
    r: int
    samples: int
    seed: int
    norm_estimates: list
    reference: float
    deviation: float
    spreads: list = field(default_factory=list)

    def to_json(self):
        return {
            "n": self.n, "k": self.k, "l": self.l, "r": self.r,
            "samples": self.samples, "seed": self.seed,
            "norm_estimates": self.norm_estimates,
            "reference": self.reference,
            "deviation": self.deviation,
            "spreads": self.spreads,
            "type": "float",
        }


def polynomial_operator(terms, unitaries, k, l, remove_invariants=True):
    """sum_w coeff * pi_{k,l}(w(U)), with the invariant block projected out
    when k = l (the representation on the orthocomplement)."""
    n = unitaries[0].shape[0]
    op = ImplicitTensorOperator.zero(n, k, l)
    for w, coeff in terms:
        op = op + complex(coeff) * word_representation(w, unitaries, k, l)
    if remove_invariants and k == l and k > 0:
        proj = invariant_projector(k, l, n)
        complement = ImplicitTensorOperator.identity(n, k, l) + (-1.0) * proj
        op = op.compose(complement)
    return op


def strong_convergence_experiment(r, n, k, l, terms, samples, seed,
                                  reference=None, tol=5e-2, max_iter=2000,
                                  group="U"):
    """Sample Haar tuples, build the word-polynomial operator in the (k,l)
    tensor representation with invariants removed, and estimate its norm
    against a reduced-free-group reference value."""
    if n ** (k + l) > APPLY_VECTOR_CAP:
        raise ResourceCapError("tensor dimension exceeds apply cap")
    if reference is None:
        from . import rwalk
        reference = rwalk.reduced_norm_lower_bound(terms, r)
    estimates = []
    spreads = []
    for s in range(samples):
        if k == 0 and l == 0:
            estimates.append(abs(sum(c for _, c in terms)))
            spreads.append(0.0)
            continue
        tup = sample_tuple(r, n, substream(seed, "sample", s), group=group,
                           seed_path=("sample", s))
        op = polynomial_operator(terms, tup.matrices, k, l)
        est = estimate_norm(op, tol=tol, max_iter=max_iter,
                            rng=substream(seed, "restart", s))
        estimates.append(est.value)
        spreads.append(est.spread)
    mean_norm = float(np.mean(estimates))
    return StrongConvergenceReport(
        n=n, k=k, l=l, r=r, samples=samples, seed=seed,
        norm_estimates=[float(e) for e in estimates],
        reference=float(reference),
        deviation=float(mean_norm - reference),
        spreads=spreads)


def concentration_probe(terms, k, l, n_list, trials, seed, tol_factor=10.0,
                        max_iter=800):
    """Empirical spread of the operator norm across independent samples for
    each n, checked against the sub-Gaussian Lipschitz scale
    C(x) K / sqrt(n - 2) where C(x) = sum |coeff| |w|."""
    r = max(max(w.rank for w, _ in terms), 1)
    big_k = k + l
    c_x = sum(abs(c) * max(len(w), 1) for w, c in terms)
    rows = []
    for n in n_list:
        norms = []
        for t in range(trials):
            tup = sample_tuple(r, n, substream(seed, "probe", n, t))
            op = polynomial_operator(terms, tup.matrices, k, l)
            norms.append(estimate_norm(op, tol=0.2, max_iter=max_iter,
                                       rng=substream(seed, "probe-restart", n, t)).value)
        norms = np.array(norms)
        scale = c_x * big_k / math.sqrt(max(n - 2, 1))
        deviations = np.abs(norms - norms.mean())
        flagged = float(np.mean(deviations > tol_factor * scale))
        rows.append({
            "n": n,
            "trials": trials,
            "mean": float(norms.mean()),
            "std": float(norms.std()),
            "lipschitz_scale": float(scale),
            "flagged_fraction": flagged,
        })
    monotone = rows[-1]["std"] < rows[0]["std"] if len(rows) >= 2 else True
    return {"rows": rows, "std_decreases": monotone,
            "c_x": float(c_x), "k_plus_l": big_k}
