"""Weighted Grover search, the weighted adversary bound, the conditional
rotation that removes two-sided error, and the counting arithmetic used for
symmetric partial functions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .funcore import as_mask


# ---------------------------------------------------------------------------
# Grover


@dataclass
class GroverInstance:
    N: int
    copies: list[int]           # basis states allotted to each position
    marked: np.ndarray          # boolean mask over the N basis states

    def __post_init__(self):
        if sum(self.copies) != self.N or len(self.marked) != self.N:
            raise ValueError("copies must partition the N basis states")

    @property
    def M(self) -> int:
        return int(self.marked.sum())


def allocate_copies(lam, N: int) -> list[int]:
    """c_i = max(1, round(N lam_i / S)) for lam_i > 0, then largest-remainder
    adjustment so that the counts sum to N."""
    lam = [Fraction(v) for v in lam]
    S = sum(lam)
    if S <= 0:
        raise ValueError("verifier weight must be positive")
    support = [i for i, v in enumerate(lam) if v > 0]
    if len(support) > N:
        raise ValueError("N is smaller than the support of lam")
    exact = {i: N * lam[i] / S for i in support}
    c = [0] * len(lam)
    for i in support:
        c[i] = max(1, round(exact[i]))
    diff = N - sum(c)
    if diff > 0:
        order = sorted(support, key=lambda i: (-(exact[i] - c[i]), i))
        for j in range(diff):
            c[order[j % len(order)]] += 1
    while diff < 0:
        order = sorted((i for i in support if c[i] > 1), key=lambda i: (exact[i] - c[i], i))
        if not order:
            raise ValueError("cannot fit copy counts into N")
        for i in order:
            if diff == 0:
                break
            c[i] -= 1
            diff += 1
    return c


def weighted_instance(lam, x, y, N: int | None = None) -> GroverInstance:
    """Basis states split among positions in proportion to lam; the copies
    of positions where y differs from x are marked."""
    n = len(lam)
    N = n * n if N is None else N
    c = allocate_copies(lam, N)
    diff = as_mask(y, n) ^ as_mask(x, n)
    marked = np.concatenate([np.full(ci, bool((diff >> i) & 1)) for i, ci in enumerate(c)])
    return GroverInstance(N, c, marked)


def uniform_instance(N: int, M: int) -> GroverInstance:
    marked = np.zeros(N, dtype=bool)
    marked[:M] = True
    return GroverInstance(N, [1] * N, marked)


def grover_states(instance: GroverInstance, k: int):
    """Yield the real state vector after 0, 1, ..., k iterations."""
    N = instance.N
    psi = np.full(N, 1 / math.sqrt(N))
    sign = np.where(instance.marked, -1.0, 1.0)
    yield psi
    for _ in range(k):
        psi = psi * sign
        psi = 2 * psi.mean() - psi
        yield psi


def grover_simulate(instance: GroverInstance, k: int) -> float:
    """Probability of measuring a marked state after k iterations."""
    if instance.M == 0:
        return 0.0
    for psi in grover_states(instance, k):
        pass
    return float(np.sum(psi[instance.marked] ** 2))


def grover_curve(instance: GroverInstance, k: int) -> np.ndarray:
    """Success probabilities after 0..k iterations."""
    if instance.M == 0:
        return np.zeros(k + 1)
    return np.array([np.sum(p[instance.marked] ** 2) for p in grover_states(instance, k)])


def closed_form(N: int, M: int, k: int) -> float:
    if M == 0:
        return 0.0
    theta = math.asin(math.sqrt(M / N))
    return math.sin((2 * k + 1) * theta) ** 2


def grover_iteration_budget(N: int, m_min: int) -> int:
    """ceil((pi/4) sqrt(N / M_min)), the O(sqrt S) iteration budget."""
    if m_min < 1 or N < m_min:
        raise ValueError("need 1 <= M_min <= N")
    return math.ceil(math.pi / 4 * math.sqrt(N / m_min))


def optimal_iterations(N: int, M: int) -> int:
    """floor(pi / (4 theta)), the iteration count closest to a full rotation."""
    theta = math.asin(math.sqrt(M / N))
    return math.floor(math.pi / (4 * theta))


# ---------------------------------------------------------------------------
# adversary bound


@dataclass
class AdversaryBound:
    squared: Fraction           # 1 / (delta0 * delta1)
    delta0: Fraction
    delta1: Fraction

    @property
    def value(self) -> float:
        return math.sqrt(self.squared)


def adversary_bound(x, beta: dict, n: int, beta_x=1) -> AdversaryBound:
    """Weighted adversary bound for one claimed input X.

    ``beta`` maps each related Y (a mask, bit string or bit sequence) to its
    weight.  delta for X's side is the heaviest column load
    max_i sum_{Y: y_i != x_i} beta(Y); the other side is beta(X).
    """
    x = as_mask(x, n)
    beta_x = Fraction(beta_x)
    weights = {as_mask(y, n): Fraction(w) for y, w in beta.items()}
    if any(w < 0 for w in weights.values()):
        raise ValueError("weights must be non-negative")
    if sum(weights.values()) < 1 or beta_x < 1:
        raise ValueError("normalisation needs sum beta(Y) >= 1 and beta(X) >= 1")
    if x in weights:
        raise ValueError("X cannot be related to itself")
    load = [Fraction(0)] * n
    for y, w in weights.items():
        d = y ^ x
        for i in range(n):
            if (d >> i) & 1:
                load[i] += w
    delta0 = max(load)
    return AdversaryBound(1 / (delta0 * beta_x), delta0, beta_x)


def adversary_from_dual(x: int, n: int, rows, mu, fc) -> AdversaryBound:
    """Scale an optimal packing mu (one weight per disagreement row) by 1/FC."""
    fc = Fraction(fc)
    beta = {}
    for r, m in zip(rows, mu):
        if m:
            beta[x ^ r] = Fraction(m) / fc
    return adversary_bound(x, beta, n)


# ---------------------------------------------------------------------------
# conditional rotation


@dataclass
class BranchState:
    alpha: np.ndarray          # branch amplitudes
    beta: np.ndarray           # reject amplitude per branch
    gamma: np.ndarray          # accept amplitude per branch

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=complex)
        self.beta = np.asarray(self.beta, dtype=complex)
        self.gamma = np.asarray(self.gamma, dtype=complex)
        if abs(np.sum(np.abs(self.alpha) ** 2) - 1) > 1e-9:
            raise ValueError("branch amplitudes are not normalised")
        if np.any(np.abs(np.abs(self.beta) ** 2 + np.abs(self.gamma) ** 2 - 1) > 1e-9):
            raise ValueError("a branch qubit is not normalised")

    @property
    def acceptance(self) -> float:
        return float(np.sum(np.abs(self.alpha * self.gamma) ** 2))


@dataclass
class RotationResult:
    accept_x: float
    accept_y: float
    intermediate: float         # 2 sum |alpha^Y|^2 (|beta^X|^2 + |gamma^Y|^2)
    bound: float                # 2 (eps0 + eps1)


def exactify_rotation(sx: BranchState, sy: BranchState, eps0: float, eps1: float
                      ) -> RotationResult:
    """Rotate each branch's answer qubit so that X is accepted with certainty.

    Branch z gets the unitary [[g, -b], [conj(b), conj(g)]] built from X's
    (b, g) = (beta_z^X, gamma_z^X), which sends X's qubit to |accept>.
    """
    if sx.acceptance < 1 - eps0 - 1e-12 or sy.acceptance > eps1 + 1e-12:
        raise ValueError("states do not meet the stated error rates")
    bx, gx = sx.beta, sx.gamma
    acc_x = np.conj(bx) * bx + np.conj(gx) * gx
    acc_y = np.conj(bx) * sy.beta + np.conj(gx) * sy.gamma
    ax = float(np.sum(np.abs(sx.alpha) ** 2 * np.abs(acc_x) ** 2))
    ay = float(np.sum(np.abs(sy.alpha) ** 2 * np.abs(acc_y) ** 2))
    mid = float(2 * np.sum(np.abs(sy.alpha) ** 2 * (np.abs(bx) ** 2 + np.abs(sy.gamma) ** 2)))
    return RotationResult(ax, ay, mid, 2 * (eps0 + eps1))


def random_branch_pair(rng, branches: int, eps0: float, eps1: float):
    """A synthetic (X, Y) pair sharing branch amplitudes, with A^X >= 1 - eps0
    and A^Y <= eps1."""
    alpha = rng.normal(size=branches) + 1j * rng.normal(size=branches)
    alpha /= np.linalg.norm(alpha)
    w = np.abs(alpha) ** 2

    def qubits(acc_target):
        # per-branch accept probabilities with weighted mean exactly acc_target
        u = rng.random(branches)
        u -= np.dot(w, u)
        up = np.where(u > 0, (1 - acc_target) / np.where(u > 0, u, 1), np.inf)
        down = np.where(u < 0, acc_target / np.where(u < 0, -u, 1), np.inf)
        p = np.clip(acc_target + min(1.0, up.min(), down.min()) * u, 0, 1)
        phase_g = np.exp(2j * np.pi * rng.random(branches))
        phase_b = np.exp(2j * np.pi * rng.random(branches))
        return np.sqrt(1 - p) * phase_b, np.sqrt(p) * phase_g

    ax = 1 - eps0 * rng.random()
    ay = eps1 * rng.random()
    bx, gx = qubits(ax)
    by, gy = qubits(ay)
    return BranchState(alpha, bx, gx), BranchState(alpha, by, gy)


# ---------------------------------------------------------------------------
# counting arithmetic


def delta_count(N: int, d: int) -> int:
    """sum_{i=0}^{d} C(N, i)."""
    if not 0 <= d <= N:
        raise ValueError("need 0 <= d <= N")
    return sum(math.comb(N, i) for i in range(d + 1))


def symthm_bound(n: int) -> int:
    """Largest T with 2T * Delta(L, 2T) * L^2 < 2^(n/3), L = ceil(n log2 n)."""
    if n < 2:
        raise ValueError("need n >= 2")
    L = math.ceil(n * math.log2(n))
    T = 0
    while True:
        t = T + 1
        d = min(2 * t, L)
        if (2 * t * delta_count(L, d) * L * L) ** 3 >= 2 ** n:
            return T
        T = t
