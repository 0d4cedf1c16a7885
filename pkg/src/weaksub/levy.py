"""Lévy laws as characteristic triplets, and their exponents.

A Lévy law is represented by its drift, Gaussian covariance and jump
measure. All jump measures here have finite total mass, so the
uncompensated form of the jump integral

    sum_j rate_j * (exp(i<theta, x_j>) - 1)

is always finite and is the internal convention: the drift field is the
total drift of the continuous part. Conversion helpers to and from the
unit-ball-truncated triplet are provided.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

PSD_TOL = 1e-10
REAL_PART_TOL = 1e-10

Array = np.ndarray


class LevySpecError(ValueError):
    """Raised when a process specification violates its invariants."""


# ---------------------------------------------------------------------------
# Jump measure specifications
# ---------------------------------------------------------------------------


class JumpMeasure:
    """Base class for finite-activity jump measure specifications."""

    dim: int

    @property
    def total_mass(self) -> float:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> Array:
        """Draw `size` i.i.d. jumps from the normalized measure."""
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroJumps(JumpMeasure):
    """The zero measure (no jumps)."""

    dim: int

    @property
    def total_mass(self) -> float:
        return 0.0

    def sample(self, rng: np.random.Generator, size: int) -> Array:
        if size > 0:
            raise LevySpecError("cannot sample jumps from the zero measure")
        return np.zeros((0, self.dim))


class AtomicJumps(JumpMeasure):
    """Finite sum of weighted atoms: measure = sum_j rate_j * delta_{x_j}."""

    def __init__(self, points, rates):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        rates = np.asarray(rates, dtype=float)
        if points.shape[0] != rates.shape[0]:
            raise LevySpecError("number of atoms and rates differ")
        if np.any(rates <= 0):
            raise LevySpecError("atom rates must be positive")
        if np.any(np.all(points == 0.0, axis=1)):
            raise LevySpecError("atoms must be nonzero points")
        self.points = points
        self.rates = rates
        self.dim = points.shape[1]

    @property
    def total_mass(self) -> float:
        return float(self.rates.sum())

    def sample(self, rng: np.random.Generator, size: int) -> Array:
        probs = self.rates / self.rates.sum()
        idx = rng.choice(len(self.rates), size=size, p=probs)
        return self.points[idx]

    def __repr__(self):
        return f"AtomicJumps(points={self.points!r}, rates={self.rates!r})"


@dataclass(frozen=True)
class SamplableJumps(JumpMeasure):
    """Jump measure known only through a sampler of its normalization.

    The total mass must be declared explicitly; integrals against the
    measure are then Monte Carlo estimates (total_mass times the sample
    mean), reported with standard errors.
    """

    dim: int
    total_mass_value: float
    sampler: Callable[[np.random.Generator, int], Array]
    analytic_moments: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.total_mass_value <= 0 or not np.isfinite(self.total_mass_value):
            raise LevySpecError("samplable measure needs finite positive total mass")

    @property
    def total_mass(self) -> float:
        return self.total_mass_value

    def sample(self, rng: np.random.Generator, size: int) -> Array:
        out = np.asarray(self.sampler(rng, size), dtype=float)
        return out.reshape(size, self.dim)


# ---------------------------------------------------------------------------
# Characteristic / Laplace exponents for the supported families
# ---------------------------------------------------------------------------


def _check_dim(name, vec, dim):
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (dim,):
        raise LevySpecError(f"{name} has shape {vec.shape}, expected ({dim},)")
    return vec


def psd_factor(sigma: Array, tol: float = PSD_TOL) -> Array:
    """Factor B with B B' = sigma, for symmetric PSD sigma.

    Symmetrizes first; eigenvalues in [-tol, 0) are clipped to 0, anything
    below -tol is an error.
    """
    sigma = np.asarray(sigma, dtype=float)
    sym = 0.5 * (sigma + sigma.T)
    vals, vecs = np.linalg.eigh(sym)
    if np.any(vals < -tol):
        raise LevySpecError(f"covariance not PSD: min eigenvalue {vals.min():g}")
    return vecs * np.sqrt(np.clip(vals, 0.0, None))


def exponent_bm(mu, sigma, theta) -> complex:
    """Characteristic exponent of Brownian motion with drift.

    i<mu, theta> - theta sigma theta' / 2.
    """
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    theta = np.asarray(theta, dtype=float)
    n = mu.shape[0]
    if theta.shape != (n,) or sigma.shape != (n, n):
        raise LevySpecError("mu, sigma, theta dimensions disagree")
    sym = 0.5 * (sigma + sigma.T)
    if np.any(np.linalg.eigvalsh(sym) < -PSD_TOL):
        raise LevySpecError("sigma is not positive semidefinite")
    return complex(1j * mu @ theta - 0.5 * theta @ sym @ theta)


def exponent_cpp(jumps: JumpMeasure, theta) -> complex:
    """Characteristic exponent of a compound Poisson process, uncompensated:
    sum_j rate_j (exp(i<theta, x_j>) - 1).
    """
    theta = np.asarray(theta, dtype=float)
    if isinstance(jumps, ZeroJumps):
        return 0.0 + 0.0j
    if not isinstance(jumps, AtomicJumps):
        raise LevySpecError("exponent_cpp requires an atomic jump measure")
    phases = jumps.points @ theta
    return complex(np.sum(jumps.rates * (np.exp(1j * phases) - 1.0)))


def kac_stack_exponent(blocks: Sequence["LevyLaw"], theta) -> complex:
    """Exponent of a stack of independent processes: sum of block exponents
    evaluated on the matching theta blocks.
    """
    theta = np.asarray(theta, dtype=float)
    dims = [b.dim for b in blocks]
    if sum(dims) != theta.shape[0]:
        raise LevySpecError("block dimensions do not sum to dim(theta)")
    total = 0.0 + 0.0j
    pos = 0
    for block in blocks:
        total += block.exponent(theta[pos : pos + block.dim])
        pos += block.dim
    return total


# ---------------------------------------------------------------------------
# Subordinate laws (exactly samplable at arbitrary times)
# ---------------------------------------------------------------------------


class LevyLaw:
    """A Lévy law that can evaluate its exponent and sample increments.

    Instances are immutable and safe to share across workers; sampling
    takes an explicit RNG.
    """

    dim: int

    def exponent(self, theta) -> complex:
        """Characteristic exponent at frequency theta."""
        raise NotImplementedError

    def sample(self, dt: float, rng: np.random.Generator, size: int = 1) -> Array:
        """Draw `size` independent copies of the increment over duration dt,
        shape (size, dim).
        """
        raise NotImplementedError


class BrownianMotion(LevyLaw):
    """Brownian motion with drift mu and covariance sigma (per unit time)."""

    def __init__(self, mu, sigma):
        self.mu = np.asarray(mu, dtype=float)
        sigma = np.asarray(sigma, dtype=float)
        self.dim = self.mu.shape[0]
        if sigma.shape != (self.dim, self.dim):
            raise LevySpecError("sigma must be square of order dim(mu)")
        self.sigma = 0.5 * (sigma + sigma.T)
        self._factor = psd_factor(self.sigma)

    def exponent(self, theta) -> complex:
        return exponent_bm(self.mu, self.sigma, theta)

    def sample(self, dt, rng, size=1):
        if dt < 0:
            raise LevySpecError("negative duration")
        z = rng.standard_normal((size, self.dim))
        return dt * self.mu + np.sqrt(dt) * (z @ self._factor.T)

    def __repr__(self):
        return f"BrownianMotion(mu={self.mu!r}, sigma={self.sigma!r})"


class CompoundPoisson(LevyLaw):
    """Compound Poisson process given by an atomic (or samplable) jump measure."""

    def __init__(self, jumps: JumpMeasure):
        if jumps.total_mass <= 0:
            raise LevySpecError("compound Poisson needs a nonzero jump measure")
        self.jumps = jumps
        self.dim = jumps.dim

    def exponent(self, theta) -> complex:
        return exponent_cpp(self.jumps, theta)

    def sample(self, dt, rng, size=1):
        if dt < 0:
            raise LevySpecError("negative duration")
        counts = rng.poisson(self.jumps.total_mass * dt, size=size)
        total = int(counts.sum())
        out = np.zeros((size, self.dim))
        if total:
            sizes = self.jumps.sample(rng, total)
            owner = np.repeat(np.arange(size), counts)
            np.add.at(out, owner, sizes)
        return out

    def __repr__(self):
        return f"CompoundPoisson({self.jumps!r})"


class IndependentStack(LevyLaw):
    """Stack of independent Lévy laws, concatenated coordinatewise."""

    def __init__(self, blocks: Sequence[LevyLaw]):
        if not blocks:
            raise LevySpecError("stack needs at least one block")
        self.blocks = tuple(blocks)
        self.dims = tuple(b.dim for b in blocks)
        self.dim = sum(self.dims)

    def exponent(self, theta) -> complex:
        return kac_stack_exponent(self.blocks, theta)

    def sample(self, dt, rng, size=1):
        return np.hstack([b.sample(dt, rng, size) for b in self.blocks])

    def __repr__(self):
        return f"IndependentStack({list(self.blocks)!r})"


def zero_process(dim: int) -> BrownianMotion:
    """The constant-zero process in `dim` dimensions."""
    return BrownianMotion(np.zeros(dim), np.zeros((dim, dim)))


# ---------------------------------------------------------------------------
# Characteristic triplets and subordinators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CharTriplet:
    """Characteristic triplet (drift, covariance, jump measure).

    The drift is the total drift of the continuous part (uncompensated
    jump convention); see `to_unit_ball_truncation`.
    """

    mu: Array
    sigma: Array
    jumps: JumpMeasure

    def __post_init__(self):
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=float))
        object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=float))

    @property
    def dim(self) -> int:
        return self.mu.shape[0]

    def exponent(self, theta) -> complex:
        return exponent_bm(self.mu, self.sigma, theta) + exponent_cpp(self.jumps, theta)


def _atoms_inside_unit_ball_mean(jumps: JumpMeasure) -> Array:
    """integral of x over the closed unit ball against the jump measure."""
    if isinstance(jumps, ZeroJumps):
        return np.zeros(jumps.dim)
    if not isinstance(jumps, AtomicJumps):
        raise LevySpecError("truncation conversion requires atomic jumps")
    inside = np.linalg.norm(jumps.points, axis=1) <= 1.0
    return (jumps.rates[inside, None] * jumps.points[inside]).sum(axis=0)


def to_unit_ball_truncation(t: CharTriplet) -> CharTriplet:
    """Re-express the drift for the unit-ball-truncated jump integral."""
    return CharTriplet(t.mu + _atoms_inside_unit_ball_mean(t.jumps), t.sigma, t.jumps)


def from_unit_ball_truncation(t: CharTriplet) -> CharTriplet:
    """Inverse of `to_unit_ball_truncation`."""
    return CharTriplet(t.mu - _atoms_inside_unit_ball_mean(t.jumps), t.sigma, t.jumps)


@dataclass(frozen=True)
class SubordinatorSpec:
    """Nonnegative drift plus a finite-activity jump measure on the
    nonnegative orthant.
    """

    d: Array
    jumps: JumpMeasure

    def __post_init__(self):
        # Orthant/sign violations are left to validate_triplet so they can
        # be reported rather than raised.
        d = np.asarray(self.d, dtype=float)
        object.__setattr__(self, "d", d)
        if self.jumps.dim != d.shape[0]:
            raise LevySpecError("jump measure dimension differs from drift")

    @property
    def dim(self) -> int:
        return self.d.shape[0]

    @property
    def is_atomic(self) -> bool:
        return isinstance(self.jumps, (AtomicJumps, ZeroJumps))


def pure_drift(d) -> SubordinatorSpec:
    d = np.asarray(d, dtype=float)
    return SubordinatorSpec(d, ZeroJumps(d.shape[0]))


def laplace_exponent(T: SubordinatorSpec, z) -> complex:
    """Extended Laplace exponent <d, z> + sum_j rate_j (1 - exp(-<z, t_j>)),
    for Re z >= 0 coordinatewise. Exact; atomic specs only.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.real < 0):
        raise LevySpecError("laplace_exponent requires Re(z) >= 0")
    val = complex(T.d @ z)
    if isinstance(T.jumps, ZeroJumps):
        return val
    if not isinstance(T.jumps, AtomicJumps):
        raise LevySpecError("exact Laplace exponent needs atomic jumps; "
                            "use laplace_exponent_mc for samplable measures")
    val += complex(np.sum(T.jumps.rates * (1.0 - np.exp(-(T.jumps.points @ z)))))
    return val


def laplace_exponent_mc(T: SubordinatorSpec, z, rng: np.random.Generator,
                        samples: int = 10_000) -> tuple[complex, float]:
    """Monte Carlo Laplace exponent for samplable jump measures.

    Returns (estimate, standard error of the jump-integral part).
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.real < 0):
        raise LevySpecError("laplace_exponent requires Re(z) >= 0")
    if T.is_atomic:
        return laplace_exponent(T, z), 0.0
    pts = T.jumps.sample(rng, samples)
    vals = 1.0 - np.exp(-(pts @ z))
    mean = vals.mean()
    se = T.jumps.total_mass * float(
        np.sqrt((np.var(vals.real) + np.var(vals.imag)) / samples))
    return complex(T.d @ z) + T.jumps.total_mass * mean, se


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    violations: list[str]

    @property
    def valid(self) -> bool:
        return not self.violations

    def __iter__(self):
        return iter(self.violations)


def validate_triplet(t: CharTriplet | SubordinatorSpec) -> ValidationReport:
    """Check triplet/subordinator invariants, reporting rather than raising."""
    violations: list[str] = []
    if isinstance(t, SubordinatorSpec):
        if np.any(t.d < 0):
            violations.append("drift has a negative coordinate")
        if isinstance(t.jumps, AtomicJumps) and np.any(t.jumps.points < 0):
            violations.append("jump atom outside the nonnegative orthant")
    else:
        sym = 0.5 * (t.sigma + t.sigma.T)
        if t.sigma.shape != (t.dim, t.dim):
            violations.append("sigma is not square of order dim(mu)")
        elif np.any(np.linalg.eigvalsh(sym) < -PSD_TOL):
            violations.append("sigma is not positive semidefinite")
    jumps = t.jumps
    if isinstance(jumps, AtomicJumps):
        if np.any(np.all(jumps.points == 0.0, axis=1)):
            violations.append("jump atom at the origin")
        if np.any(jumps.rates <= 0):
            violations.append("nonpositive atom rate")
    if not np.isfinite(jumps.total_mass):
        violations.append("jump measure has infinite total mass")
    return ValidationReport(violations)
