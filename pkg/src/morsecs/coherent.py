"""Coherent states labeled by the open unit disk: coefficients, overlaps,
wavefunctions, phase-space labels, resolutions of unity, expectation values,
and the unitary displacement operator.

Branch convention. Every complex power in this module ((1-beta)^{-2s},
(1 - conj(beta1) beta2)^{-2s}, the unit-modulus phase factor) is taken on
the principal branch. All the bases have positive real part when the labels
stay inside the open disk, so the cut is never touched and the phases of the
closed wavefunction, the phase factor, and the displacement operator are
mutually consistent.

Phase-space coordinates. With w = (1 + beta)/(1 - beta) (right half plane),
the labels are x = ln Re w and p = s Im w / Re w; the map is a bijection of
the plane onto the disk.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.special

from .errors import ConsistencyError, DomainError, TruncationWarning
from .morse_core import ground_x_expectation, y_from_x
from .numerics import gauss_laguerre_rule, laguerre_sequence, log_gamma, matrix_exp

__all__ = [
    "CoherentLabel",
    "PhaseSpaceLabel",
    "CoherentState",
    "gen_factorial",
    "coefficients",
    "coefficient_tail_bound",
    "overlap",
    "wavefunction_series",
    "wavefunction_closed",
    "to_phase_space",
    "from_phase_space",
    "phase_factor",
    "expectation_X",
    "expectation_P",
    "resolution_of_unity",
    "phase_space_measure_check",
    "phase_space_tail_estimate",
    "displacement_matrix",
    "project_onto_basis",
]


def _check_s(s: float) -> float:
    s = float(s)
    if not math.isfinite(s) or s <= 0.0:
        raise DomainError(f"shape parameter must be positive, got {s!r}")
    return s


@dataclass(frozen=True)
class CoherentLabel:
    """A point beta of the open unit disk."""

    beta: complex

    def __post_init__(self):
        beta = complex(self.beta)
        if not (math.isfinite(beta.real) and math.isfinite(beta.imag)):
            raise DomainError("beta must be finite")
        if abs(beta) >= 1.0:
            raise DomainError(
                f"|beta| = {abs(beta)} is outside the open unit disk")
        object.__setattr__(self, "beta", beta)


@dataclass(frozen=True)
class PhaseSpaceLabel:
    """The pair (x, p) equivalent to a disk label."""

    x_tilde: float
    p_tilde: float

    def __post_init__(self):
        if not (math.isfinite(self.x_tilde) and math.isfinite(self.p_tilde)):
            raise DomainError("phase-space labels must be finite")
        object.__setattr__(self, "x_tilde", float(self.x_tilde))
        object.__setattr__(self, "p_tilde", float(self.p_tilde))


@dataclass(frozen=True)
class CoherentState:
    """Truncated coefficient vector of |beta> over the pseudo-number basis."""

    s: float
    label: CoherentLabel
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.coeffs, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n_terms(self) -> int:
        return self.coeffs.size

    def norm_sq(self) -> float:
        # Fixed ascending summation order, for reproducible output.
        return float(np.add.reduce(np.abs(self.coeffs) ** 2))


def _as_label(label) -> CoherentLabel:
    if isinstance(label, CoherentLabel):
        return label
    return CoherentLabel(label)


def gen_factorial(n: int, s: float) -> float:
    """{n}! = n! / (2s (2s+1) ... (2s+n-1)), the inverse binomial weight."""
    s = _check_s(s)
    n = int(n)
    if n < 0:
        raise DomainError("n must be >= 0")
    return math.exp(log_gamma(n + 1.0) + log_gamma(2.0 * s)
                    - log_gamma(n + 2.0 * s))


def _log_binom_sqrt(s: float, n_terms: int) -> np.ndarray:
    # 0.5 * ln C(n+2s-1, n) for n = 0 .. n_terms-1.
    lg2s = log_gamma(2.0 * s)
    return np.array([0.5 * (log_gamma(n + 2.0 * s) - log_gamma(n + 1.0) - lg2s)
                     for n in range(n_terms)])


def coefficients(label, s: float, n_terms: int) -> CoherentState:
    """First n_terms coefficients c_n = (1-|b|^2)^s sqrt(C(n+2s-1,n)) b^n.

    The binomial square root is assembled in log space; the power b^n is
    taken directly (it only ever decays). At b = 0 the vector is e_0.
    """
    label = _as_label(label)
    s = _check_s(s)
    n_terms = int(n_terms)
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")
    b = label.beta
    n = np.arange(n_terms)
    log_mag = s * math.log1p(-abs(b) ** 2) + _log_binom_sqrt(s, n_terms)
    with np.errstate(under="ignore"):
        c = np.exp(log_mag) * np.power(b, n)
    return CoherentState(s=s, label=label, coeffs=c)


def coefficient_tail_bound(label, s: float, n_terms: int) -> float:
    """Upper bound on the weight sum_{n >= n_terms} |c_n|^2.

    Geometric-type remainder: the binomial ratio C(n+2s,n+1)/C(n+2s-1,n)
    = (n+2s)/(n+1) is monotone in n, so the tail is dominated by its first
    term times a geometric series of ratio q r^2, q = max(1, (N+2s)/(N+1)).
    Returns inf if q r^2 >= 1 (truncation too short for the bound to close).
    """
    label = _as_label(label)
    s = _check_s(s)
    n_terms = int(n_terms)
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")
    r_sq = abs(label.beta) ** 2
    if r_sq == 0.0:
        return 0.0
    q = max(1.0, (n_terms + 2.0 * s) / (n_terms + 1.0))
    if q * r_sq >= 1.0:
        return math.inf
    log_first = (2.0 * s * math.log1p(-r_sq)
                 + (log_gamma(n_terms + 2.0 * s) - log_gamma(n_terms + 1.0)
                    - log_gamma(2.0 * s))
                 + n_terms * math.log(r_sq))
    return math.exp(log_first) / (1.0 - q * r_sq)


def overlap(label1, label2, s: float) -> complex:
    """<beta1|beta2> = (1-|b1|^2)^s (1-|b2|^2)^s (1 - conj(b1) b2)^{-2s}."""
    b1 = _as_label(label1).beta
    b2 = _as_label(label2).beta
    s = _check_s(s)
    return cmath.exp(s * math.log1p(-abs(b1) ** 2)
                     + s * math.log1p(-abs(b2) ** 2)
                     - 2.0 * s * cmath.log(1.0 - b1.conjugate() * b2))


def _w_of(beta: complex) -> complex:
    return (1.0 + beta) / (1.0 - beta)


def _log_prefactor(beta: complex, s: float) -> float:
    return s * math.log1p(-abs(beta) ** 2) - 0.5 * log_gamma(2.0 * s)


def wavefunction_series(label, s: float, y, n_terms: int):
    """Coordinate wavefunction of |beta> as a truncated Laguerre series.

    (1-|b|^2)^s Gamma(2s)^{-1/2} y^s e^{-y/2} sum_{n < n_terms} b^n L_n^{2s-1}(y),
    summed in ascending n with a fixed order.
    """
    label = _as_label(label)
    s = _check_s(s)
    n_terms = int(n_terms)
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr <= 0.0) or not np.all(np.isfinite(y_arr)):
        raise DomainError("y must be positive and finite")
    b = label.beta
    lag = laguerre_sequence(n_terms - 1, 2.0 * s - 1.0, y_arr)
    powers = np.power(b, np.arange(n_terms))
    series = np.tensordot(powers, lag, axes=(0, 0))
    with np.errstate(under="ignore"):
        env = np.exp(_log_prefactor(b, s) + s * np.log(y_arr) - 0.5 * y_arr)
    out = env * series
    return complex(out) if np.ndim(y) == 0 else out


def wavefunction_closed(label, s: float, y):
    """Closed form of the same wavefunction, via one complex exponential.

    (1-|b|^2)^s Gamma(2s)^{-1/2} (1-b)^{-2s} y^s exp(-(y/2)(1+b)/(1-b)),
    principal branch of (1-b)^{-2s}. The whole expression is assembled in
    the exponent, so extreme y cannot overflow on the way.
    """
    label = _as_label(label)
    s = _check_s(s)
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr <= 0.0) or not np.all(np.isfinite(y_arr)):
        raise DomainError("y must be positive and finite")
    b = label.beta
    w = _w_of(b)
    const = (_log_prefactor(b, s) - 2.0 * s * cmath.log(1.0 - b))
    with np.errstate(under="ignore"):
        out = np.exp(const + s * np.log(y_arr) - 0.5 * w * y_arr)
    return complex(out) if np.ndim(y) == 0 else out


def to_phase_space(label, s: float) -> PhaseSpaceLabel:
    """(x, p) = (ln Re w, s Im w / Re w) with w = (1+beta)/(1-beta)."""
    label = _as_label(label)
    s = _check_s(s)
    w = _w_of(label.beta)
    return PhaseSpaceLabel(x_tilde=math.log(w.real),
                           p_tilde=s * w.imag / w.real)


def from_phase_space(ps: PhaseSpaceLabel, s: float) -> CoherentLabel:
    """Inverse map: w = e^x (1 + i p/s), beta = (w-1)/(w+1)."""
    if not isinstance(ps, PhaseSpaceLabel):
        ps = PhaseSpaceLabel(*ps)
    s = _check_s(s)
    w = math.exp(ps.x_tilde) * (1.0 + 1j * ps.p_tilde / s)
    return CoherentLabel((w - 1.0) / (w + 1.0))


def phase_factor(label, s: float) -> complex:
    """Unit-modulus factor (|1-beta| / (1-beta))^{2s}, principal branch."""
    label = _as_label(label)
    s = _check_s(s)
    return cmath.exp(-2.0j * s * cmath.phase(1.0 - label.beta))


_EXPECT_TOL = 1e-8


def _expectation_quadrature(beta: complex, s: float):
    # Trapezoid in x around the density's center; the integrand decays
    # double-exponentially to the left and like e^{-2s(x - x_c)} to the
    # right, so this converges spectrally. Window and resolution are fixed
    # for determinism.
    w = _w_of(beta)
    x_c = math.log(w.real)
    x = np.linspace(x_c - 9.0, x_c + 36.0, 4001)
    h = x[1] - x[0]
    y = y_from_x(x)
    phi = wavefunction_closed(beta, s, y)
    dens = (phi.conj() * phi).real
    norm = np.trapezoid(dens, dx=h)
    mean_x = np.trapezoid(x * dens, dx=h)
    mean_y = np.trapezoid(y * dens, dx=h)
    # <P> from i y d/dy acting on the closed form: y phi' = (s - y w/2) phi.
    mean_p = 0.5 * w.imag * mean_y
    return norm, mean_x, mean_p


def expectation_X(label, s: float) -> float:
    """<X> in |beta>: x_tilde plus the ground-state offset ln 2 - psi(2s).

    Cross-checked against direct quadrature of x |phi_beta(x)|^2 on every
    call; disagreement beyond 1e-8 raises, since it would mean the closed
    form and the wavefunction have drifted apart.
    """
    label = _as_label(label)
    s = _check_s(s)
    value = to_phase_space(label, s).x_tilde + ground_x_expectation(s)
    norm, mean_x, _ = _expectation_quadrature(label.beta, s)
    quad = mean_x / norm
    if abs(quad - value) > _EXPECT_TOL:
        raise ConsistencyError(
            f"<X> formula {value} vs quadrature {quad} disagree")
    return value


def expectation_P(label, s: float) -> float:
    """<P> in |beta>: exactly p_tilde; quadrature-checked like expectation_X."""
    label = _as_label(label)
    s = _check_s(s)
    value = to_phase_space(label, s).p_tilde
    norm, _, mean_p = _expectation_quadrature(label.beta, s)
    quad = mean_p / norm
    if abs(quad - value) > _EXPECT_TOL:
        raise ConsistencyError(
            f"<P> formula {value} vs quadrature {quad} disagree")
    return value


def _jacobi01_rule(n: int, b: float):
    """Gauss rule for the weight u^b on [0, 1] (Golub-Welsch, closed-form
    recurrence coefficients of the shifted Jacobi polynomials)."""
    import scipy.linalg

    k = np.arange(n, dtype=float)
    # Recurrence on [-1, 1] for weight (1+t)^b, mapped to [0, 1].
    with np.errstate(invalid="ignore", divide="ignore"):
        alpha = np.where(k == 0, b / (b + 2.0),
                         b * b / ((2.0 * k + b) * (2.0 * k + b + 2.0)))
        beta_k = (4.0 * k * k * (k + b) ** 2
                  / ((2.0 * k + b) ** 2 * (2.0 * k + b + 1.0)
                     * (2.0 * k + b - 1.0)))
    diag = (1.0 + alpha) / 2.0
    off = np.sqrt(beta_k[1:]) / 2.0
    nodes, vecs = scipy.linalg.eigh_tridiagonal(diag, off)
    weights = vecs[0, :] ** 2 / (b + 1.0)
    return nodes, weights


def _disk_panel(s: float, m_basis: int, radii: np.ndarray,
                angles: np.ndarray) -> np.ndarray:
    # f[n, i, j] = sqrt(C(n+2s-1, n)) (r_i e^{i th_j})^n; the (1-r^2)^s
    # normalization is cancelled against the measure by the caller.
    n = np.arange(m_basis)
    log_b = _log_binom_sqrt(s, m_basis)
    with np.errstate(under="ignore"):
        rad = np.exp(log_b[:, None] + n[:, None] * np.log(radii)[None, :])
    phase = np.exp(1j * n[:, None] * angles[None, :])
    return rad[:, :, None] * phase[:, None, :]


def resolution_of_unity(s: float, m_basis: int, n_radial: int = 200,
                        n_angular: int = 64) -> np.ndarray:
    """Integral of |beta><beta| over the disk with the invariant measure.

    The measure is (2s-1)(1-|beta|^2)^{-2} dRe dIm, integrable only for
    s > 1/2. In polar form the angle is handled by a uniform trapezoid
    (exact for the finite Fourier content of a truncated basis) and the
    radius by the substitution u = 1 - r^2, which turns the integrand's
    u^{2s} / u^2 into the Jacobi weight u^{2s-2} on [0, 1], handled by a
    dedicated Gauss rule. Returns the m_basis x m_basis matrix, which
    converges to pi times the identity.
    """
    s = _check_s(s)
    if s <= 0.5:
        raise DomainError("the disk measure needs s > 1/2")
    m_basis = int(m_basis)
    if m_basis < 1:
        raise DomainError("m_basis must be >= 1")
    n_radial = int(n_radial)
    n_angular = int(n_angular)
    if n_radial < 2 or n_angular < 2 * m_basis:
        raise DomainError("quadrature sizes too small for this truncation")
    u_nodes, u_weights = _jacobi01_rule(n_radial, 2.0 * s - 2.0)
    radii = np.sqrt(1.0 - u_nodes)
    angles = 2.0 * math.pi * np.arange(n_angular) / n_angular
    panel = _disk_panel(s, m_basis, radii, angles)
    # angle weight 2 pi / n_angular; radial du carries 1/2 from r dr.
    weighted = panel * u_weights[None, :, None]
    out = np.einsum("nij,mij->nm", weighted.conj(), panel)
    out *= (2.0 * s - 1.0) * math.pi / n_angular
    return out


def phase_space_tail_estimate(s: float, m_basis: int,
                              box: tuple[float, float]) -> float:
    """Estimated mass the phase-space check drops outside its box.

    The entry-wise envelope of the integrand is bounded by
    (2s-1)/(4s) b_n b_m (1-|beta|^2)^{2s} with b_n the binomial square
    roots; in the sheared coordinates (x, q = p e^{x}) the q integral of
    the envelope has a closed incomplete-Beta form and the x integral is a
    fine trapezoid of a smooth positive function. This is an upper estimate
    of the envelope mass, not a certified bound on the oscillatory error.
    """
    s = _check_s(s)
    if s <= 0.5:
        raise DomainError("the phase-space measure needs s > 1/2")
    m_basis = int(m_basis)
    box_x, box_q = float(box[0]), float(box[1])
    if box_x <= 0.0 or box_q <= 0.0:
        raise DomainError("box extents must be positive")
    a_exp = 4.0 * s - 2.0
    half_beta = 0.5 * math.exp(log_gamma(0.5) + log_gamma(2.0 * s - 0.5)
                               - log_gamma(2.0 * s))

    def q_integral(x: np.ndarray, q_cut: float | None) -> np.ndarray:
        d_sqrt = 1.0 + np.exp(x)
        if q_cut is None:
            frac = 1.0
        else:
            phi = np.arctan(q_cut / (s * d_sqrt))
            u0 = np.sin(phi) ** 2
            frac = 1.0 - scipy.special.betainc(0.5, 2.0 * s - 0.5, u0)
        return 2.0 * s * d_sqrt ** (1.0 - 4.0 * s) * half_beta * frac

    def envelope(x: np.ndarray, q_cut: float | None) -> np.ndarray:
        # e^{-x} (4 e^x / (1 + e^x)^2)^{2s}, assembled with logaddexp so
        # large |x| cannot overflow.
        with np.errstate(under="ignore"):
            core = np.exp(2.0 * s * (math.log(4.0) + x
                                     - 2.0 * np.logaddexp(0.0, x)) - x)
        return core * q_integral(x, q_cut)

    # |q| > Q strip, all x.
    x_wide = np.linspace(-box_x - 40.0, box_x + 40.0, 4001)
    piece_q = np.trapezoid(envelope(x_wide, box_q), dx=x_wide[1] - x_wide[0])
    # |x| > X strips, all q.
    x_right = np.linspace(box_x, box_x + 60.0, 2001)
    x_left = np.linspace(-box_x - 60.0, -box_x, 2001)
    piece_x = (np.trapezoid(envelope(x_right, None), dx=x_right[1] - x_right[0])
               + np.trapezoid(envelope(x_left, None), dx=x_left[1] - x_left[0]))
    b_max_sq = math.exp(2.0 * _log_binom_sqrt(s, m_basis)[-1])
    return (2.0 * s - 1.0) / (4.0 * s) * b_max_sq * (piece_q + piece_x)


def _ps_node_counts(s: float, m_basis: int, box_x: float, box_q: float,
                    n_x: int | None, n_p: int | None) -> tuple[int, int]:
    # Resolve the fastest angular oscillation (n - m) arg beta at roughly
    # eight points per period, plus a safety floor.
    if n_x is None:
        n_x = int(8.0 * box_x * max(m_basis - 1, 1) / math.pi) + 64
    if n_p is None:
        n_p = int(8.0 * box_q * max(m_basis - 1, 1) / (math.pi * s)) + 64
    return int(n_x), int(n_p)


def phase_space_measure_check(s: float, m_basis: int,
                              box: tuple[float, float] = (10.0, 200.0),
                              n_x: int | None = None,
                              n_p: int | None = None) -> np.ndarray:
    """Resolution of unity in the (x, p) coordinates over a finite box.

    The density (2s-1)/(4s) dx dp equals the disk measure under the label
    change, so the returned m_basis x m_basis matrix converges to pi times
    the identity as the box grows; this operation is the numerical
    confirmation of that Jacobian identity.

    Box semantics: the integrand concentrates along the sheared curves
    p ~ const e^{-x}, so the box is taken in the coordinates
    (x, q = p e^{x}): |x| <= box[0], |q| <= box[1], with the e^{-x}
    Jacobian of q absorbed into the weights. A plain rectangle in (x, p)
    cuts through the support and stalls near 1e-1 deviation no matter how
    many nodes it gets; the sheared box reaches 1e-3 by (8, 80) and keeps
    improving (2.5e-6 at (12, 400) for s = 1.75, m_basis = 8).

    The mass dropped outside the box is estimated by
    phase_space_tail_estimate; when it exceeds 1e-6 a TruncationWarning
    carrying the estimate is issued, meaning no node count can push the
    agreement much below that level on this box. Node counts default to
    about eight points per period of the fastest oscillation.
    """
    s = _check_s(s)
    if s <= 0.5:
        raise DomainError("the phase-space measure needs s > 1/2")
    m_basis = int(m_basis)
    if m_basis < 1:
        raise DomainError("m_basis must be >= 1")
    box_x, box_q = float(box[0]), float(box[1])
    if box_x <= 0.0 or box_q <= 0.0:
        raise DomainError("box extents must be positive")
    n_x, n_p = _ps_node_counts(s, m_basis, box_x, box_q, n_x, n_p)

    tail = phase_space_tail_estimate(s, m_basis, box)
    if tail > 1e-6:
        warnings.warn(
            f"phase-space box {box} leaves an estimated envelope mass "
            f"{tail:.3e} outside; grow the box for tighter agreement",
            TruncationWarning, stacklevel=2)

    x_nodes = np.linspace(-box_x, box_x, n_x)
    q_nodes = np.linspace(-box_q, box_q, n_p)
    w_x = np.full(n_x, x_nodes[1] - x_nodes[0])
    w_x[0] *= 0.5
    w_x[-1] *= 0.5
    w_q = np.full(n_p, q_nodes[1] - q_nodes[0])
    w_q[0] *= 0.5
    w_q[-1] *= 0.5

    n = np.arange(m_basis)
    log_b = _log_binom_sqrt(s, m_basis)
    out = np.zeros((m_basis, m_basis), dtype=complex)
    # Row-by-row accumulation in a fixed order keeps memory flat and the
    # result independent of any chunking heuristics.
    for i in range(n_x):
        w = math.exp(x_nodes[i]) + 1j * q_nodes / s
        beta = (w - 1.0) / (w + 1.0)
        ab = np.abs(beta)
        log_g = np.log1p(-(ab * ab))
        with np.errstate(divide="ignore", invalid="ignore"):
            log_ab = np.where(ab > 0.0, np.log(ab), -np.inf)
            n_log = n[:, None] * log_ab[None, :]
        n_log[0, :] = 0.0  # n = 0 contributes |beta|^0 = 1 even at beta = 0
        with np.errstate(under="ignore"):
            mag = np.exp(s * log_g[None, :] + log_b[:, None] + n_log)
        col = mag * np.exp(1j * n[:, None] * np.angle(beta)[None, :])
        weight = w_x[i] * math.exp(-x_nodes[i]) * w_q
        out += np.einsum("nj,mj,j->nm", col.conj(), col, weight)
    out *= (2.0 * s - 1.0) / (4.0 * s)
    return out


def displacement_matrix(ps, s: float, n_dim: int,
                        ordering: str = "xp") -> np.ndarray:
    """Unitary displacement operator on the n_dim-truncated basis.

    Default "xp" ordering:
        D = e^{-i phi} e^{-i p} expm((x/2)(Adag - A)) expm((i/(2s)) p (A + Adag)).
    (Adag - A) is real antisymmetric and i (A + Adag) anti-Hermitian, so
    both factors are unitary and D is unitary to exponential-solver
    accuracy. The "px" ordering applies the factors the other way around
    with the matching phase e^{-i p e^{x}} and argument p e^{x}; the two
    orderings produce the same operator up to truncation effects and exist
    so that agreement can be tested rather than assumed.

    D e_0 reproduces the coefficient vector of the corresponding disk
    label, including its phase.
    """
    from .operators import matrix_A

    if not isinstance(ps, PhaseSpaceLabel):
        ps = PhaseSpaceLabel(*ps)
    s = _check_s(s)
    n_dim = int(n_dim)
    if n_dim < 2:
        raise DomainError("need n_dim >= 2")
    if ordering not in ("xp", "px"):
        raise DomainError("ordering must be 'xp' or 'px'")
    a = matrix_A(s, 0, n_dim).to_dense()
    ph = phase_factor(from_phase_space(ps, s), s)
    xt, pt = ps.x_tilde, ps.p_tilde
    if ordering == "xp":
        left = matrix_exp(0.5 * xt * (a.T - a))
        right = matrix_exp((0.5j / s) * pt * (a + a.T))
        return ph * cmath.exp(-1j * pt) * (left @ right)
    pe = pt * math.exp(xt)
    left = matrix_exp((0.5j / s) * pe * (a + a.T))
    right = matrix_exp(0.5 * xt * (a.T - a))
    return ph * cmath.exp(-1j * pe) * (left @ right)


def project_onto_basis(wavefunction, s: float, n_terms: int,
                       rule=None) -> np.ndarray:
    """Coefficients <n|f> = integral phi_n(y) f(y) dy/y for n < n_terms.

    `wavefunction` is a callable of y. The integral runs over the rule's
    nodes; nodes whose weights have underflowed to zero are skipped so the
    callable is never evaluated where it cannot contribute.
    """
    s = _check_s(s)
    n_terms = int(n_terms)
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")
    if rule is None:
        rule = gauss_laguerre_rule(200, 2.0 * s - 1.0)
    live = rule.weights > 0.0
    y = rule.nodes[live]
    w = rule.weights[live]
    f_vals = np.asarray([complex(wavefunction(float(yj))) for yj in y])
    # The rule's weight already carries y^{2s-1} e^{-y}; divide the basis
    # envelope and the measure's 1/y out of the integrand.
    lag = laguerre_sequence(n_terms - 1, 2.0 * s - 1.0, y)
    log_n = np.array([-0.5 * (log_gamma(n + 2.0 * s) - log_gamma(n + 1.0))
                      for n in range(n_terms)])
    rows = lag * np.exp(log_n)[:, None]
    with np.errstate(over="ignore"):
        strip = f_vals * np.exp(0.5 * y - s * np.log(y))
    if not np.all(np.isfinite(strip)):
        raise DomainError(
            "wavefunction values overflow once the basis envelope is "
            "divided out; use a rule with fewer points")
    return (rows * w) @ strip
