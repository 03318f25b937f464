"""
Quantum transfer matrix of the massless XXZ chain in the infinite Trotter
number limit.

    H = J Σ {σˣσˣ + σʸσʸ + Δ(σᶻσᶻ + 1)} - (h/2) Σ σᶻ,   Δ = cos ζ, η = -iζ

The auxiliary function 𝔞 solves a non-linear integral equation on a
rectangle around the origin which excludes ±η. Free energy, correlation
lengths, σᶻ amplitudes and the boundary magnetization are contour
integrals or Fredholm determinants built from it. All functions are
iπ-periodic.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConvergenceError, DomainError, SingularityError
from .fredholm import discrete_det
from .special import ContourDescriptor, Quadrature, contour_quadrature, derivative

logger = logging.getLogger(__name__)

HEIGHT_FRACTION = 0.3
# Size of the driving term on the short sides of the rectangle
DRIVING_TAIL = 1e-12
PANEL_LENGTH = 0.2
CORE = 3.0
SHORT_SIDE_POINTS = 16

NLIE_TOL = 1e-10
MAX_NEWTON = 60
OUTER_TOL = 1e-9
MAX_OUTER = 200
# Continuation of excited-state roots: initial steps per unit path, floor
# of the adaptive step, corrector budget per step and residual on the path
CONTINUATION_STEPS = 8
MIN_CONTINUATION_STEP = 1.0 / 512
CORRECTOR_STEPS = 8
PATH_TOL = 1e-6
FD_STEP = 1e-6
# Trust radius of one outer Newton step on the hole/particle positions
MAX_ROOT_STEP = 0.1

CONTOUR_CLEARANCE = 1e-3
SINGULAR = 1e-280
ANNULUS_FRACTION = 0.1
STENCIL_FRACTION = 1e-3
DEFAULT_THETA = (0.0, 0.0)


def _coth(z, order=0):
    """coth and its first two derivatives."""
    c = 1.0 / np.tanh(z)
    if order == 0:
        return c
    csch2 = c * c - 1.0
    if order == 1:
        return -csch2
    if order == 2:
        return 2.0 * csch2 * c
    raise DomainError(f"Unsupported coth derivative order {order}")


def _reduce(z):
    """Representative of z modulo iπ with |Im| <= π/2."""
    z = np.asarray(z, dtype=complex)
    return z - 1j * np.pi * np.round(z.imag / np.pi)


def theta_xxz(lam, eta, order=0):
    """
    Bare phase θ(λ) = ln[sinh(η-λ)/sinh(η+λ)] and its derivatives (order <= 3).

    Order 0 is the principal branch.
    """
    lam = np.asarray(lam, dtype=complex)
    if order == 0:
        return np.log(np.sinh(eta - lam) / np.sinh(eta + lam))
    k = order - 1
    return -((-1.0) ** k) * _coth(eta - lam, k) - _coth(eta + lam, k)


def driving_term(omega, J, eta, T, order=0):
    """-2J sinh²η / (T sinh ω sinh(ω+η)) = -(2J sinh η/T)(coth ω - coth(ω+η))."""
    omega = np.asarray(omega, dtype=complex)
    return -(2.0 * J * np.sinh(eta) / T) * (_coth(omega, order) - _coth(omega + eta, order))


def _log_one_plus(u):
    """
    ln(1 + e^u) on contour nodes, continuous along the node order.

    The phase of u is unwrapped starting from the node where |𝔞| is
    smallest, so any branch jump falls where ln(1+𝔞) ≈ 𝔞.
    """
    start = int(np.argmin(u.real))
    rolled = np.roll(u, -start)
    rolled = rolled.real + 1j * np.unwrap(rolled.imag)
    big = rolled.real > 0
    upper = np.where(big, rolled, 0.0)
    lower = np.where(big, 0.0, rolled)
    out = np.where(big, upper + np.log1p(np.exp(-upper)), np.log1p(np.exp(lower)))
    return np.roll(out, start)


def _fermi(u):
    """𝔞/(1+𝔞) = 1/(1+e^{-u})."""
    u = np.asarray(u, dtype=complex)
    big = u.real > 0
    upper = np.where(big, u, 0.0)
    lower = np.where(big, 0.0, u)
    return np.where(big, 1.0 / (1.0 + np.exp(-upper)), np.exp(lower) / (1.0 + np.exp(lower)))


@dataclass(frozen=True)
class QtmSolution:
    """
    Solution of the quantum transfer matrix equation on a contour.

    log_a holds ln 𝔞 on the nodes and log_one_plus the continuous
    ln(1+𝔞). h_prime is set for excited states, which may sit at a field
    different from the dominant one.
    """

    J: float
    zeta: float
    h: float
    T: float
    contour: ContourDescriptor
    nodes: np.ndarray
    weights: np.ndarray
    log_a: np.ndarray
    log_one_plus: np.ndarray
    holes: tuple = ()
    particles: tuple = ()
    h_prime: float = None
    iterations: int = 0
    residual: float = 0.0

    @property
    def eta(self):
        return -1j * self.zeta

    @property
    def field(self):
        return self.h if self.h_prime is None else self.h_prime

    @property
    def excited(self):
        return bool(self.holes or self.particles)

    def inside(self, z):
        """Whether points lie inside the contour (winding number)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        wind = (self.weights[None, :] / (self.nodes[None, :] - z[:, None])).sum(axis=1) / (2j * np.pi)
        return np.round(wind.real).astype(int) != 0

    def log_a_at(self, omega, order=0):
        """ln 𝔞 or its derivatives from the right-hand side of the equation."""
        omega = np.atleast_1d(np.asarray(omega, dtype=complex))
        eta = self.eta
        out = driving_term(omega, self.J, eta, self.T, order)
        if order == 0:
            out = out - self.field / self.T
        for x in self.holes:
            out = out + theta_xxz(omega - x, eta, order)
        for y in self.particles:
            out = out - theta_xxz(omega - y, eta, order)
        kern = theta_xxz(omega[:, None] - self.nodes[None, :], eta, order + 1)
        return out - (kern * self.weights) @ self.log_one_plus / (2j * np.pi)

    def a_at(self, omega):
        """
        𝔞 anywhere off the contour images C ± η.

        The integral representation changes branch across C ± η; the
        continuation multiplies by 1+𝔞(ω+η) or divides by 1+𝔞(ω-η) when
        those points fall inside the contour.
        """
        omega = _reduce(np.atleast_1d(np.asarray(omega, dtype=complex)))
        value = np.exp(self.log_a_at(omega))
        eta = self.eta
        up = self.inside(_reduce(omega + eta))
        if np.any(up):
            value[up] = value[up] * (1.0 + np.exp(self.log_a_at(_reduce(omega[up] + eta))))
        down = self.inside(_reduce(omega - eta))
        if np.any(down):
            value[down] = value[down] / (1.0 + np.exp(self.log_a_at(_reduce(omega[down] - eta))))
        return value


def _check_regime(zeta, T):
    if not 0.0 < zeta < np.pi:
        raise DomainError(f"Massless regime needs 0 < ζ < π, got ζ={zeta}")
    if T <= 0:
        raise DomainError(f"Temperature must be positive, got T={T}")


def qtm_contour(J, zeta, T, height_fraction=HEIGHT_FRACTION, cutoff=None):
    """
    Rectangle [-Λ, Λ] × [-γ, γ] with γ = height_fraction·ζ.

    Λ is chosen so the driving term is below DRIVING_TAIL on the short
    sides. The exclusion distance keeps the images of ±η off the contour.
    """
    _check_regime(zeta, T)
    exclusion = 0.5 * min(zeta, np.pi - zeta)
    if cutoff is None:
        scale = 8.0 * abs(J) * np.sin(zeta) ** 2 / (T * DRIVING_TAIL)
        cutoff = max(2.0, 0.5 * np.log(max(scale, 1.0)))
    return ContourDescriptor(
        kind="rectangle", center=0j, half_width=float(cutoff), half_height=height_fraction * zeta,
        points_per_side=SHORT_SIDE_POINTS, rule="gauss", panel_length=PANEL_LENGTH, core=CORE,
        exclusion=exclusion,
    )


def _solve_nlie(J, zeta, h, T, contour, holes=(), particles=(), h_prime=None, initial=None,
                tol=NLIE_TOL, max_iter=MAX_NEWTON):
    """Damped Newton iteration for ln 𝔞 on the contour nodes."""
    quad = contour_quadrature(contour)
    z, w = quad.nodes, quad.weights
    eta = -1j * zeta
    field = h if h_prime is None else h_prime
    source = driving_term(z, J, eta, T) - field / T
    for x in holes:
        source = source + theta_xxz(z - x, eta)
    for y in particles:
        source = source - theta_xxz(z - y, eta)
    kmat = theta_xxz(z[:, None] - z[None, :], eta, 1) * w[None, :] / (2j * np.pi)

    def residual(v):
        return v - source + kmat @ _log_one_plus(v)

    u = source.copy() if initial is None else np.array(initial, dtype=complex)
    r = residual(u)
    norm = float(np.max(np.abs(r)))
    iteration = 0
    while norm > tol:
        iteration += 1
        if iteration > max_iter or not np.isfinite(norm):
            logger.warning(f"QTM equation diverged at T={T}, ζ={zeta}, h={field}: residual {norm:.2e}")
            raise ConvergenceError(
                f"QTM non-linear integral equation did not converge at T={T} "
                f"(residual {norm:.2e}); try a smaller contour height",
                iterations=iteration - 1, residual=norm,
            )
        jac = np.eye(len(z)) + kmat * _fermi(u)[None, :]
        step = np.linalg.solve(jac, r)
        alpha = 1.0
        while True:
            trial = u - alpha * step
            r_trial = residual(trial)
            n_trial = float(np.max(np.abs(r_trial)))
            if n_trial < norm or alpha < 1e-4:
                break
            alpha *= 0.5
        u, r, norm = trial, r_trial, n_trial

    logger.debug(f"QTM equation T={T}, ζ={zeta}, h={field}: {iteration} Newton steps on "
                 f"{len(z)} nodes, residual {norm:.2e}")
    return QtmSolution(
        J=float(J), zeta=float(zeta), h=float(h), T=float(T), contour=contour, nodes=z, weights=w,
        log_a=u, log_one_plus=_log_one_plus(u),
        holes=tuple(complex(x) for x in holes), particles=tuple(complex(y) for y in particles),
        h_prime=None if h_prime is None else float(h_prime), iterations=iteration, residual=norm,
    )


def qtm_dominant(J, zeta, h, T, contour=None):
    """
    Auxiliary function of the dominant eigenvalue.

    Args:
        J: Exchange coupling
        zeta: Anisotropy, Δ = cos ζ (0 < ζ < π)
        h: Magnetic field
        T: Temperature
        contour: ContourDescriptor (default: qtm_contour)

    Returns:
        QtmSolution

    Raises:
        DomainError: Outside the massless regime or for a contour too close to ±η
        ConvergenceError: If Newton iteration diverges
    """
    _check_regime(zeta, T)
    contour = qtm_contour(J, zeta, T) if contour is None else contour
    return _solve_nlie(J, zeta, h, T, contour)


def free_energy_xxz(s):
    """f = -h/2 + 2J cos ζ - ∮ T sinh η / (sinh(ν+η) sinh ν) ln(1+𝔞) dν/2πi."""
    if s.excited:
        raise DomainError("Free energy needs the dominant solution")
    weight = s.T * (_coth(s.nodes) - _coth(s.nodes + s.eta))
    integral = np.sum(s.weights * weight * s.log_one_plus) / (2j * np.pi)
    f = -0.5 * s.h + 2.0 * s.J * np.cos(s.zeta) - integral
    if abs(f.imag) > 1e-8:
        logger.warning(f"Free energy has imaginary part {f.imag:.2e}")
    return float(f.real)


def magnetization(J, zeta, h, T, step=1e-4, contour=None):
    """Bulk ⟨σᶻ⟩ = -2 ∂f/∂h by a central difference on a shared contour."""
    contour = qtm_contour(J, zeta, T) if contour is None else contour
    upper = free_energy_xxz(qtm_dominant(J, zeta, h + step, T, contour))
    lower = free_energy_xxz(qtm_dominant(J, zeta, h - step, T, contour))
    return -(upper - lower) / step


def _check_positions(base, points, expected_inside):
    if len(points) == 0:
        return
    gap = np.min(np.abs(points[:, None] - base.nodes[None, :]), axis=1)
    if np.any(gap < CONTOUR_CLEARANCE):
        raise DomainError(f"Root guess within {CONTOUR_CLEARANCE} of the contour")
    wrong = base.inside(points) != expected_inside
    if np.any(wrong):
        raise DomainError(f"Holes must lie inside and particles outside the contour: {points[wrong]}")


def _source_shift(nodes, eta, holes, particles):
    """Hole and particle terms of the excited-state driving term on the nodes."""
    shift = np.zeros(len(nodes), dtype=complex)
    for x in holes:
        shift = shift + theta_xxz(nodes - x, eta)
    for y in particles:
        shift = shift - theta_xxz(nodes - y, eta)
    return shift


def _correct(solve, base, z, state, target, expected, tol, max_iter):
    """
    Newton iterations (finite-difference Jacobian) on 1 + 𝔞_μ(z) = target.

    Returns:
        tuple: (z, state, iterations used)
    """
    r = 1.0 + state.a_at(z) - target
    norm = float(np.max(np.abs(r)))
    for iteration in range(max_iter + 1):
        if norm <= tol:
            return z, state, iteration
        if iteration == max_iter:
            break
        jac = np.empty((len(z), len(z)), dtype=complex)
        for b in range(len(z)):
            step = FD_STEP * max(1.0, abs(z[b]))
            shifted = z.copy()
            shifted[b] += step
            moved = solve(shifted, state.log_a)
            jac[:, b] = (1.0 + moved.a_at(shifted) - target - r) / step
        dz = np.linalg.solve(jac, r)
        size = float(np.max(np.abs(dz)))
        if size > MAX_ROOT_STEP:
            dz *= MAX_ROOT_STEP / size
        z = z - dz
        if np.any(base.inside(z) != expected):
            raise ConvergenceError(f"Excited-state root migrated across the contour: {z}",
                                   iterations=iteration + 1, residual=norm)
        state = solve(z, state.log_a)
        r = 1.0 + state.a_at(z) - target
        norm = float(np.max(np.abs(r)))
    raise ConvergenceError(f"Corrector stalled at residual {norm:.2e}", iterations=max_iter, residual=norm)


def qtm_excited(base, holes=(), particles=(), h_prime=None, tol=OUTER_TOL, max_iter=MAX_OUTER):
    """
    Excited-state auxiliary function with self-consistent holes and particles.

    The conditions 1+𝔞_μ(x_a) = 0 and 1+𝔞_μ(y_a) = 0 are reached by
    continuation from the initial positions z₀: the path z(s) solves
    1+𝔞_μ(z) = (1-s)(1+𝔞_μ(z₀)) for s from 0 to 1, in steps that halve
    on failure. Every point of the path solves the inner equation seeded
    from the previous one.

    Args:
        base: Dominant QtmSolution (fixes J, ζ, h, T and the contour)
        holes: Initial hole positions inside the contour
        particles: Initial particle positions outside the contour
        h_prime: Field of the excited state (default: base.h)
        tol: Residual of the final conditions
        max_iter: Corrector iterations summed over the whole path

    Returns:
        QtmSolution with the converged holes and particles

    Raises:
        DomainError: On misplaced initial guesses
        ConvergenceError: If the path cannot be followed to s = 1
    """
    if base.excited:
        raise DomainError("Excited states are built on the dominant solution")
    field = base.h if h_prime is None else float(h_prime)
    n_h = len(holes)
    z = np.array(list(holes) + list(particles), dtype=complex)
    expected = np.arange(len(z)) < n_h
    _check_positions(base, z, expected)

    def solve(points, initial):
        return _solve_nlie(base.J, base.zeta, base.h, base.T, base.contour,
                           points[:n_h], points[n_h:], field, initial)

    seed = base.log_a + _source_shift(base.nodes, base.eta, z[:n_h], z[n_h:])
    state = solve(z, seed)
    if len(z) == 0:
        return state

    start = 1.0 + state.a_at(z)
    s, ds, used = 0.0, 1.0 / CONTINUATION_STEPS, 0
    while s < 1.0:
        target_s = min(1.0, s + ds)
        final = target_s == 1.0
        try:
            z_next, state_next, n = _correct(solve, base, z, state, (1.0 - target_s) * start, expected,
                                             tol if final else PATH_TOL, CORRECTOR_STEPS)
        except ConvergenceError as e:
            used += CORRECTOR_STEPS
            ds *= 0.5
            logger.debug(f"Continuation step at s={s:.4g} failed ({e}); step now {ds:.3g}")
            if ds < MIN_CONTINUATION_STEP or used > max_iter:
                logger.warning(f"Excited-state continuation stopped at s={s:.4g}")
                raise ConvergenceError(f"Excited-state roots could not be followed past s={s:.4g}",
                                       iterations=used, residual=e.residual)
            continue
        used += n
        z, state, s = z_next, state_next, target_s
        ds = min(2.0 * ds, 1.0 / CONTINUATION_STEPS)
        if used > max_iter and s < 1.0:
            raise ConvergenceError(f"Excited-state continuation exceeded {max_iter} corrector steps",
                                   iterations=used, residual=float(np.max(np.abs(start))) * (1.0 - s))
    logger.debug(f"Excited state holes={state.holes}, particles={state.particles}, h′={field}, "
                 f"{used} corrector steps")
    return state


def find_zeros(s, re_max=3.0, points=(13, 9), tol=1e-10, max_iter=50):
    """
    Zeros of 1+𝔞 found by Newton iteration from a grid in the period strip.

    Zeros near the origin (where the dominant roots accumulate) and near
    the contour or its images C ± η are discarded.

    Returns:
        tuple: (zeros inside the contour, zeros outside), sorted by |ω|
    """
    xs = np.linspace(-re_max, re_max, points[0])
    ys = np.linspace(-0.5 * np.pi, 0.5 * np.pi, points[1] + 2)[1:-1]
    starts = (xs[:, None] + 1j * ys[None, :]).ravel()
    eta = s.eta
    forbidden = np.concatenate([s.nodes, _reduce(s.nodes + eta), _reduce(s.nodes - eta)])

    def g(w):
        return 1.0 + s.a_at(w)

    found = []
    for w in starts:
        for _ in range(max_iter):
            value = g(w)[0]
            slope = derivative(g, np.array([w]), 1, step=1e-5)[0]
            if not np.isfinite(value) or slope == 0:
                break
            dw = value / slope
            if abs(dw) > MAX_ROOT_STEP:
                dw *= MAX_ROOT_STEP / abs(dw)
            w = complex(_reduce(w - dw))
            if abs(dw) < tol:
                break
        if abs(g(w)[0]) > 1e-8 or abs(w) < 0.1 or abs(w.real) > re_max:
            continue
        if np.min(np.abs(forbidden - w)) < 10.0 * CONTOUR_CLEARANCE:
            continue
        if all(abs(w - v) > 1e-6 for v in found):
            found.append(w)
    found.sort(key=abs)
    flags = s.inside(np.array(found)) if found else np.array([], dtype=bool)
    inside = [w for w, f in zip(found, flags) if f]
    outside = [w for w, f in zip(found, flags) if not f]
    logger.debug(f"Zeros of 1+𝔞: {len(inside)} inside, {len(outside)} outside the contour")
    return inside, outside


def _check_pair(dominant, excited):
    if dominant.excited:
        raise DomainError("First argument must be the dominant solution")
    if len(dominant.nodes) != len(excited.nodes) or np.any(dominant.nodes != excited.nodes):
        raise DomainError("Dominant and excited solutions live on different contours")


def _check_same_field(dominant, excited):
    if abs(excited.field - dominant.h) > 1e-12:
        raise DomainError(f"Excited state at h′={excited.field} differs from h={dominant.h}")


def _z_function(dominant, excited):
    return (dominant.log_one_plus - excited.log_one_plus) / (2j * np.pi)


def correlation_length(dominant, excited):
    """
    Eigenvalue ratio ρ of an excited state to the dominant one.

    ρ = exp{Σ_p ln[sinh(y+η)/sinh y] - Σ_h ln[sinh(x+η)/sinh x]
            + ∮ sinh η / (sinh(ν+η) sinh ν) 𝔷(ν) dν}
    with 𝔷 = ln[(1+𝔞_λ)/(1+𝔞_μ)]/2πi. The correlation length is -1/ln|ρ|.
    """
    _check_pair(dominant, excited)
    _check_same_field(dominant, excited)
    eta = dominant.eta
    weight = _coth(dominant.nodes) - _coth(dominant.nodes + eta)
    log_rho = np.sum(dominant.weights * weight * _z_function(dominant, excited))
    for y in excited.particles:
        log_rho += np.log(np.sinh(y + eta) / np.sinh(y))
    for x in excited.holes:
        log_rho -= np.log(np.sinh(x + eta) / np.sinh(x))
    return complex(np.exp(log_rho))


def _log_one_plus_derivatives(s):
    """First and second ω-derivatives of ln(1+𝔞) on the nodes."""
    u1 = s.log_a_at(s.nodes, 1)
    u2 = s.log_a_at(s.nodes, 2)
    sig = _fermi(s.log_a)
    return u1 * sig, u2 * sig + u1 * u1 * sig * (1.0 - sig)


def _double_integral(nodes, weights, eta, z, z1, z2):
    """
    ∮dω ∮_{C′⊂C}dν [coth′(ω-ν+η) - coth′(ω-ν)] 𝔷(ω)𝔷(ν).

    The nested coth′(ω-ν) part is integrated by parts and its boundary
    value taken on C, leaving ∮ coth(ω-ν)[𝔷′(ν) - 𝔷′(ω)] dν with the
    removable value -𝔷″(ω) on the diagonal.
    """
    diff = nodes[:, None] - nodes[None, :]
    shifted = (_coth(diff + eta, 1) * weights[None, :]) @ z
    with np.errstate(divide="ignore", invalid="ignore"):
        cot = _coth(diff)
    np.fill_diagonal(cot, 0.0)
    local = (cot * weights[None, :]) @ z1 - (cot @ weights) * z1 - weights * z2
    return np.sum(weights * z * (shifted - local))


def _cauchy_coth(nodes, weights, values, points):
    """iπ-periodic Cauchy transform ∮ f(ω) coth(ω - z) dω."""
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    return (_coth(nodes[None, :] - points[:, None]) * weights[None, :]) @ values


def _annulus(s):
    """Boundary of a thin annulus around the contour: outer ccw, inner cw."""
    c = s.contour
    delta = min(ANNULUS_FRACTION * s.zeta, 0.5 * (c.exclusion - c.half_height), 0.5 * c.half_height)
    outer = contour_quadrature(replace(c, half_width=c.half_width + delta,
                                       half_height=c.half_height + delta))
    inner = contour_quadrature(replace(c, half_width=c.half_width - delta,
                                       half_height=c.half_height - delta, counterclockwise=False))
    return Quadrature(nodes=np.concatenate([outer.nodes, inner.nodes]),
                      weights=np.concatenate([outer.weights, inner.weights]))


def _field_kernel(lam, eta, shift):
    """K(λ) = [coth(λ-η) - e^{shift} coth(λ+η)] / 2πi with shift = (h-h′)/T."""
    return (_coth(lam - eta) - np.exp(shift) * _coth(lam + eta)) / (2j * np.pi)


def _s_hat_parts(dominant, excited, theta, shift):
    """
    Amplitude functional without its (1 - e^{shift})² factor.

    Returns:
        tuple: (exponential of the double integral, determinant ratio)

    Raises:
        SingularityError: On a vanishing denominator or determinant
    """
    nodes, weights, eta = dominant.nodes, dominant.weights, dominant.eta
    z = _z_function(dominant, excited)
    d1_l, d2_l = _log_one_plus_derivatives(dominant)
    d1_m, d2_m = _log_one_plus_derivatives(excited)
    z1 = (d1_l - d1_m) / (2j * np.pi)
    z2 = (d2_l - d2_m) / (2j * np.pi)
    double = _double_integral(nodes, weights, eta, z, z1, z2)

    t1, t2 = theta
    edge = _cauchy_coth(nodes, weights, z, [t1 - eta, t1 + eta, t2 + eta, t2 - eta])
    e = np.exp(shift)
    den = (np.exp(-edge[0]) - e * np.exp(-edge[1])) * (np.exp(edge[2]) - e * np.exp(edge[3]))

    gamma = _annulus(dominant)
    om = gamma.nodes
    l0 = _cauchy_coth(nodes, weights, z, om)
    lm = _cauchy_coth(nodes, weights, z, om - eta)
    lp = _cauchy_coth(nodes, weights, z, om + eta)
    k_mat = _field_kernel(om[:, None] - om[None, :], eta, shift)
    row_den = np.exp(-lm) - e * np.exp(-lp)
    col_den = np.exp(lp) - e * np.exp(lm)
    if min(np.min(np.abs(row_den)), np.min(np.abs(col_den)), abs(den)) < SINGULAR:
        raise SingularityError("Vanishing denominator in the amplitude kernels")
    u_lambda = -(np.exp(-l0)[:, None] * (k_mat - _field_kernel(t1 - om, eta, shift)[None, :])) / row_den[:, None]
    u_mu = (np.exp(l0)[None, :] * (k_mat - _field_kernel(om - t2, eta, shift)[:, None])) / col_den[None, :]
    det_l = discrete_det(u_lambda, gamma.weights)
    det_m = discrete_det(u_mu, gamma.weights)

    k0 = _field_kernel(nodes[:, None] - nodes[None, :], eta, 0.0)
    det_kl = discrete_det(k0 * _fermi(dominant.log_a)[:, None], weights)
    det_km = discrete_det(k0 * _fermi(excited.log_a)[:, None], weights)
    if min(abs(det_kl), abs(det_km)) < SINGULAR:
        raise SingularityError("det[id + K̂] vanishes")
    logger.debug(f"Amplitude parts: double integral {double:.6g}, det U_λ {det_l:.6g}, "
                 f"det U_μ {det_m:.6g}, det K̂ {det_kl:.6g} / {det_km:.6g}")
    return complex(np.exp(double)), complex(det_l * det_m / (den * det_kl * det_km))


def _s_hat(dominant, excited, theta, h_prime):
    state = qtm_excited(dominant, excited.holes, excited.particles, h_prime=h_prime)
    shift = (dominant.h - h_prime) / dominant.T
    e, q = _s_hat_parts(dominant, state, theta, shift)
    return (1.0 - np.exp(shift)) ** 2 * e * q


def _stencil_second_derivative(dominant, excited, theta, step=None):
    step = STENCIL_FRACTION * dominant.T if step is None else step
    h = dominant.h
    values = {k: _s_hat(dominant, excited, theta, h + k * step) for k in (-2, -1, 1, 2)}
    # the functional vanishes at h′ = h
    return (-values[-2] + 16.0 * values[-1] + 16.0 * values[1] - values[2]) / (12.0 * step * step)


def amplitude_sigma_z(dominant, excited, theta=DEFAULT_THETA, method="closed", step=None):
    """
    σᶻσᶻ amplitude 𝒜 = -(2T²/ρ)(ρ-1)² ∂²Ŝ/∂h′² at h′ = h.

    Only the (1 - e^{(h-h′)/T})² factor of Ŝ vanishes at h′ = h, so the
    second derivative there is 2/T² times the rest ("closed"). The
    "stencil" method re-solves the excited state on a 5-point stencil in
    h′ and is used automatically when the closed form hits a singular
    denominator.

    Args:
        dominant: Dominant QtmSolution
        excited: Excited QtmSolution at h′ = h on the same contour
        theta: Free parameters (θ₁, θ₂); the result does not depend on them
        method: "closed" or "stencil"
        step: Stencil spacing (default 1e-3·T)

    Returns:
        complex amplitude
    """
    _check_pair(dominant, excited)
    _check_same_field(dominant, excited)
    if not excited.excited:
        raise DomainError("The dominant state has no amplitude with itself")
    rho = correlation_length(dominant, excited)
    if method == "closed":
        try:
            e, q = _s_hat_parts(dominant, excited, theta, 0.0)
            second = 2.0 * e * q / dominant.T**2
        except SingularityError as exc:
            logger.warning(f"Closed-form h′-derivative failed ({exc}); using the 5-point stencil")
            second = _stencil_second_derivative(dominant, excited, theta, step)
    elif method == "stencil":
        second = _stencil_second_derivative(dominant, excited, theta, step)
    else:
        raise DomainError(f"Unknown amplitude method '{method}'")
    return complex(-2.0 * dominant.T**2 / rho * (rho - 1.0) ** 2 * second)


def truncated_sigma_z_correlation(m, terms):
    """Σ ρⁿᵐ 𝒜ⁿ over (ρ, 𝒜) pairs: the connected ⟨σᶻ₁σᶻ_{m+1}⟩ truncated."""
    return float(np.real(sum(rho**m * amp for rho, amp in terms)))


def boundary_magnetization(s, xi):
    """
    ⟨σᶻ₁⟩ of the half-infinite chain with boundary field J sinh η coth ξ σᶻ₁.

    ⟨σᶻ₁⟩ = 1 + P·[δ 𝔞′/(1+𝔞) at -ξ + ∮ ln(1+𝔞)/sinh²(ω+ξ) dω/2πi],
    P = T sinh²ξ / (J sinh η), δ = 1 when -ξ lies inside the contour.
    The field is real for ξ on the imaginary axis.

    Raises:
        DomainError: For excited states, non-imaginary ξ or -ξ too close to the contour
    """
    if s.excited:
        raise DomainError("Boundary magnetization needs the dominant solution")
    xi = complex(xi)
    if abs(xi.real) > 1e-12:
        raise DomainError(f"Boundary field needs imaginary ξ, got {xi}")
    point = complex(_reduce(-xi))
    if np.min(np.abs(s.nodes - point)) < CONTOUR_CLEARANCE:
        raise DomainError(f"-ξ = {point} lies within {CONTOUR_CLEARANCE} of the contour")
    prefactor = s.T * np.sinh(xi) ** 2 / (s.J * np.sinh(s.eta))
    integral = np.sum(s.weights * s.log_one_plus / np.sinh(s.nodes + xi) ** 2) / (2j * np.pi)
    value = 1.0 + prefactor * integral
    if s.inside(point)[0]:
        u = s.log_a_at(point)
        value += prefactor * (s.log_a_at(point, 1) * _fermi(u))[0]
    if abs(value.imag) > 1e-8:
        logger.warning(f"Boundary magnetization has imaginary part {value.imag:.2e}")
    return float(value.real)
