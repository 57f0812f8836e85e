"""Single-qubit signal-processing circuits: construction, evaluation,
polynomial extraction, and phase-list predicates.

Convention (fixed throughout the package, "Wx"): a phase list
{phi_0, ..., phi_d} compiles to

    U = e^{i phi_0 Z} * prod_{k=1..d} [ W(x) e^{i phi_k Z} ],
    W(x) = e^{i arccos(x) X} = [[x, i*sqrt(1-x^2)], [i*sqrt(1-x^2), x]],

so the unitary has the form [[P, i*sqrt(1-x^2)*Q], [i*sqrt(1-x^2)*conj(Q), conj(P)]]
with deg P <= d, deg Q <= d-1. All extracted (P, Q) pairs in this package
use that frame. The frame with no i on the off-diagonal (used when stating
the reversal/negation symmetry maps) is reached by Q -> i*Q; that constant
change of frame is applied exactly where noted and nowhere else.

Extraction runs in extended precision (long double) because the leading
coefficients that phase synthesis consumes can sit many orders of
magnitude below the polynomial's scale.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL
from .errors import ArgumentError, ConsistencyError, DomainError
from .poly import ComplexPoly

_CD = np.clongdouble
_FD = np.longdouble
PI_LD = _FD("3.14159265358979323846264338327950288420")

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class PhaseList:
    """Ordered real angles (radians) defining a protocol; length d+1 gives degree <= d."""

    phases: np.ndarray
    convention = "Wx"

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.phases, dtype=float))
        if p.ndim != 1 or p.size < 1:
            raise ArgumentError("phase list must contain at least one angle")
        if not np.all(np.isfinite(p)):
            raise ArgumentError("phases must be finite")
        object.__setattr__(self, "phases", p.copy())

    def __len__(self) -> int:
        return self.phases.size

    def __iter__(self):
        return iter(self.phases)

    def __getitem__(self, i):
        return self.phases[i]

    @property
    def degree(self) -> int:
        return self.phases.size - 1


def as_phase_list(phi) -> PhaseList:
    if isinstance(phi, PhaseList):
        return phi
    return PhaseList(np.asarray(phi, dtype=float))


def is_antisymmetric(phi) -> bool:
    """Exact predicate: the list equals its reversed negation, with an exactly
    zero center for odd lengths."""
    p = as_phase_list(phi).phases
    n = p.size
    if n % 2 == 1 and p[n // 2] != 0.0:
        return False
    return bool(np.all(p == -p[::-1]))


def random_antisymmetric(degree: int, rng: np.random.Generator) -> PhaseList:
    """Antisymmetric list of length degree+1 with free half uniform in (-pi/2, pi/2)."""
    n = degree + 1
    half = rng.uniform(-np.pi / 2, np.pi / 2, n // 2)
    if n % 2 == 0:
        return PhaseList(np.concatenate([half, -half[::-1]]))
    return PhaseList(np.concatenate([half, [0.0], -half[::-1]]))


def _clamp_signal(x: float) -> float:
    if abs(x) > 1.0 + 1e-14:
        raise DomainError(f"signal must satisfy |x| <= 1, got {x}")
    return float(min(1.0, max(-1.0, x)))


def signal_oracle(x: float) -> np.ndarray:
    """W(x) = e^{i arccos(x) X}; top-left entry is x."""
    x = _clamp_signal(x)
    s = np.sqrt(1.0 - x * x)
    return np.array([[x, 1j * s], [1j * s, x]], dtype=complex)


def z_rotation(phi: float) -> np.ndarray:
    e = np.exp(1j * phi)
    return np.array([[e, 0.0], [0.0, np.conj(e)]], dtype=complex)


def evaluate(phi, x: float, oracle=None) -> np.ndarray:
    """Compile and evaluate the protocol at signal x.

    `oracle` replaces the standard W(x); it receives x and must return a
    2x2 array. Used for twisted oracles and nested protocols.
    """
    p = as_phase_list(phi)
    x = _clamp_signal(x)
    w = signal_oracle(x) if oracle is None else np.asarray(oracle(x), dtype=complex)
    u = z_rotation(p[0])
    for k in range(1, len(p)):
        u = u @ w @ z_rotation(p[k])
    return u


def is_unitary(u: np.ndarray, tol: float = 1e-12) -> bool:
    n = u.shape[0]
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(n))) <= tol)


# ---------------------------------------------------------------------------
# Extended-precision evaluation and extraction


def _evaluate_components_ld(phases: np.ndarray, xs: np.ndarray):
    """Vectorized extended-precision evaluation over a signal grid.

    Returns the four unitary entries (u00, u01, u10, u11) as arrays over xs.
    """
    x = np.asarray(xs, dtype=_FD)
    s = np.sqrt(_FD(1) - x * x)
    e = np.exp(1j * _CD(_FD(phases[0])))
    a = np.full(x.shape, e, dtype=_CD)
    b = np.zeros(x.shape, dtype=_CD)
    c = np.zeros(x.shape, dtype=_CD)
    d = np.full(x.shape, np.conj(e), dtype=_CD)
    xl = x.astype(_CD)
    sl = (1j * s.astype(_CD))
    for p in phases[1:]:
        e = np.exp(1j * _CD(_FD(p)))
        ec = np.conj(e)
        a, b = (a * xl + b * sl) * e, (a * sl + b * xl) * ec
        c, d = (c * xl + d * sl) * e, (c * sl + d * xl) * ec
    return a, b, c, d


@dataclass(frozen=True)
class PolyPair:
    """The embedded pair (P, Q) of a protocol, in the package frame.

    `cheb_p` / `cheb_q` hold the extended-precision Chebyshev coefficients
    the pair was interpolated in; synthesis prefers them over the public
    monomial coefficients because the monomial basis loses the tiny leading
    coefficients of deep protocols. For degrees past twenty the leading
    coefficients sink below even extended precision, so an arbitrary-
    precision copy (`mp_p` / `mp_q`, lists of mpmath numbers) rides along.
    """

    p: ComplexPoly
    q: ComplexPoly
    cheb_p: np.ndarray | None = None
    cheb_q: np.ndarray | None = None
    mp_p: list | None = None
    mp_q: list | None = None

    def identity_residual(self, grid: int = 101) -> float:
        from .poly import completion_residual

        return completion_residual(self.p, self.q, grid)


def _interpolate_cheb(values: np.ndarray, theta: np.ndarray) -> np.ndarray:
    n = values.size
    out = np.empty(n, dtype=_CD)
    for j in range(n):
        w = np.cos(_FD(j) * theta)
        out[j] = _FD(2 - (j == 0)) / _FD(n) * np.sum(values * w)
    return out


def extract_poly(phi, tol: float = 1e-9) -> PolyPair:
    """Interpolate (P, Q) from evaluations at d+1 Chebyshev nodes.

    P comes from the top-left entries, Q from top-right / (i*sqrt(1-x^2)).
    A held-out grid cross-check guards the interpolation; failure raises
    ConsistencyError.
    """
    p = as_phase_list(phi)
    d = p.degree
    n = d + 1
    theta = PI_LD * (np.arange(n, dtype=_FD) + _FD(0.5)) / _FD(n)
    nodes = np.cos(theta)
    u00, u01, _, _ = _evaluate_components_ld(p.phases, nodes)
    pv = u00
    qv = u01 / (1j * np.sqrt(_FD(1) - nodes * nodes).astype(_CD))
    cheb_p = _interpolate_cheb(pv, theta)
    cheb_q = _interpolate_cheb(qv, theta)
    # parity is exact for the compiled circuit; the complement is noise
    cheb_p[(d - 1) % 2 :: 2] = 0
    cheb_q[d % 2 :: 2] = 0
    cheb_q = cheb_q[:d] if d >= 1 else np.zeros(1, dtype=_CD)

    mp_p = mp_q = None
    if d > 14:
        mp_p, mp_q = _extract_mp(p.phases)
    pair = PolyPair(
        p=ComplexPoly(_cheb2poly_ld(cheb_p).astype(complex)),
        q=ComplexPoly(_cheb2poly_ld(cheb_q).astype(complex)) if d >= 1 else ComplexPoly.zero(),
        cheb_p=cheb_p,
        cheb_q=cheb_q,
        mp_p=mp_p,
        mp_q=mp_q,
    )

    check = np.cos(PI_LD * (np.arange(2 * n, dtype=_FD) + _FD(0.25)) / _FD(2 * n))
    check = check[: min(16, check.size)]
    c00, c01, _, _ = _evaluate_components_ld(p.phases, check)
    worst = 0.0
    for i, x in enumerate(check):
        s = np.sqrt(_FD(1) - x * x)
        worst = max(worst, abs(complex(c00[i]) - _chebval_ld(x, cheb_p)))
        worst = max(worst, abs(complex(c01[i]) - 1j * complex(s) * _chebval_ld(x, cheb_q)))
    if worst > tol:
        raise ConsistencyError(f"interpolation cross-check residual {worst:.3e} exceeds {tol:.1e}")
    return pair


def _chebval_ld(x, c) -> complex:
    if len(c) == 1:
        return complex(c[0])
    b0 = _CD(0)
    b1 = _CD(0)
    x2 = _CD(2) * _CD(x)
    for ck in c[::-1]:
        b0, b1 = ck + x2 * b0 - b1, b0
    return complex(b0 - _CD(x) * b1)


MP_DPS = 50  # working precision (decimal digits) of the arbitrary-precision lane


def _extract_mp(phases: np.ndarray) -> tuple[list, list]:
    """Arbitrary-precision Chebyshev extraction of (P, Q) for deep protocols.

    The leading coefficients behave like the product of the phase cosines,
    which sinks below any fixed precision as the degree grows; layer
    stripping consumes them directly, so past degree twenty the pair is
    interpolated again with mpmath.
    """
    import mpmath as mp

    with mp.workdps(MP_DPS):
        d = len(phases) - 1
        n = d + 1
        theta = [mp.pi * (j + mp.mpf(1) / 2) / n for j in range(n)]
        pv = []
        qv = []
        for th in theta:
            x = mp.cos(th)
            s = mp.sin(th)
            w00 = w11 = mp.mpc(x)
            w01 = w10 = mp.mpc(0, 1) * s
            e = mp.expjpi(mp.mpf(phases[0]) / mp.pi)
            u00, u01, u10, u11 = e, mp.mpc(0), mp.mpc(0), mp.conj(e)
            for ph in phases[1:]:
                e = mp.expjpi(mp.mpf(ph) / mp.pi)
                ec = mp.conj(e)
                a = u00 * w00 + u01 * w10
                b = u00 * w01 + u01 * w11
                c = u10 * w00 + u11 * w10
                dd = u10 * w01 + u11 * w11
                u00, u01, u10, u11 = a * e, b * ec, c * e, dd * ec
            pv.append(u00)
            qv.append(u01 / (mp.mpc(0, 1) * s))
        cp = []
        cq = []
        for j in range(n):
            wj = [mp.cos(j * th) for th in theta]
            sc = mp.mpf(2 - (j == 0)) / n
            cp.append(sc * mp.fsum(pv[i] * wj[i] for i in range(n)))
            cq.append(sc * mp.fsum(qv[i] * wj[i] for i in range(n)))
        # exact parity of the compiled circuit
        for j in range((d - 1) % 2, n, 2):
            cp[j] = mp.mpc(0)
        for j in range(d % 2, n, 2):
            cq[j] = mp.mpc(0)
        return cp, cq[:d] if d >= 1 else cq


def _cheb2poly_ld(c: np.ndarray) -> np.ndarray:
    """Chebyshev-to-monomial conversion carried out in extended precision."""
    n = len(c)
    if n < 3:
        out = np.array(c, dtype=_CD)
        return out
    c0 = np.array([c[-2]], dtype=_CD)
    c1 = np.array([c[-1]], dtype=_CD)
    for i in range(n - 1, 1, -1):
        tmp = c0
        c0 = _polysub_ld(np.array([c[i - 2]], dtype=_CD), c1)
        c1 = _polyadd_ld(tmp, _mulx_ld(c1) * _CD(2))
    return _polyadd_ld(c0, _mulx_ld(c1))


def _mulx_ld(c):
    out = np.zeros(len(c) + 1, dtype=_CD)
    out[1:] = c
    return out


def _polyadd_ld(a, b):
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=_CD)
    out[: len(a)] += a
    out[: len(b)] += b
    return out


def _polysub_ld(a, b):
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=_CD)
    out[: len(a)] += a
    out[: len(b)] -= b
    return out


# ---------------------------------------------------------------------------
# Predicates


def is_honest(phi) -> bool:
    """True iff the embedded P attains the maximal degree the list allows."""
    p = as_phase_list(phi)
    pair = extract_poly(p)
    if pair.p.degree != p.degree:
        return False
    d = p.degree
    lead = abs(pair.p.leading()) if pair.cheb_p is None else abs(complex(pair.cheb_p[d])) * (
        2.0 ** (d - 1) if d >= 1 else 1.0
    )
    return lead > 1e-9


def is_embeddable(phi, grid: int = None, tol: float = 1e-9) -> bool:
    """True iff the compiled unitary has a real diagonal on the whole grid and
    unit-magnitude corner value at x = +-1 (a rotation about an equatorial axis
    for every signal)."""
    p = as_phase_list(phi)
    if grid is None:
        grid = max(2 * len(p), 8)
    if grid < 2 * len(p):
        raise ArgumentError(f"grid must have at least {2 * len(p)} points")
    xs = np.cos(np.pi * (np.arange(grid) + 0.5) / grid)
    for x in xs:
        u = evaluate(p, x)
        if abs(u[0, 0].imag) > tol or abs(u[1, 1].imag) > tol:
            return False
    for x in (1.0, -1.0):
        if abs(abs(evaluate(p, x)[0, 0]) - 1.0) > tol:
            return False
    return True


def twisted_oracle(theta: float, x: float) -> np.ndarray:
    """Z-conjugated signal oracle e^{i theta Z} W(x) e^{-i theta Z}."""
    rz = z_rotation(theta)
    return rz @ signal_oracle(x) @ rz.conj().T


def verify_twist(phi, theta: float, grid: int = 33, tol: float = 1e-10) -> bool:
    """Check that running the protocol on twisted oracles equals conjugating
    the untwisted protocol unitary by the same z-rotation."""
    p = as_phase_list(phi)
    rz = z_rotation(theta)
    xs = np.cos(np.pi * (np.arange(grid) + 0.5) / grid)
    for x in xs:
        lhs = evaluate(p, x, oracle=lambda s: twisted_oracle(theta, s))
        rhs = rz @ evaluate(p, x) @ rz.conj().T
        if np.max(np.abs(lhs - rhs)) > tol:
            return False
    return True


# ---------------------------------------------------------------------------
# Group actions on phase lists


class GroupElement(enum.Enum):
    R = "R"  # reverse the list
    N = "N"  # negate every phase
    A = "A"  # +pi/2 on the first phase, -pi/2 on the last
    S = "S"  # +pi/2 on both the first and the last phase


def group_action(g, phi) -> PhaseList:
    """Apply a generator (or a string of generators, applied left to right)."""
    p = as_phase_list(phi).phases.copy()
    if isinstance(g, str):
        for ch in g:
            p = group_action(GroupElement(ch), p).phases
        return PhaseList(p)
    if g is GroupElement.R:
        p = p[::-1].copy()
    elif g is GroupElement.N:
        p = -p
    elif g is GroupElement.A:
        p[0] += np.pi / 2
        p[-1] -= np.pi / 2
    elif g is GroupElement.S:
        p[0] += np.pi / 2
        p[-1] += np.pi / 2
    else:
        raise ArgumentError(f"unknown group element {g!r}")
    return PhaseList(p)


# Induced maps on (P, Q) stated in the frame with no i on the off-diagonal
# (Q_frame = i * Q); pairs are (P-image, Q-image) as coefficient transforms.
_GROUP_TABLE = {
    GroupElement.R: (lambda P: P, lambda Q: ComplexPoly(-np.conj(Q.coeffs))),
    GroupElement.N: (lambda P: P.conj(), lambda Q: ComplexPoly(-np.conj(Q.coeffs))),
    GroupElement.A: (lambda P: P, lambda Q: ComplexPoly(-Q.coeffs)),
    GroupElement.S: (lambda P: ComplexPoly(-P.coeffs), lambda Q: Q),
}


def verify_group_action(g: GroupElement, phi, tol: float = 1e-9) -> float:
    """Max coefficient deviation between the extracted image of g.phi and the
    tabulated (P, Q) map. The table lives in the no-i frame, so extracted Q's
    are multiplied by i before comparison."""
    p = as_phase_list(phi)
    before = extract_poly(p)
    after = extract_poly(group_action(g, p))
    to_frame = lambda q: ComplexPoly(1j * q.coeffs)
    mp, mq = _GROUP_TABLE[g]
    dev_p = after.p.max_coeff_distance(mp(before.p))
    dev_q = to_frame(after.q).max_coeff_distance(mq(to_frame(before.q)))
    return max(dev_p, dev_q)
