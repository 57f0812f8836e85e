"""Antisymmetric phase synthesis by layer stripping.

Given a valid target pair (P, Q) -- P real, definite parity, determinantal
identity |P|^2 + (1-x^2)|Q|^2 = 1 -- the unique antisymmetric phase list is
recovered by repeatedly peeling one iterate off each end of the protocol:
the outermost phase phi satisfies e^{2i phi} = P_d / conj(Q_{d-1}) (ratio of
leading coefficients), and conjugating the inverse iterate through the
unitary maps (P, Q) to a pair of degree exactly two lower:

    P' = (2x^2 - 1) P + x (1 - x^2) (e^{-2i phi} Q + e^{2i phi} conj(Q))
    Q' = -2 x P + x^2 e^{-2i phi} Q - (1 - x^2) e^{2i phi} conj(Q)

Everything runs on Chebyshev coefficients in extended precision: the
(2x^2 - 1) and x(1 - x^2) multipliers are 2- and 3-term in that basis, and
the leading coefficients this recursion consumes are exponentially small in
the degree for deep protocols, which double precision cannot carry. A
damped Gauss-Newton polish against grid values of the target pair cleans up
whatever float error the stripping leaves when its self-check asks for it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, CapacityError, NumericError, PreconditionError
from .poly import ComplexPoly, Parity, completion_residual, fejer_riesz_complete, parity, sup_norm
from .qsp import (
    MP_DPS,
    PI_LD,
    PhaseList,
    PolyPair,
    _CD,
    _FD,
    _chebval_ld,
    _evaluate_components_ld,
    extract_poly,
    is_antisymmetric,
)

MAX_SYNTH_DEGREE = 512


@dataclass(frozen=True)
class AntisymmetricPhaseList:
    """Phase list equal to its reversed negation, plus its free half.

    Even length 2m: {h_0..h_{m-1}, -h_{m-1}..-h_0}; odd length 2m+1 carries
    an exactly zero center. Free-half entries live in [-pi/2, pi/2).
    """

    phases: PhaseList
    half: np.ndarray

    @classmethod
    def from_half(cls, half, center: bool) -> "AntisymmetricPhaseList":
        h = np.asarray(half, dtype=float)
        h = _reduce_domain(h)
        mirror = -h[::-1]
        if center:
            full = np.concatenate([h, [0.0], mirror])
        else:
            full = np.concatenate([h, mirror])
        return cls(PhaseList(full), h.copy())

    def __post_init__(self):
        if not is_antisymmetric(self.phases):
            raise ArgumentError("phase list is not exactly antisymmetric")


def _reduce_domain(h: np.ndarray) -> np.ndarray:
    """Reduce each angle mod pi into [-pi/2, pi/2)."""
    out = np.mod(np.asarray(h, dtype=float) + np.pi / 2, np.pi) - np.pi / 2
    out[out >= np.pi / 2] -= np.pi
    return out


@dataclass(frozen=True)
class ValidationResult:
    passed: bool
    violations: tuple[str, ...] = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class SynthesisReport:
    phases: AntisymmetricPhaseList
    residual: float
    steps: int
    polished: bool = False
    max_step_residual: float = 0.0


def validate_target(p: ComplexPoly, q: ComplexPoly, tol: float = 1e-9) -> ValidationResult:
    """Itemized diagnostic of the synthesis preconditions; never raises."""
    bad: list[str] = []
    if not p.is_real(1e-9):
        bad.append("P must have real coefficients")
    d = p.degree
    if q.degree != d - 1 and not (d == 0 and q.degree == 0 and abs(q.leading()) < 1e-12):
        bad.append(f"deg Q = {q.degree}, expected deg P - 1 = {d - 1}")
    if parity(p) is Parity.INDEFINITE or (d >= 1 and p.degree % 2 != d % 2):
        bad.append("P must have parity matching its degree")
    if q.degree >= 1 or abs(q.leading()) > 1e-12:
        if parity(q) is Parity.INDEFINITE or (d >= 1 and q.degree % 2 != (d - 1) % 2):
            bad.append("Q must have parity matching deg P - 1")
    resid = completion_residual(p, q, 201)
    if resid > tol:
        bad.append(f"determinantal identity residual {resid:.3e} exceeds {tol:.1e}")
    if d % 2 == 0 and d > 0 and p.leading().real <= 0:
        bad.append("even-degree P needs a positive leading coefficient")
    return ValidationResult(not bad, tuple(bad))


# ---------------------------------------------------------------------------
# Chebyshev helpers in extended precision


def _cheb_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # numpy's chebmul is a pair of convolutions; it preserves clongdouble
    return np.polynomial.chebyshev.chebmul(
        np.asarray(a, dtype=_CD), np.asarray(b, dtype=_CD)
    ).astype(_CD)


def _cheb_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=_CD)
    out[: len(a)] += a
    out[: len(b)] += b
    return out


_T2 = np.array([0, 0, 1], dtype=_CD)            # 2x^2 - 1
_X_1MX2 = np.array([0, 0.25, 0, -0.25], dtype=_CD)  # x(1 - x^2)
_X2 = np.array([0.5, 0, 0.5], dtype=_CD)        # x^2
_ONE_MX2 = np.array([0.5, 0, -0.5], dtype=_CD)  # 1 - x^2
_X = np.array([0, 1], dtype=_CD)


def _poly2cheb_ld(c: np.ndarray) -> np.ndarray:
    """Monomial-to-Chebyshev conversion in extended precision."""
    coeffs = np.asarray(c, dtype=_CD)
    res = np.zeros(1, dtype=_CD)
    for k in range(len(coeffs) - 1, -1, -1):
        res = _cheb_add(_cheb_mul(res, _X), np.array([coeffs[k]], dtype=_CD))
    return res


def _lead_mono(c: np.ndarray) -> complex:
    d = len(c) - 1
    return complex(c[d] * (_CD(2) ** (d - 1) if d >= 1 else _CD(1)))


def _truncate(c: np.ndarray, deg: int) -> tuple[np.ndarray, float]:
    out = np.zeros(max(deg + 1, 1), dtype=_CD)
    n = min(len(c), deg + 1)
    out[:n] = c[:n]
    resid = float(np.max(np.abs(c[deg + 1 :]))) if len(c) > deg + 1 else 0.0
    return out, resid


def _refine_step_angle(apply_step, phi0: float, state0):
    """Scalar search for the stripping angle minimizing the shed mass.

    Coarse scan over the half-period around the leading-coefficient estimate,
    then golden-section refinement. Deterministic and cheap: each probe is
    one application of the degree-reduction recurrences.
    """
    best_phi, best_state = phi0, state0
    for angle in phi0 + np.linspace(-np.pi / 2, np.pi / 2, 25)[1:-1]:
        state = apply_step(float(angle))
        if state[2] < best_state[2]:
            best_phi, best_state = float(angle), state
    lo, hi = best_phi - 0.09, best_phi + 0.09
    golden = 0.5 * (3.0 - np.sqrt(5.0))
    a, b = lo, hi
    x1 = a + golden * (b - a)
    x2 = b - golden * (b - a)
    f1 = apply_step(x1)
    f2 = apply_step(x2)
    for _ in range(40):
        if f1[2] < f2[2]:
            b, x2, f2 = x2, x1, f1
            x1 = a + golden * (b - a)
            f1 = apply_step(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = b - golden * (b - a)
            f2 = apply_step(x2)
        if b - a < 1e-13:
            break
    for phi, state in ((x1, f1), (x2, f2)):
        if state[2] < best_state[2]:
            best_phi, best_state = float(phi), state
    best_phi = float(np.mod(best_phi + np.pi / 2, np.pi) - np.pi / 2)
    return best_phi, best_state


def _strip_mp(cp: list, cq: list):
    """Layer stripping in arbitrary precision (mpmath) for deep protocols.

    Same recursion as the extended-precision path, but the working precision
    tracks however small the leading coefficients get, so no gates or
    polish are needed; inputs come from the mp extraction and are clean.
    """
    import mpmath as mp

    def cmul(a: list, b: list) -> list:
        out = [mp.mpc(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                if bj == 0:
                    continue
                v = ai * bj / 2
                out[i + j] += v
                out[abs(i - j)] += v
        return out

    def cadd(a: list, b: list, fb=1) -> list:
        n = max(len(a), len(b))
        out = [mp.mpc(0)] * n
        for i, ai in enumerate(a):
            out[i] += ai
        for i, bi in enumerate(b):
            out[i] += fb * bi
        return out

    def trunc(c: list, deg: int) -> list:
        out = c[: deg + 1] + [mp.mpc(0)] * max(0, deg + 1 - len(c))
        return out

    t2 = [mp.mpf(0), mp.mpf(0), mp.mpf(1)]
    x_1mx2 = [mp.mpf(0), mp.mpf("0.25"), mp.mpf(0), mp.mpf("-0.25")]
    x2 = [mp.mpf("0.5"), mp.mpf(0), mp.mpf("0.5")]
    one_mx2 = [mp.mpf("0.5"), mp.mpf(0), mp.mpf("-0.5")]
    x1 = [mp.mpf(0), mp.mpf(1)]

    with mp.workdps(MP_DPS):
        front: list[float] = []
        half_pi = mp.pi / 2
        while True:
            d = len(cp) - 1
            if d == 0:
                return front, None, True
            if d == 1:
                phi = mp.arg(cq[0]) / 2
                if phi >= half_pi:
                    phi -= mp.pi
                return front, float(phi), False
            lead_p = cp[d] * mp.mpf(2) ** (d - 1)
            lead_q = cq[d - 1] * mp.mpf(2) ** (d - 2)
            if lead_q == 0:
                u = mp.mpc(1)
            else:
                u = lead_p / mp.conj(lead_q)
                u = u / abs(u)
            phi = mp.arg(u) / 2
            if phi >= half_pi:
                phi -= mp.pi
            e2 = mp.expj(2 * phi)
            e2c = mp.conj(e2)
            rho = [e2c * a + e2 * mp.conj(a) for a in cq]
            cp_next = cadd(cmul(cp, t2), cmul(rho, x_1mx2))
            cq_next = cadd(
                cadd(cmul([e2c * a for a in cq], x2), cmul([e2 * mp.conj(a) for a in cq], one_mx2), fb=-1),
                cmul(cp, x1),
                fb=-2,
            )
            cp_next = trunc(cp_next, d - 2)
            cq_next = trunc(cq_next, d - 3)
            for j in range(((d - 2) + 1) % 2, len(cp_next), 2):
                cp_next[j] = mp.mpc(0)
            for j in range(((d - 3) + 1) % 2, len(cq_next), 2):
                cq_next[j] = mp.mpc(0)
            front.append(float(phi))
            cp, cq = cp_next, cq_next


def _strip(cp: np.ndarray, cq: np.ndarray, tol: float, strict: bool = True):
    """Peel phases outside-in; returns (front, last_or_None, has_center, worst_step_residual).

    In strict mode a failed degree drop or sub-leading cancellation raises;
    the lax mode records the residual and keeps going, for targets that are
    only pointwise-accurate and rely on the polish for the final digits.
    """
    front: list[float] = []
    worst = 0.0
    scale = float(max(np.max(np.abs(cp)), 1.0))
    step = 0
    while True:
        d = len(cp) - 1
        if d == 0:
            val = complex(cp[0])
            if strict and abs(val - 1.0) > 1e-6:
                raise PreconditionError(
                    f"stripping terminated at constant {val:.6f}, not the identity; "
                    "target is not in the antisymmetric class"
                )
            return front, None, True, worst
        if d == 1:
            phi = 0.5 * np.angle(complex(cq[0]))
            if phi >= np.pi / 2:
                phi -= np.pi
            if strict and complex(cp[1]).real < 0:
                raise PreconditionError(
                    "stripping terminated at -x; target is not in the antisymmetric class"
                )
            return front, float(phi), False, worst
        lead_p = _lead_mono(cp)
        lead_q = _lead_mono(cq)
        # |P_d| = |Q_(d-1)| holds for every unitary-consistent pair; test it only
        # when the leads stand clear of the extraction noise floor, otherwise the
        # phase estimate is provisional and the final polish owns the accuracy.
        healthy = max(abs(complex(cp[d])), abs(complex(cq[d - 1]))) > 1e-9 * scale
        if strict and healthy and (
            abs(lead_q) == 0.0
            or abs(abs(lead_p) - abs(lead_q)) > 0.2 * max(abs(lead_p), abs(lead_q))
        ):
            raise PreconditionError(
                f"leading coefficients |P_d| = {abs(lead_p):.3e} and |Q_(d-1)| = {abs(lead_q):.3e} "
                f"do not match at degree {d}; degree cannot drop, target is not in the "
                "antisymmetric class"
            )
        if abs(lead_q) == 0.0:
            u = _CD(1)
        else:
            u = lead_p / np.conj(lead_q)
            u /= abs(u)
        phi = 0.5 * np.angle(complex(u))
        if phi >= np.pi / 2:
            phi -= np.pi

        def apply_step(angle: float):
            e2 = np.exp(2j * _CD(_FD(angle)))
            rho = np.conj(e2) * cq + e2 * np.conj(cq)
            nxt_p = _cheb_add(_cheb_mul(cp, _T2), _cheb_mul(rho, _X_1MX2))
            nxt_q = _cheb_add(
                _cheb_add(
                    _cheb_mul(np.conj(e2) * cq, _X2), -_cheb_mul(e2 * np.conj(cq), _ONE_MX2)
                ),
                -_CD(2) * _cheb_mul(cp, _X),
            )
            nxt_p, r1 = _truncate(nxt_p, d - 2)
            nxt_q, r2 = _truncate(nxt_q, d - 3)
            return nxt_p, nxt_q, max(r1, r2) / scale

        cp_next, cq_next, step_resid = apply_step(phi)
        if not strict and step_resid > 1e-10:
            # off-manifold targets: choosing each angle to minimize the shed
            # mass is a greedy projection back onto the protocol manifold,
            # which keeps the inconsistency from compounding down the recursion
            phi, (cp_next, cq_next, step_resid) = _refine_step_angle(
                apply_step, phi, (cp_next, cq_next, step_resid)
            )
        # the truncated mass is the sub-leading-condition residual: round-off
        # for exact targets, larger for pointwise-accurate ones (completions)
        if strict and step_resid > 1e-3:
            raise NumericError(
                f"sub-leading condition violated at stripping step {step}: "
                f"residual {step_resid:.3e}"
            )
        worst = max(worst, step_resid)
        # parity of the stripped pair is exact; the complement is noise
        cp_next[((d - 2) + 1) % 2 :: 2] = 0
        cq_next[((d - 3) + 1) % 2 :: 2] = 0
        front.append(float(phi))
        cp, cq = cp_next, cq_next
        step += 1


# ---------------------------------------------------------------------------
# Gauss-Newton polish on grid values


def _value_gradients(full: np.ndarray, xs: np.ndarray):
    """Unitary top-row values and their exact phase gradients over a grid.

    With U = R_0 W R_1 W ... W R_d and prefix/tail products P_k, T_k around
    each rotation, dU/dphi_k = i (P_k sigma_z) T_k; one prefix sweep and one
    tail sweep give every gradient in O(d * grid).
    """
    x = np.asarray(xs, dtype=_FD)
    s = np.sqrt(_FD(1) - x * x)
    xl = x.astype(_CD)
    sl = (1j * s.astype(_CD))
    n = full.size
    g = x.size

    rot = [np.exp(1j * _CD(_FD(p))) for p in full]

    # tails T_k = R_k W T_{k+1}, T_{d} = R_d
    ta = np.empty((n, g), dtype=_CD)
    tb = np.empty((n, g), dtype=_CD)
    tc = np.empty((n, g), dtype=_CD)
    td = np.empty((n, g), dtype=_CD)
    e = rot[n - 1]
    ta[n - 1] = e
    tb[n - 1] = 0
    tc[n - 1] = 0
    td[n - 1] = np.conj(e)
    for k in range(n - 2, -1, -1):
        # W @ T_{k+1}
        wa = xl * ta[k + 1] + sl * tc[k + 1]
        wb = xl * tb[k + 1] + sl * td[k + 1]
        wc = sl * ta[k + 1] + xl * tc[k + 1]
        wd = sl * tb[k + 1] + xl * td[k + 1]
        e = rot[k]
        ta[k] = e * wa
        tb[k] = e * wb
        tc[k] = np.conj(e) * wc
        td[k] = np.conj(e) * wd

    ja = np.empty((n, g), dtype=_CD)
    jb = np.empty((n, g), dtype=_CD)
    # rolling prefix P_k (identity for k = 0)
    pa = np.ones(g, dtype=_CD)
    pb = np.zeros(g, dtype=_CD)
    pc = np.zeros(g, dtype=_CD)
    pd = np.ones(g, dtype=_CD)
    for k in range(n):
        ja[k] = 1j * (pa * ta[k] - pb * tc[k])
        jb[k] = 1j * (pa * tb[k] - pb * td[k])
        if k < n - 1:
            # P_{k+1} = P_k R_k W
            e = rot[k]
            qa, qb, qc, qd = pa * e, pb * np.conj(e), pc * e, pd * np.conj(e)
            pa = qa * xl + qb * sl
            pb = qa * sl + qb * xl
            pc = qc * xl + qd * sl
            pd = qc * sl + qd * xl
    a = ta[0]
    b = tb[0]
    return a, b, ja, jb


def _half_jacobian(ja, jb, m: int, center: bool):
    """Chain full-phase gradients onto the free half (mirror carries -1)."""
    n = ja.shape[0]
    cols_a = []
    cols_b = []
    for j in range(m):
        mirror = n - 1 - j
        cols_a.append(ja[j] - ja[mirror])
        cols_b.append(jb[j] - jb[mirror])
    return cols_a, cols_b


def _assemble(half: np.ndarray, center: bool) -> np.ndarray:
    h = np.asarray(half, dtype=float)
    if center:
        return np.concatenate([h, [0.0], -h[::-1]])
    return np.concatenate([h, -h[::-1]])


def _lm_values(h0: np.ndarray, center: bool, xs, tgt_p, tgt_q, iters: int, use_q: bool = True):
    """Levenberg-Marquardt on the unitary entries over a fixed grid.

    Gradients come from the prefix/tail product formula, so steps are exact
    to round-off; tgt_q may be ignored (corner-only fit) with use_q=False.
    """
    h = np.asarray(h0, dtype=float).copy()
    m = h.size
    lam = 1e-9
    best = None
    r = None
    for _ in range(iters):
        a, b, ja, jb = _value_gradients(_assemble(h, center), xs)
        parts = [a - tgt_p] + ([b - tgt_q] if use_q else [])
        rv = np.concatenate(parts)
        r = np.concatenate([rv.real.astype(float), rv.imag.astype(float)])
        nrm = float(np.linalg.norm(r))
        if best is None:
            best = nrm
        cols_a, cols_b = _half_jacobian(ja, jb, m, center)
        jac_cols = []
        for j in range(m):
            col = np.concatenate([cols_a[j]] + ([cols_b[j]] if use_q else []))
            jac_cols.append(np.concatenate([col.real.astype(float), col.imag.astype(float)]))
        jac = np.column_stack(jac_cols)
        try:
            dh = np.linalg.solve(jac.T @ jac + lam * np.eye(m), -(jac.T @ r))
        except np.linalg.LinAlgError:
            break
        hn = h + dh
        an, bn, _, _ = _value_gradients(_assemble(hn, center), xs)
        parts_n = [an - tgt_p] + ([bn - tgt_q] if use_q else [])
        rvn = np.concatenate(parts_n)
        nn = float(np.linalg.norm(np.concatenate([rvn.real.astype(float), rvn.imag.astype(float)])))
        if nn < best:
            h, best = hn, nn
            lam = max(lam * 0.25, 1e-12)
            if best < 1e-16 * r.size:
                break
        else:
            lam *= 8.0
            if lam > 1e8:
                break
    return h, best if best is not None else 0.0


def _polish(half0: np.ndarray, center: bool, cp: np.ndarray, cq: np.ndarray, iters: int = 30):
    """Refine the free half against the target values by continuation.

    The target values are approached from the values of the protocol the
    stripping produced: blending between them drags the solution through
    its own basin instead of asking for a cold jump, which matters when the
    stripped skeleton is noisy (off-manifold targets).
    """
    d = len(cp) - 1
    m = 2 * (d + 1)
    theta = PI_LD * (np.arange(m, dtype=_FD) + _FD(0.5)) / _FD(m)
    xs = np.cos(theta)
    s = np.sqrt(_FD(1) - xs * xs)
    tgt_p = np.array([_chebval_ld(x, cp) for x in xs], dtype=_CD)
    tgt_q = np.array([_chebval_ld(x, cq) for x in xs], dtype=_CD) * (1j * s).astype(_CD)

    h = np.asarray(half0, dtype=float).copy()
    a0, b0, _, _ = _evaluate_components_ld(_assemble(h, center), xs)
    gap = max(
        float(np.max(np.abs(a0 - tgt_p))),
        float(np.max(np.abs(b0 - tgt_q))),
    )
    stages = [1.0] if gap < 1e-4 else [0.25, 0.5, 0.75, 1.0]
    for t in stages:
        tp = (1.0 - t) * a0 + t * tgt_p
        tq = (1.0 - t) * b0 + t * tgt_q
        h, _ = _lm_values(h, center, xs, tp.astype(_CD), tq.astype(_CD), iters)
    return _reduce_domain(h)


# ---------------------------------------------------------------------------
# Public entry points


def _cheb_targets(p, q):
    mp_pair = None
    if isinstance(p, PolyPair):
        pair = p
        if pair.mp_p is not None and pair.mp_q is not None:
            mp_pair = (pair.mp_p, pair.mp_q)
        if pair.cheb_p is not None and pair.cheb_q is not None:
            return pair.cheb_p.astype(_CD), pair.cheb_q.astype(_CD), pair.p, pair.q, mp_pair
        p, q = pair.p, pair.q
    if q is None:
        raise ArgumentError("synthesize needs both P and Q (or a PolyPair)")

    def lift(poly: ComplexPoly) -> np.ndarray:
        if poly.cheb is not None:
            return poly.cheb.astype(_CD)
        return _poly2cheb_ld(poly.coeffs)

    return lift(p), lift(q), p, q, mp_pair


def synthesize(p, q: ComplexPoly | None = None, tol: float = 1e-8) -> SynthesisReport:
    """Recover the unique antisymmetric phase list embedding the pair (P, Q).

    Accepts either (ComplexPoly, ComplexPoly) or a single PolyPair (whose
    extended-precision Chebyshev cache is then used directly). The report
    residual is the max Chebyshev-coefficient mismatch between the target
    pair and the pair re-extracted from the synthesized phases.
    """
    cp, cq, p_in, q_in, mp_pair = _cheb_targets(p, q)
    check = validate_target(p_in, q_in, max(tol, 1e-9))
    if not check:
        raise PreconditionError("invalid synthesis target: " + "; ".join(check.violations))
    d = len(cp) - 1
    if d > MAX_SYNTH_DEGREE:
        raise CapacityError(f"synthesis degree cap is {MAX_SYNTH_DEGREE}, got {d}")

    # normalize array lengths: deg Q = deg P - 1
    if d >= 1:
        cq = cq[:d] if len(cq) >= d else np.concatenate([cq, np.zeros(d - len(cq), dtype=_CD)])

    strict_error: Exception | None = None
    step_resid = 0.0
    if mp_pair is not None:
        front, last, has_center = _strip_mp(list(mp_pair[0]), list(mp_pair[1]))
    else:
        try:
            front, last, has_center, step_resid = _strip(cp.copy(), cq.copy(), tol, strict=True)
        except (NumericError, PreconditionError) as exc:
            # the target may simply be off the exact unitary manifold
            # (pointwise-accurate completion); take the noisy stripped skeleton
            # and let the value polish carry the accuracy
            strict_error = exc
            front, last, has_center, step_resid = _strip(cp.copy(), cq.copy(), tol, strict=False)
    half = np.array(front + ([] if last is None else [last]), dtype=float)
    steps = len(front) + (0 if last is None else 1)

    result = AntisymmetricPhaseList.from_half(half, has_center)
    residual = _reextraction_residual(result, cp, cq)
    polished = False
    # the exact stripping path tracks the unique phase list; the value polish
    # only ever runs as a rescue, because near-honesty-boundary targets have
    # wide residual valleys where optimization can drift between equivalent
    # solutions even as the residual improves
    if residual > tol and half.size > 0:
        half2 = _polish(half, has_center, cp, cq)
        candidate = AntisymmetricPhaseList.from_half(half2, has_center)
        residual2 = _reextraction_residual(candidate, cp, cq)
        if residual2 < residual:
            result, residual, polished = candidate, residual2, True
    if residual > tol:
        if strict_error is not None:
            raise strict_error
        raise NumericError(f"synthesis residual {residual:.3e} exceeds tolerance {tol:.1e}")
    return SynthesisReport(
        phases=result,
        residual=residual,
        steps=steps,
        polished=polished,
        max_step_residual=step_resid,
    )


def _reextraction_residual(result: AntisymmetricPhaseList, cp: np.ndarray, cq: np.ndarray) -> float:
    back = extract_poly(result.phases)
    rp = _cheb_add(back.cheb_p, -cp)
    rq = _cheb_add(back.cheb_q, -cq) if len(cq) else np.zeros(1, dtype=_CD)
    return float(max(np.max(np.abs(rp)), np.max(np.abs(rq)) if rq.size else 0.0))


def _continuation_from_p(cp: np.ndarray, tol: float):
    """Phases for a corner target by continuation from the zero-phase protocol.

    The zero-phase list embeds the top Chebyshev polynomial exactly, and the
    segment from it to the target stays inside the achievable class (convex
    in value, parity and endpoint values preserved); marching the segment
    with corner-only Gauss-Newton refits keeps every step in-basin, with the
    step size halved whenever a waypoint will not converge.
    """
    d = len(cp) - 1
    center = d % 2 == 0
    n_half = (d + 1) // 2
    m = 2 * (d + 1)
    theta = PI_LD * (np.arange(m, dtype=_FD) + _FD(0.5)) / _FD(m)
    xs = np.cos(theta)
    tgt = np.array([_chebval_ld(x, cp) for x in xs], dtype=_CD)
    dummy_q = np.zeros_like(tgt)

    # the all-zero list is a symmetry point where the corner map loses rank
    # (the leading coefficient is even in every phase); a small deterministic
    # offset gives a generic, still nearly-top-Chebyshev starting protocol
    h = 0.02 * np.sin(1.0 + np.arange(n_half))
    start, _, _, _ = _value_gradients(_assemble(h, center), xs)
    t = 0.0
    dt = 0.02
    # waypoints only need to stay within the convergence basin of the next
    # step; the final pass below does the actual tightening
    inner_tol = 1e-3 * np.sqrt(2.0 * m)
    while t < 1.0:
        t_next = min(1.0, t + dt)
        target = ((1.0 - t_next) * start + t_next * tgt).astype(_CD)
        h_try, best = _lm_values(h, center, xs, target, dummy_q, 30, use_q=False)
        if best <= inner_tol:
            h, t = h_try, t_next
            dt = min(1.6 * dt, 0.1)
        else:
            dt *= 0.5
            if dt < 1e-4:
                raise NumericError(
                    f"corner continuation stalled at t = {t:.6f} (waypoint residual {best:.2e})"
                )
    # final tightening at the target itself
    h, _ = _lm_values(h, center, xs, tgt, dummy_q, 250, use_q=False)
    return _reduce_domain(h), center


def synthesize_from_P(p: ComplexPoly, tol: float = 1e-8) -> SynthesisReport:
    """One-sided completion: Fejer-Riesz the companion Q, then synthesize.

    Checks the completion preconditions (real, definite parity, 1-bound,
    |P(+-1)| = 1, root-closure via the factorization itself, and the
    even-degree leading sign); repeated calls are deterministic bit for bit.

    The companion is a constructed choice, so when the two-sided synthesis
    cannot track it (its deep coefficients are only pointwise-accurate),
    the phases are instead refined against the corner target alone and the
    reported residual is the corner mismatch.
    """
    if parity(p) is Parity.INDEFINITE:
        raise PreconditionError("target P must have definite parity")
    if sup_norm(p) > 1.0 + 1e-10:
        raise PreconditionError(f"target P violates the 1-bound: sup|P| = {sup_norm(p):.6f}")
    if p.degree % 2 == 0 and p.degree > 0 and p.leading().real <= 0:
        raise PreconditionError("even-degree P needs a positive leading coefficient")
    q = fejer_riesz_complete(p, max(tol, 1e-8))
    try:
        return synthesize(p, q, tol)
    except (NumericError, PreconditionError):
        pass
    cp, _, _, _, _ = _cheb_targets(p, q)
    half, has_center = _continuation_from_p(cp, tol)
    result = AntisymmetricPhaseList.from_half(half, has_center)
    back = extract_poly(result.phases)
    rp = _cheb_add(back.cheb_p, -cp)
    residual = float(np.max(np.abs(rp)))
    if residual > tol:
        raise NumericError(
            f"one-sided synthesis residual {residual:.3e} exceeds tolerance {tol:.1e}"
        )
    return SynthesisReport(
        phases=result,
        residual=residual,
        steps=half.size,
        polished=True,
    )
