"""Complex polynomial arithmetic and analysis on [-1, 1].

Coefficient vectors are indexed by power of x. Instances can carry a
Chebyshev-basis representation alongside the monomial one: monomial
coefficients of 1-bounded polynomials grow like 3^degree, so beyond degree
forty or so they stop being usable for evaluation, while the Chebyshev
coefficients stay O(1). Operations that build high-degree polynomials
(step approximants, completions) construct through the Chebyshev form and
keep it; evaluation prefers it whenever present.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from numpy.polynomial import polynomial as _poly
from scipy.special import erf, erfcinv

from .config import DEFAULT_TOL, MAX_DEGREE
from .errors import (
    ArgumentError,
    CapacityError,
    CompletionConditionError,
    NumericError,
    PreconditionError,
)

TRIM_REL = 1e-12  # relative trailing-coefficient trim threshold


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class ComplexPoly:
    """Polynomial over the complex numbers, coefficient of x^k at index k.

    Trailing coefficients below TRIM_REL (relative to the largest
    coefficient) are dropped on construction, so `degree` is honest.
    `cheb` holds the Chebyshev-basis coefficients when the instance was
    built through them; it is the evaluation backend of choice.
    """

    coeffs: np.ndarray
    cheb: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.ndim != 1 or c.size == 0:
            raise ArgumentError("coefficient vector must be a nonempty 1-d array")
        if not np.all(np.isfinite(c)):
            raise ArgumentError("coefficients must be finite")
        scale = np.max(np.abs(c))
        n = c.size
        while n > 1 and abs(c[n - 1]) <= TRIM_REL * max(scale, 1.0):
            n -= 1
        object.__setattr__(self, "coeffs", c[:n].copy())
        if self.cheb is not None:
            ch = np.atleast_1d(np.asarray(self.cheb, dtype=complex))
            object.__setattr__(self, "cheb", ch[: max(n, 1)].copy())

    @classmethod
    def from_real(cls, real_coeffs) -> "ComplexPoly":
        return cls(np.asarray(real_coeffs, dtype=float).astype(complex))

    @classmethod
    def from_chebyshev(cls, cheb_coeffs) -> "ComplexPoly":
        ch = np.atleast_1d(np.asarray(cheb_coeffs, dtype=complex))
        if ch.size == 0:
            ch = np.zeros(1, dtype=complex)
        scale = max(np.max(np.abs(ch)), 1.0)
        n = ch.size
        while n > 1 and abs(ch[n - 1]) <= TRIM_REL * scale:
            n -= 1
        ch = ch[:n]
        return cls(_cheb.cheb2poly(ch), cheb=ch)

    @classmethod
    def zero(cls) -> "ComplexPoly":
        return cls(np.zeros(1, dtype=complex))

    @classmethod
    def chebyshev_t(cls, n: int) -> "ComplexPoly":
        c = np.zeros(n + 1)
        c[n] = 1.0
        return cls.from_chebyshev(c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def chebyshev_coeffs(self) -> np.ndarray:
        if self.cheb is not None:
            return self.cheb.copy()
        return _cheb.poly2cheb(self.coeffs)

    def __call__(self, x):
        if self.cheb is not None:
            return _cheb.chebval(x, self.cheb)
        return _poly.polyval(x, self.coeffs)

    def conj(self) -> "ComplexPoly":
        """Polynomial with conjugated coefficients (equals conj(p(x)) on the real axis)."""
        ch = None if self.cheb is None else np.conj(self.cheb)
        return ComplexPoly(np.conj(self.coeffs), cheb=ch)

    def is_real(self, tol: float = DEFAULT_TOL) -> bool:
        scale = max(np.max(np.abs(self.coeffs)), 1.0)
        return bool(np.max(np.abs(self.coeffs.imag)) <= tol * scale)

    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def max_coeff_distance(self, other: "ComplexPoly") -> float:
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n, dtype=complex)
        a[: self.coeffs.size] = self.coeffs
        b[: other.coeffs.size] = other.coeffs
        return float(np.max(np.abs(a - b)))


def compose(g: ComplexPoly, f: ComplexPoly) -> ComplexPoly:
    """Coefficients of g(f(x)) by Horner accumulation over g's coefficients."""
    acc = np.array([g.coeffs[-1]], dtype=complex)
    for k in range(g.degree - 1, -1, -1):
        acc = _poly.polymul(acc, f.coeffs)
        acc = _poly.polyadd(acc, [g.coeffs[k]])
    return ComplexPoly(acc)


def multiply(f: ComplexPoly, g: ComplexPoly) -> ComplexPoly:
    return ComplexPoly(_poly.polymul(f.coeffs, g.coeffs))


def linear_combine(
    alpha: complex,
    f: ComplexPoly,
    beta: complex,
    g: ComplexPoly,
    require_norm: bool = False,
) -> ComplexPoly:
    """alpha*f + beta*g.

    With require_norm=True the caller asserts the combination must stay
    1-bounded on [-1, 1], which needs |alpha| + |beta| <= 1.
    """
    if require_norm and abs(alpha) + abs(beta) > 1.0 + 1e-15:
        raise ArgumentError(
            f"norm preservation requires |alpha|+|beta| <= 1, got {abs(alpha) + abs(beta)}"
        )
    return ComplexPoly(_poly.polyadd(alpha * f.coeffs, beta * g.coeffs))


def parity(f: ComplexPoly, tol: float = DEFAULT_TOL) -> Parity:
    scale = max(np.max(np.abs(f.coeffs)), 1.0)
    even_ok = np.all(np.abs(f.coeffs[1::2]) <= tol * scale)
    odd_ok = np.all(np.abs(f.coeffs[0::2]) <= tol * scale)
    if even_ok and not odd_ok:
        return Parity.EVEN
    if odd_ok and not even_ok:
        return Parity.ODD
    if even_ok and odd_ok:
        return Parity.EVEN  # zero polynomial
    return Parity.INDEFINITE


def chebyshev_extrema_grid(n: int) -> np.ndarray:
    """n Chebyshev extrema points on [-1, 1], endpoints included."""
    if n < 2:
        raise ArgumentError("grid needs at least 2 points")
    return np.cos(np.pi * np.arange(n) / (n - 1))[::-1]


def sup_norm(f: ComplexPoly, grid: int | None = None) -> float:
    """max |f| over a Chebyshev extrema grid (default 4*deg, at least 64 points)."""
    if grid is None:
        grid = max(4 * f.degree, 64)
    if grid < max(4 * f.degree, 2):
        raise ArgumentError(f"grid of {grid} points is too coarse for degree {f.degree}")
    return float(np.max(np.abs(f(chebyshev_extrema_grid(grid)))))


# ---------------------------------------------------------------------------
# Laurent picture


@dataclass(frozen=True)
class LaurentPoly:
    """Laurent polynomial sum_k c_k z^k for k in [-order, order].

    coeffs[j] holds the coefficient of z^(j - order).
    """

    coeffs: np.ndarray
    order: int = 0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.size != 2 * self.order + 1:
            raise ArgumentError("coefficient vector must have length 2*order + 1")
        object.__setattr__(self, "coeffs", c.copy())

    def coeff(self, k: int) -> complex:
        if abs(k) > self.order:
            return 0.0 + 0.0j
        return complex(self.coeffs[k + self.order])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        powers = np.arange(-self.order, self.order + 1)
        return np.sum(self.coeffs * z[..., None] ** powers, axis=-1)

    def is_real_on_circle(self, tol: float = DEFAULT_TOL) -> bool:
        scale = max(np.max(np.abs(self.coeffs)), 1.0)
        folded = self.coeffs - np.conj(self.coeffs[::-1])
        return bool(np.max(np.abs(folded)) <= tol * scale)


def _laurent_deficiency(cheb_p: np.ndarray) -> np.ndarray:
    """Coefficients of 1 - P((z + 1/z)/2)^2 from P's Chebyshev coefficients.

    T_k((z + 1/z)/2) = (z^k + z^-k)/2 makes the substitution exact. Index j
    of the returned array is the coefficient of z^(j - 2d).
    """
    c = np.asarray(cheb_p, dtype=complex)
    d = c.size - 1
    lp = np.zeros(2 * d + 1, dtype=complex)
    lp[d] = c[0]
    for k in range(1, d + 1):
        lp[d + k] += c[k] / 2.0
        lp[d - k] += c[k] / 2.0
    sq = np.convolve(lp, lp)
    out = -sq
    out[2 * d] += 1.0
    return out


def to_laurent(p: ComplexPoly) -> LaurentPoly:
    """Return 1 - p((z + 1/z)/2)^2 expanded in powers of z."""
    cheb_p = p.chebyshev_coeffs()
    out = _laurent_deficiency(cheb_p)
    return LaurentPoly(out, order=p.degree * 2)


# ---------------------------------------------------------------------------
# Root finding


@dataclass(frozen=True)
class RootMultiset:
    """Complex roots with multiplicities, plus closure flags.

    Closure flags are computed with a pairing tolerance: the multiset is
    closed under an involution when it can be matched to its image within
    that tolerance.
    """

    roots: np.ndarray
    multiplicities: np.ndarray
    pairing_tol: float = 1e-8

    @property
    def total(self) -> int:
        return int(np.sum(self.multiplicities))

    def expanded(self) -> np.ndarray:
        return np.repeat(self.roots, self.multiplicities)

    def _closed_under(self, image: np.ndarray) -> bool:
        left = sorted(self.expanded(), key=lambda z: (round(z.real, 12), round(z.imag, 12)))
        right = sorted(image, key=lambda z: (round(z.real, 12), round(z.imag, 12)))
        used = [False] * len(right)
        for z in left:
            hit = False
            for i, w in enumerate(right):
                if not used[i] and abs(z - w) <= self.pairing_tol * max(1.0, abs(z)):
                    used[i] = True
                    hit = True
                    break
            if not hit:
                return False
        return True

    @property
    def closed_under_negation(self) -> bool:
        return self._closed_under(-self.expanded())

    @property
    def closed_under_conjugation(self) -> bool:
        return self._closed_under(np.conj(self.expanded()))


def _aberth_refine(coeffs: np.ndarray, guesses: np.ndarray, sweeps: int = 12) -> np.ndarray:
    """Aberth-Ehrlich simultaneous refinement of all roots of the monic poly."""
    deriv = _poly.polyder(coeffs)
    z = guesses.astype(complex).copy()
    for _ in range(sweeps):
        pv = _poly.polyval(z, coeffs)
        dv = _poly.polyval(z, deriv)
        newton = np.where(dv != 0, pv / np.where(dv == 0, 1, dv), 0.0)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        sums = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - newton * sums
        step = np.where(np.abs(denom) > 1e-30, newton / np.where(denom == 0, 1, denom), newton)
        z_new = z - step
        if np.max(np.abs(z_new - z)) < 1e-15 * max(1.0, np.max(np.abs(z))):
            z = z_new
            break
        z = z_new
    # keep refinements only where they actually reduced the residual
    better = np.abs(_poly.polyval(z, coeffs)) <= np.abs(_poly.polyval(guesses, coeffs))
    return np.where(better, z, guesses)


def _cluster(values: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    groups: list[list[complex]] = []
    for z in sorted(values, key=lambda w: (w.real, w.imag)):
        for g in groups:
            if abs(z - np.mean(g)) <= tol * max(1.0, abs(z)):
                g.append(z)
                break
        else:
            groups.append([z])
    centers = np.array([np.mean(g) for g in groups])
    mults = np.array([len(g) for g in groups], dtype=int)
    return centers, mults


def roots(f: ComplexPoly, cluster_tol: float = 1e-7) -> RootMultiset:
    """All complex roots via the companion matrix, refined by an Aberth pass.

    Multiplicities come from clustering at cluster_tol. The residual
    guarantee |f(r)| <= 1e-8 * max|coeff| (scaled up outside the unit disk)
    is checked; violation raises.
    """
    if f.degree < 1:
        raise ArgumentError("root finding needs degree >= 1")
    c = f.coeffs / f.coeffs[-1]
    raw = _poly.polyroots(c)  # companion-matrix eigenvalues
    refined = _aberth_refine(c, np.asarray(raw, dtype=complex))

    scale = float(np.max(np.abs(f.coeffs)))
    resid = np.max(np.abs(f(refined))) if refined.size else 0.0
    if resid > 1e-8 * scale * max(1.0, float(np.max(np.abs(refined))) ** f.degree):
        raise NumericError(
            f"root residual {resid:.3e} exceeds tolerance for degree {f.degree}"
        )
    centers, mults = _cluster(refined, cluster_tol)
    return RootMultiset(centers, mults)


# ---------------------------------------------------------------------------
# Fejer-Riesz completion


def _select_factor_roots(centers: np.ndarray, mults: np.ndarray, tol_pair: float) -> list[complex]:
    """Pick one root per conjugate pair such that the picked multiset is
    closed under negation; raises when no such split exists.

    The split determines the companion factor Q: the deflated square B
    factors as Q * conj(Q), so Q takes one member of every conjugate pair,
    and definite parity of Q demands negation closure of the selection.
    """
    selected: list[complex] = []
    consumed = np.zeros(centers.size, dtype=bool)

    def find(z: complex) -> int | None:
        best, best_d = None, np.inf
        for i, w in enumerate(centers):
            if consumed[i]:
                continue
            dist = abs(w - z)
            if dist <= 100 * tol_pair * max(1.0, abs(z)) and dist < best_d:
                best, best_d = i, dist
        return best

    order = sorted(
        range(centers.size),
        key=lambda i: (abs(centers[i]), centers[i].real, centers[i].imag),
    )
    for i in order:
        if consumed[i]:
            continue
        s = complex(centers[i])
        m = int(mults[i])
        if abs(s) <= tol_pair:
            if m % 2 != 0:
                raise CompletionConditionError(
                    "root multiset closed under negation",
                    "odd-multiplicity root at the origin",
                )
            selected.extend([0.0] * (m // 2))
            consumed[i] = True
        elif abs(s.imag) <= tol_pair * max(1.0, abs(s)):
            # real pair {s, -s}: each needs even multiplicity or B changes sign
            j = find(-s)
            if j is None or mults[j] != m:
                raise CompletionConditionError(
                    "root multiset closed under negation",
                    f"unpaired real root near {s.real:+.6f}",
                )
            if m % 2 != 0:
                raise CompletionConditionError(
                    "nonnegativity of the deflated square on the real axis",
                    f"odd-multiplicity real root near {s.real:+.6f}",
                )
            selected.extend([s.real] * (m // 2))
            selected.extend([-s.real] * (m // 2))
            consumed[i] = consumed[j] = True
        elif abs(s.real) <= tol_pair * max(1.0, abs(s)):
            # imaginary pair {it, -it}: conjugation and negation coincide, so a
            # negation-closed split exists only for even multiplicity
            j = find(np.conj(s))
            if j is None or mults[j] != m:
                raise CompletionConditionError(
                    "conjugation closure of the real polynomial's roots",
                    f"unpaired imaginary root near {s.imag:+.6f}i",
                )
            if m % 2 != 0:
                raise CompletionConditionError(
                    "root multiset closed under negation",
                    f"odd-multiplicity imaginary root near {s.imag:+.6f}i",
                )
            sel = complex(0.0, s.imag)
            selected.extend([sel] * (m // 2))
            selected.extend([-sel] * (m // 2))
            consumed[i] = consumed[j] = True
        else:
            # generic quadruple {s, -s, conj(s), -conj(s)}: take the
            # negation-closed conjugate split containing the first-quadrant root
            jn = find(-s)
            jc = find(np.conj(s))
            jnc = find(-np.conj(s))
            if jn is None or jc is None or jnc is None:
                raise CompletionConditionError(
                    "root multiset closed under negation",
                    f"incomplete quadruple near {s:.6f}",
                )
            if not (mults[jn] == mults[jc] == mults[jnc] == m):
                raise CompletionConditionError(
                    "root multiset closed under negation",
                    f"unbalanced quadruple near {s:.6f}",
                )
            q1 = s if (s.real > 0) == (s.imag > 0) else complex(np.conj(s))
            selected.extend([q1] * m)
            selected.extend([-q1] * m)
            consumed[i] = consumed[jn] = consumed[jc] = consumed[jnc] = True
    return selected


def _deflated_square_xvalues(cheb_p: np.ndarray) -> np.ndarray:
    """Raw x-images of the roots of B = (1 - P^2)/(1 - x^2), two per root.

    Works in the Laurent picture: z^(2d) * (1 - P((z+1/z)/2)^2) has O(1)
    coefficients for a 1-bounded P, so its companion matrix is
    well-conditioned where the monomial-basis route is hopeless. The
    (1 - x^2) factor, worth -(z^2 - 1)^2/(4 z^2) there, is divided out
    analytically before rooting; each x-root of B then owns exactly two
    z-roots (z and 1/z), which both map back to the same x.
    """
    lau = _laurent_deficiency(cheb_p)  # z^k for k in [-2d, 2d]
    zc = np.asarray(lau, dtype=complex)
    # divide z^(2d) F(z) by -(z^2 - 1)^2 / 4; remainder is endpoint error
    quot, rem = _poly.polydiv(zc, np.array([-0.25, 0.0, 0.5, 0.0, -0.25]))
    if rem.size and np.max(np.abs(rem)) > 1e-7 * max(np.max(np.abs(zc)), 1e-30):
        raise CompletionConditionError(
            "endpoint magnitude |P(+-1)| = 1",
            f"Laurent division remainder {np.max(np.abs(rem)):.3e}",
        )
    # the quotient is z^(2d-2) H(z) with H symmetric and real; symmetrizing
    # removes the division's numerical asymmetry so reciprocal root pairs
    # survive the end trim together
    hq = np.real(np.asarray(quot, dtype=complex))
    hq = (hq + hq[::-1]) / 2.0
    scale = float(np.max(np.abs(hq)))
    # drop end coefficients only when they are zero to working precision;
    # the dropped roots sit at radii |z| beyond ~1e3 (x likewise), where the
    # identity on [-1, 1] cannot see them and the refinement absorbs the rest
    cut = 0
    while 2 * cut + 1 < hq.size and abs(hq[cut]) < 1e-30 * scale and abs(hq[-1 - cut]) < 1e-30 * scale:
        cut += 1
    trimmed = hq[cut : hq.size - cut].astype(complex)
    if trimmed.size < 2:
        return np.zeros(0, dtype=complex)
    raw = _poly.polyroots(trimmed / trimmed[-1])
    raw = _aberth_refine(trimmed / trimmed[-1], np.asarray(raw, dtype=complex))
    raw = raw[np.abs(raw) > 1e-8]
    return (raw + 1.0 / raw) / 2.0


def _paired_multiset(xs: np.ndarray, cluster_tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Cluster raw x-images and halve the (z, 1/z) doubling."""
    centers, mults = _cluster(xs, cluster_tol)
    if np.any(mults % 2 != 0):
        raise NumericError(
            "could not pair the Laurent roots of the deflated square; "
            f"cluster multiplicities {mults.tolist()}"
        )
    return centers, mults // 2


def _symmetrize_multiset(
    centers: np.ndarray, mults: np.ndarray, tol: float
) -> tuple[np.ndarray, np.ndarray]:
    """Rebuild the multiset exactly closed under negation and conjugation.

    The deflated square is real with definite parity, so its true root
    multiset has both closures; root noise breaks them slightly, and the
    downstream split logic needs them exact. Roots are grouped into orbits
    {s, -s, conj(s), -conj(s)}, counts pooled, and symmetric representatives
    emitted. An orbit whose pooled count does not divide evenly is a real
    closure failure and is reported as such.
    """
    consumed = np.zeros(centers.size, dtype=bool)
    out_centers: list[complex] = []
    out_mults: list[int] = []

    def gather(z: complex) -> list[int]:
        hits = []
        for i, w in enumerate(centers):
            if not consumed[i] and abs(w - z) <= tol * max(1.0, abs(z)):
                hits.append(i)
        return hits

    order = sorted(
        range(centers.size),
        key=lambda i: (-mults[i], abs(centers[i]), centers[i].real, centers[i].imag),
    )
    for i in order:
        if consumed[i]:
            continue
        s = complex(centers[i])
        re, im = abs(s.real), abs(s.imag)
        near_origin = abs(s) <= tol
        on_real = im <= tol * max(1.0, abs(s))
        on_imag = re <= tol * max(1.0, abs(s))
        if near_origin:
            positions = [0.0 + 0.0j]
        elif on_real:
            positions = [complex(re, 0.0), complex(-re, 0.0)]
        elif on_imag:
            positions = [complex(0.0, im), complex(0.0, -im)]
        else:
            positions = [
                complex(re, im),
                complex(-re, -im),
                complex(re, -im),
                complex(-re, im),
            ]
        member_idx: list[int] = []
        for pos in positions:
            member_idx.extend(gather(pos))
        member_idx = sorted(set(member_idx))
        total = int(sum(mults[j] for j in member_idx))
        share, rem = divmod(total, len(positions))
        if rem != 0:
            raise CompletionConditionError(
                "root multiset closed under negation",
                f"orbit of {s:.6f} carries {total} roots over {len(positions)} positions",
            )
        # refine the representative with a count-weighted average over the orbit
        acc = 0.0 + 0.0j
        for j in member_idx:
            w = complex(centers[j])
            acc += complex(abs(w.real), abs(w.imag)) * mults[j]
        acc /= total
        base = complex(acc.real, acc.imag)
        if near_origin:
            reps = [0.0 + 0.0j]
        elif on_real:
            reps = [complex(base.real, 0.0), complex(-base.real, 0.0)]
        elif on_imag:
            reps = [complex(0.0, base.imag), complex(0.0, -base.imag)]
        else:
            reps = [
                complex(base.real, base.imag),
                complex(-base.real, -base.imag),
                complex(base.real, -base.imag),
                complex(-base.real, base.imag),
            ]
        for rpt in reps:
            out_centers.append(rpt)
            out_mults.append(share)
        for j in member_idx:
            consumed[j] = True
    return np.array(out_centers), np.array(out_mults, dtype=int)


def _endpoint_check(p: ComplexPoly, tol: float) -> None:
    for x in (1.0, -1.0):
        if abs(abs(complex(p(x))) - 1.0) > tol:
            raise CompletionConditionError(
                "endpoint magnitude |P(+-1)| = 1",
                f"|P({x:+.0f})| = {abs(complex(p(x))):.6f}",
            )


def completion_residual(p: ComplexPoly, q: ComplexPoly, grid: int = 201) -> float:
    """max over a Chebyshev grid of | |P|^2 + (1-x^2)|Q|^2 - 1 |."""
    xs = chebyshev_extrema_grid(grid)
    vals = np.abs(p(xs)) ** 2 + (1.0 - xs**2) * np.abs(q(xs)) ** 2
    return float(np.max(np.abs(vals - 1.0)))


def _refine_completion(cheb_p: np.ndarray, q_cheb: np.ndarray, deg_q: int) -> np.ndarray:
    """Gauss-Newton polish of the companion factor against the identity.

    The root-based construction fixes the branch (which conjugate of each
    root pair belongs to Q); this pass only repairs the floating-point
    error of root extraction. Coefficients stay on the parity lattice of
    deg_q, so the factor's definite parity survives.
    """
    n = deg_q + 1
    q = np.zeros(n, dtype=complex)
    q[: min(len(q_cheb), n)] = q_cheb[: min(len(q_cheb), n)]
    idx = np.arange(deg_q % 2, n, 2)
    m = 4 * (len(cheb_p) + n)
    theta = np.pi * (np.arange(m) + 0.5) / m
    xs = np.cos(theta)
    w = 1.0 - xs**2
    pv2 = np.abs(_cheb.chebval(xs, cheb_p)) ** 2
    t_basis = np.cos(np.outer(np.arange(n), theta))  # T_k(x_j)

    def resid(qc):
        qv = _cheb.chebval(xs, qc)
        return pv2 + w * np.abs(qv) ** 2 - 1.0

    r = resid(q)
    best = float(np.linalg.norm(r))
    lam = 1e-12
    for _ in range(60):
        qv = _cheb.chebval(xs, q)
        jac = np.concatenate(
            [
                (2.0 * w * qv.real) * t_basis[idx],
                (2.0 * w * qv.imag) * t_basis[idx],
            ],
            axis=0,
        ).T
        gram = jac.T @ jac
        grad = jac.T @ r
        try:
            step = np.linalg.solve(gram + lam * np.eye(gram.shape[0]), -grad)
        except np.linalg.LinAlgError:
            break
        trial = q.copy()
        trial[idx] += step[: idx.size] + 1j * step[idx.size :]
        rt = resid(trial)
        nt = float(np.linalg.norm(rt))
        if nt < best:
            q, r, best = trial, rt, nt
            lam = max(lam * 0.25, 1e-14)
        else:
            lam *= 10.0
            if lam > 1e8:
                break
        if best < 1e-13 * np.sqrt(len(r)):
            break
    return q


def fejer_riesz_complete(p: ComplexPoly, tol: float = 1e-8) -> ComplexPoly:
    """Companion polynomial Q with |P|^2 + (1-x^2)|Q|^2 = 1 on [-1, 1].

    Requires P real with definite parity, sup-norm at most 1, and
    |P(+-1)| = 1. The roots of the deflated square are found in the
    Laurent picture, split deterministically between Q and conj(Q) (see
    _select_factor_roots), and Q is rebuilt in the Chebyshev basis with a
    real positive scale fixed by the identity itself.
    """
    if not p.is_real(1e-10):
        raise PreconditionError("completion target must have real coefficients")
    par = parity(p)
    if par is Parity.INDEFINITE:
        raise PreconditionError("completion target must have definite parity")
    if sup_norm(p) > 1.0 + 1e-10 + tol:
        raise PreconditionError(
            f"completion target exceeds the 1-bound: sup|P| = {sup_norm(p):.6f}"
        )
    _endpoint_check(p, max(tol, 1e-8))

    d = p.degree
    if d == 0:
        return ComplexPoly.zero()
    cheb_p = np.real(p.chebyshev_coeffs())
    if d == 1:
        # B is the positive constant (1 - P^2)/(1 - x^2); Q is its square root
        val = (1.0 - complex(p(0.0)) ** 2).real
        return ComplexPoly([np.sqrt(max(val, 0.0))])

    raw_xs = _deflated_square_xvalues(cheb_p)
    first_error: Exception | None = None
    # the root split between Q and conj(Q) is decided on clustered roots;
    # rooting error grows with degree, so coarsen until a consistent split
    # exists, keeping the first (tightest-tolerance) diagnosis for reporting
    # companion eigenvalues scatter when the leading coefficients are tiny:
    # phantom roots appear at moderate radius and genuine far roots drift.
    # keep only verified roots of 1 - P^2 (normalized against the local
    # magnitude of P^2) and let the Gauss-Newton pass reconstruct the smooth
    # influence of whatever was dropped
    raw_xs = raw_xs[np.abs(raw_xs) <= 40.0]
    if raw_xs.size:
        with np.errstate(over="ignore", invalid="ignore"):
            pv = _cheb.chebval(raw_xs, cheb_p)
            resid_rel = np.abs(1.0 - pv**2) / np.maximum(1.0, np.abs(pv) ** 2)
        keep = np.isfinite(resid_rel) & (resid_rel <= 1e-4)
        raw_xs = raw_xs[keep]
    for cluster_tol in (1e-7, 1e-6, 1e-5, 1e-4, 1e-3):
        try:
            centers, mults = _paired_multiset(raw_xs, cluster_tol)
            centers, mults = _symmetrize_multiset(centers, mults, 10.0 * cluster_tol)
            selected = _select_factor_roots(centers, mults, max(1e-8, cluster_tol))
            return _build_completion(p, cheb_p, selected, tol)
        except (CompletionConditionError, NumericError) as exc:
            if first_error is None:
                first_error = exc
    raise first_error


def _build_completion(
    p: ComplexPoly, cheb_p: np.ndarray, selected: list[complex], tol: float
) -> ComplexPoly:
    d = p.degree
    q_cheb = np.array([1.0 + 0.0j])
    for s in selected:
        q_cheb = _cheb.chebmul(q_cheb, np.array([-s, 1.0], dtype=complex))

    # roots dropped as unverifiable leave the factor short of its degree;
    # their joint influence on the interval is a smooth positive magnitude,
    # recovered here as a real parity-definite Chebyshev fit of its root
    missing = (d - 1) - (len(q_cheb) - 1)
    if missing > 0:
        m_fit = 4 * (d + 1)
        theta = np.pi * (np.arange(m_fit) + 0.5) / m_fit
        xs_f = np.cos(theta)
        qv = _cheb.chebval(xs_f, q_cheb)
        num = 1.0 - np.abs(p(xs_f)) ** 2
        den = (1.0 - xs_f**2) * np.maximum(np.abs(qv) ** 2, 1e-300)
        ratio = np.sqrt(np.clip(num / den, 0.0, None))
        idx = np.arange(missing % 2, missing + 1, 2)
        basis = np.cos(np.outer(idx, theta)).T
        coef, *_ = np.linalg.lstsq(basis, ratio, rcond=None)
        h = np.zeros(missing + 1)
        h[idx] = coef
        q_cheb = _cheb.chebmul(q_cheb, h.astype(complex))

    # fix the positive scale from the identity at interior grid points
    xs = np.cos(np.pi * (np.arange(101) + 0.5) / 101)
    qv = _cheb.chebval(xs, q_cheb)
    pv = p(xs)
    denom = (1.0 - xs**2) * np.abs(qv) ** 2
    good = denom > 1e-6 * float(np.max(denom))
    if not np.any(good):
        raise NumericError("completion scale could not be estimated")
    ratios = (1.0 - np.abs(pv[good]) ** 2) / denom[good]
    c2 = float(np.median(ratios.real))
    if c2 <= 0:
        raise CompletionConditionError(
            "nonnegativity of the deflated square on the real axis",
            f"fitted square scale {c2:.3e}",
        )
    refined = _refine_completion(np.real(cheb_p), np.sqrt(c2) * q_cheb, d - 1)
    q = ComplexPoly.from_chebyshev(refined)

    if parity(q, 1e-8) is Parity.INDEFINITE:
        raise CompletionConditionError(
            "root multiset closed under negation",
            "selected factor has indefinite parity",
        )
    resid = completion_residual(p, q, 201)
    if resid > tol:
        raise NumericError(f"completion identity residual {resid:.3e} exceeds {tol:.1e}")
    return q


# ---------------------------------------------------------------------------
# Step-function approximant


def approx_step(delta: float, eps: float, degree_cap: int = MAX_DEGREE) -> ComplexPoly:
    """Odd real polynomial f with sup|f| <= 1 and |f(x) - 1| <= eps on [delta, 1].

    Construction: Chebyshev expansion of erf(k*x) truncated to odd terms,
    then shrunk slightly to enforce the strict 1-bound. The degree grows
    like (1/delta) * log(1/eps).
    """
    if not (0.0 < delta < 1.0):
        raise ArgumentError(f"delta must lie in (0, 1), got {delta}")
    if not (0.0 < eps < 1.0):
        raise ArgumentError(f"eps must lie in (0, 1), got {eps}")

    k = float(erfcinv(eps / 4.0)) / delta

    def target(x):
        return erf(k * x)

    n = max(int(np.ceil(2.0 * k * np.sqrt(np.log(8.0 / eps)))) | 1, 1)
    xs_check = np.linspace(-1.0, 1.0, 1001)
    plateau = xs_check[xs_check >= delta]

    while True:
        if n > degree_cap:
            raise CapacityError(
                f"step approximation needs degree > {degree_cap} for delta={delta}, eps={eps}"
            )
        m = 2 * (n + 1)
        theta = np.pi * (np.arange(m) + 0.5) / m
        nodes = np.cos(theta)
        vals = target(nodes)
        coeffs = np.zeros(n + 1)
        for j in range(1, n + 1, 2):  # odd terms only; erf(kx) is odd
            coeffs[j] = 2.0 / m * float(np.sum(vals * np.cos(j * theta)))
        sup = max(float(np.max(np.abs(_cheb.chebval(xs_check, coeffs)))), 1e-12)
        shrink = (1.0 - eps / 4.0) / max(sup, 1.0 - eps / 4.0)
        f = ComplexPoly.from_chebyshev(shrink * coeffs)

        fv = np.abs(f(xs_check))
        plateau_err = float(np.max(np.abs(f(plateau) - 1.0)))
        if np.max(fv) <= 1.0 and plateau_err <= eps:
            return f
        n = int(n * 1.3) | 1
