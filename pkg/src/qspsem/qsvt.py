"""Dense-matrix singular-value transformation circuits.

A program is the condensed tuple (phases, left projector, right projector,
oracle slot); the oracle slot may be unbound. Phase lists use the same
convention as the single-qubit module: a list {psi_0..psi_d} means the
degree-d protocol whose two-dimensional reduction (rank-1 identical
projectors, oracle W(x)) reproduces the single-qubit circuit entry for
entry. Internally the circuit is realized with projector-phase rotations
e^{i a (2 Pi - I)} interleaved with alternating U / U^dag; converting the
rotation-convention phases to that reflection form shifts interior angles
by pi/2 and contributes a global sign, both fixed here once:

    d odd:  a_1 = psi_0,        a_k = psi_{k-1} + pi/2 (2 <= k <= d), a_{d+1} = psi_d
    d even: a_k = psi_{k-1} + pi/2 (1 <= k <= d),                     a_{d+1} = psi_d
    scalar = (-1)^{floor(d/2)}

Rotation types alternate ending on the right projector; oracles alternate
ending (rightmost, first applied) on U. The two-dimensional reduction test
asserts the map rather than trusting it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .config import MAX_DIM
from .errors import ArgumentError, CapacityError, PreconditionError
from .nesting import NestedProtocol, flatten
from .poly import ComplexPoly
from .qsp import PhaseList, as_phase_list, extract_poly, is_antisymmetric


@dataclass(frozen=True)
class Projector:
    """Orthogonal projector, validated Hermitian and idempotent."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ArgumentError("projector must be a square matrix")
        if m.shape[0] > MAX_DIM:
            raise CapacityError(f"dimension {m.shape[0]} exceeds the dense cap {MAX_DIM}")
        if np.max(np.abs(m - m.conj().T)) > 1e-11:
            raise ArgumentError("projector must be Hermitian within 1e-11")
        if np.max(np.abs(m @ m - m)) > 1e-10:
            raise ArgumentError("projector must be idempotent within 1e-10")
        object.__setattr__(self, "matrix", m.copy())

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return int(round(float(np.trace(self.matrix).real)))

    @classmethod
    def from_indices(cls, dim: int, indices) -> "Projector":
        m = np.zeros((dim, dim), dtype=complex)
        for i in indices:
            m[i, i] = 1.0
        return cls(m)

    @classmethod
    def from_vector(cls, v) -> "Projector":
        v = np.asarray(v, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def uniform_state(cls, dim: int) -> "Projector":
        return cls.from_vector(np.full(dim, 1.0 / np.sqrt(dim)))

    def image_basis(self) -> np.ndarray:
        """Columns form an orthonormal basis of the image."""
        vals, vecs = np.linalg.eigh(self.matrix)
        return vecs[:, vals > 0.5]


@dataclass(frozen=True)
class MarkedOracle:
    """Subset-marking projector over a computational basis."""

    dim: int
    marked: frozenset

    def __post_init__(self):
        object.__setattr__(self, "marked", frozenset(int(i) for i in self.marked))
        if any(i < 0 or i >= self.dim for i in self.marked):
            raise ArgumentError("marked indices must lie in [0, dim)")

    @property
    def projector(self) -> Projector:
        return Projector.from_indices(self.dim, sorted(self.marked))

    @property
    def size(self) -> int:
        return len(self.marked)


@dataclass(frozen=True)
class QsvtProgram:
    """Condensed tuple (phases, left, right, oracle); oracle may be None."""

    phases: PhaseList
    left: Projector
    right: Projector
    oracle: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "phases", as_phase_list(self.phases))
        if self.left.dim != self.right.dim:
            raise ArgumentError("projectors must share one dimension")
        if self.oracle is not None:
            u = np.asarray(self.oracle, dtype=complex)
            if u.shape != (self.left.dim, self.left.dim):
                raise ArgumentError("oracle dimension must match the projectors")
            if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > 1e-11:
                raise ArgumentError("oracle must be unitary within 1e-11")
            object.__setattr__(self, "oracle", u.copy())

    @property
    def dim(self) -> int:
        return self.left.dim

    @property
    def degree(self) -> int:
        return self.phases.degree

    def bind(self, oracle: np.ndarray) -> "QsvtProgram":
        return replace(self, oracle=oracle)

    def embedded_operator(self) -> np.ndarray:
        if self.oracle is None:
            raise ArgumentError("oracle slot is unbound")
        return self.left.matrix @ self.oracle @ self.right.matrix


def projector_rotation(pi: Projector, phi: float) -> np.ndarray:
    """exp(i phi (2 Pi - I)) built spectrally: e^{i phi} Pi + e^{-i phi} (I - Pi)."""
    eye = np.eye(pi.dim, dtype=complex)
    return np.exp(1j * phi) * pi.matrix + np.exp(-1j * phi) * (eye - pi.matrix)


def _reflection_phases(psi: np.ndarray) -> tuple[np.ndarray, complex]:
    d = psi.size - 1
    a = psi.astype(float).copy()
    if d >= 1:
        if d % 2 == 1:
            a[1:d] += np.pi / 2
        else:
            a[0:d] += np.pi / 2
    scalar = (-1.0) ** (d // 2)
    return a, complex(scalar)


def qsvt_evaluate(prog: QsvtProgram) -> np.ndarray:
    """Compile the program to its dense unitary."""
    psi = prog.phases.phases
    d = psi.size - 1
    if prog.oracle is None and d >= 1:
        raise ArgumentError("oracle slot is unbound")
    a, scalar = _reflection_phases(psi)
    u = prog.oracle
    udag = u.conj().T

    def rot(k: int) -> np.ndarray:
        # rotation k (1-based, left to right): right projector when d+1-k is even
        pi = prog.right if (d + 1 - k) % 2 == 0 else prog.left
        return projector_rotation(pi, a[k - 1])

    out = rot(1)
    for k in range(1, d + 1):
        oracle_k = u if (d - k) % 2 == 0 else udag
        out = out @ oracle_k @ rot(k + 1)
    return scalar * out


@dataclass(frozen=True)
class SvtReport:
    max_deviation: float
    passed: bool
    singular_values: np.ndarray
    boundary_values: np.ndarray
    odd: bool


def _poly_of_squares(p: ComplexPoly) -> np.ndarray:
    """Coefficients of g with P(x) = g(x^2) (even P) or P(x) = x*g(x^2) (odd P)."""
    c = p.coeffs
    if p.degree % 2 == 0:
        return c[0::2]
    return c[1::2]


def verify_svt(prog: QsvtProgram, tol: float = 1e-8) -> SvtReport:
    """Check that the circuit applies the embedded polynomial to the singular values.

    The target is built spectrally from A = left * U * right: for an odd
    protocol, A g(A^dag A) with P(x) = x g(x^2) compared against
    left U_Phi right; for an even one, right-side h(A^dag A) with
    P(x) = h(x^2) compared against right U_Phi right. Singular values at
    the 0/1 boundary need no exclusion in this form; they are reported for
    reference.
    """
    if prog.oracle is None:
        raise ArgumentError("oracle slot is unbound")
    p = extract_poly(prog.phases).p
    a = prog.embedded_operator()
    gram = a.conj().T @ a
    vals, vecs = np.linalg.eigh(gram)
    vals = np.clip(vals.real, 0.0, None)
    svs = np.sqrt(vals)
    g = _poly_of_squares(p)
    gv = np.polynomial.polynomial.polyval(vals, g)
    odd = prog.degree % 2 == 1

    u_phi = qsvt_evaluate(prog)
    if odd:
        target = a @ (vecs @ np.diag(gv) @ vecs.conj().T)
        actual = prog.left.matrix @ u_phi @ prog.right.matrix
    else:
        target = prog.right.matrix @ (vecs @ np.diag(gv) @ vecs.conj().T) @ prog.right.matrix
        actual = prog.right.matrix @ u_phi @ prog.right.matrix

    dev = float(np.max(np.abs(actual - target)))
    boundary = svs[(svs < 1e-9) | (np.abs(svs - 1.0) < 1e-9)]
    return SvtReport(
        max_deviation=dev,
        passed=bool(dev <= tol),
        singular_values=np.sort(svs)[::-1],
        boundary_values=boundary,
        odd=odd,
    )


# ---------------------------------------------------------------------------
# Jordan decomposition of a projector pair


@dataclass(frozen=True)
class JordanSubspace:
    basis: np.ndarray  # columns orthonormal
    singular_value: float | None  # set for 2-d subspaces

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class JordanDecomposition:
    subspaces: tuple[JordanSubspace, ...]

    @property
    def total_dimension(self) -> int:
        return sum(s.dimension for s in self.subspaces)

    def two_dim_singular_values(self) -> np.ndarray:
        return np.array(sorted(s.singular_value for s in self.subspaces if s.dimension == 2))


def jordan_decompose(a: Projector, b: Projector, tol: float = 1e-9) -> JordanDecomposition:
    """Split the space into 1- and 2-d subspaces invariant under both projectors.

    Two-dimensional pieces come from eigenvectors of A B A restricted to
    Img(A) with eigenvalue strictly inside (0, 1); the associated singular
    value is sqrt of the eigenvalue and matches a singular value of A B.
    """
    if a.dim != b.dim:
        raise ArgumentError("projectors must share one dimension")
    n = a.dim
    subspaces: list[JordanSubspace] = []

    basis_a = a.image_basis()
    if basis_a.shape[1]:
        m = basis_a.conj().T @ b.matrix @ basis_a
        vals, vecs = np.linalg.eigh(m)
        for lam, y in zip(vals.real, vecs.T):
            v = basis_a @ y
            if lam >= 1.0 - 1e-9:
                subspaces.append(JordanSubspace(v[:, None], None))
            elif lam <= 1e-9:
                subspaces.append(JordanSubspace(v[:, None], None))
            else:
                w = b.matrix @ v
                u2 = w - (v.conj() @ w) * v
                u2 = u2 / np.linalg.norm(u2)
                subspaces.append(
                    JordanSubspace(np.column_stack([v, u2]), float(np.sqrt(lam)))
                )

    # directions outside Img(A): split ker(A) into Img(B)-aligned and neither
    used = (
        np.column_stack([s.basis for s in subspaces])
        if subspaces
        else np.zeros((n, 0), dtype=complex)
    )
    proj_used = used @ used.conj().T
    comp = np.eye(n, dtype=complex) - proj_used
    vals, vecs = np.linalg.eigh(comp)
    residual_basis = vecs[:, vals.real > 0.5]
    if residual_basis.shape[1]:
        mb = residual_basis.conj().T @ b.matrix @ residual_basis
        vals_b, vecs_b = np.linalg.eigh(mb)
        for lam, y in zip(vals_b.real, vecs_b.T):
            v = residual_basis @ y
            subspaces.append(JordanSubspace(v[:, None], None))

    dec = JordanDecomposition(tuple(subspaces))
    if dec.total_dimension != n:
        raise PreconditionError(
            f"decomposition dimensions sum to {dec.total_dimension}, expected {n}"
        )
    return dec


def invariance_residual(dec: JordanDecomposition, a: Projector, b: Projector) -> float:
    """Worst-case leakage of a subspace out of itself under either projector."""
    worst = 0.0
    for s in dec.subspaces:
        basis = s.basis
        proj = basis @ basis.conj().T
        for m in (a.matrix, b.matrix):
            img = m @ basis
            leak = img - proj @ img
            worst = max(worst, float(np.max(np.abs(leak))))
    return worst


# ---------------------------------------------------------------------------
# Nesting of programs


def flat_nest(outer: QsvtProgram, inner: QsvtProgram) -> QsvtProgram:
    """Nest phase lists, keeping the shared projectors and oracle slot."""
    if np.max(np.abs(outer.left.matrix - inner.left.matrix)) > 1e-12 or np.max(
        np.abs(outer.right.matrix - inner.right.matrix)
    ) > 1e-12:
        raise PreconditionError("flat nesting requires identical projectors")
    if (outer.oracle is None) != (inner.oracle is None):
        raise PreconditionError("flat nesting requires a shared oracle slot")
    if outer.oracle is not None and np.max(np.abs(outer.oracle - inner.oracle)) > 1e-12:
        raise PreconditionError("flat nesting requires a shared oracle slot")
    phases = flatten(NestedProtocol(outer.phases, inner.phases))
    return QsvtProgram(phases=phases, left=outer.left, right=outer.right, oracle=outer.oracle)


@dataclass(frozen=True)
class OpenDeepNest:
    """Deep nesting with unbound slots; bind both oracles to materialize."""

    outer: QsvtProgram
    inner: QsvtProgram

    def bind(self, outer_oracle=None, inner_oracle=None) -> QsvtProgram:
        outer = self.outer if outer_oracle is None else self.outer.bind(outer_oracle)
        inner = self.inner if inner_oracle is None else self.inner.bind(inner_oracle)
        if outer.oracle is None:
            raise ArgumentError("outer oracle slot is still unbound")
        return deep_nest(outer, inner)


def deep_nest(outer: QsvtProgram, inner: QsvtProgram):
    """Conjugate the inner program's left projector by the outer program's unitary.

    Returns the resulting program (the inner template with its left
    projector transformed); with the outer oracle unbound, returns an
    OpenDeepNest carrying both templates and their open slots.
    """
    if outer.dim != inner.dim:
        raise ArgumentError("programs must share one dimension")
    if outer.oracle is None:
        return OpenDeepNest(outer, inner)
    u1 = qsvt_evaluate(outer)
    conj_left = Projector(u1 @ inner.left.matrix @ u1.conj().T)
    return QsvtProgram(
        phases=inner.phases, left=conj_left, right=inner.right, oracle=inner.oracle
    )


def deep_nest_oracle_route(outer: QsvtProgram, inner: QsvtProgram) -> np.ndarray:
    """The equivalent realization through the oracle transform U -> U1^dag U.

    Grouping the conjugating unitaries with the oracle calls leaves one bare
    U1 in front exactly when the template opens with a left-projector
    rotation (odd degree). Used to cross-check deep_nest.
    """
    if outer.oracle is None or inner.oracle is None:
        raise ArgumentError("both oracle slots must be bound")
    u1 = qsvt_evaluate(outer)
    transformed = inner.bind(u1.conj().T @ inner.oracle)
    core = qsvt_evaluate(transformed)
    if inner.degree % 2 == 1:
        return u1 @ core
    return core


# ---------------------------------------------------------------------------
# Random instances for verification sweeps


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_projector(dim: int, rank: int, rng: np.random.Generator) -> Projector:
    u = random_unitary(dim, rng)
    return Projector(u[:, :rank] @ u[:, :rank].conj().T)
