"""Translation + rotation actions of R^d and their group-theoretic dimension.

An action is described by three matrices over Q(sqrt(D)):

* ``gamma0`` (d x d): columns generate the index group Gamma_0; the level-i
  group is Gamma_i = 2^-i Gamma_0 and integer vectors ``n`` are coordinates
  of the points ``2^-i gamma0 n``.
* ``translation`` A (k x d): ``s -> s + A t`` on R^k with Lebesgue measure.
* ``rotation`` C (r x d, rational): ``zeta_j -> zeta_j exp(2 pi i <C_j, t>)``
  on the r-torus with Haar probability measure.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import lattice as la
from .quadratic import QuadraticNumber, is_squarefree, parse_rational


class DimensionError(ValueError):
    """Raised when the quotient has no free part (p = 0)."""


class ConsistencyError(RuntimeError):
    """Raised when the dimension disagrees between refinement levels."""


def _qmatrix(rows, D: int, cols: int, name: str) -> list[list[QuadraticNumber]]:
    if not isinstance(rows, list):
        raise ValueError(f"{name} must be a list of rows")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != cols:
            raise ValueError(f"{name} row {i} must have {cols} entries")
        out.append([QuadraticNumber.from_json(x, D) for x in row])
    return out


@dataclass(frozen=True)
class ActionSpec:
    d: int
    D: int
    gamma0: list
    translation: list
    rotation: list

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if not is_squarefree(self.D):
            raise ValueError(f"D must be squarefree and >= 1, got {self.D}")
        if len(self.gamma0) != self.d or any(len(r) != self.d for r in self.gamma0):
            raise ValueError("gamma0 must be d x d")
        if any(len(r) != self.d for r in self.translation):
            raise ValueError("translation rows must have d entries")
        if any(len(r) != self.d for r in self.rotation):
            raise ValueError("rotation rows must have d entries")
        if self.k + self.r < 1:
            raise ValueError("need at least one translation or rotation row")
        if la.field_rank(self.gamma0) != self.d:
            raise ValueError("gamma0 is not invertible")
        for row in self.rotation:
            for x in row:
                if not isinstance(x, Fraction):
                    raise ValueError("rotation entries must be rational")

    @property
    def k(self) -> int:
        return len(self.translation)

    @property
    def r(self) -> int:
        return len(self.rotation)

    @classmethod
    def from_dict(cls, doc: dict) -> ActionSpec:
        try:
            d = doc["d"]
            D = doc.get("D", 1)
        except (KeyError, TypeError) as exc:
            raise ValueError("action spec needs an integer 'd'") from exc
        if not isinstance(d, int) or not isinstance(D, int):
            raise ValueError("'d' and 'D' must be integers")
        if not is_squarefree(D):
            raise ValueError(f"D must be squarefree and >= 1, got {D}")
        gamma0 = doc.get("gamma0")
        if gamma0 is None:
            gamma0 = [[int(i == j) for j in range(d)] for i in range(d)]
        return cls(
            d=d,
            D=D,
            gamma0=_qmatrix(gamma0, D, d, "gamma0"),
            translation=_qmatrix(doc.get("translation", []), D, d, "translation"),
            rotation=[[parse_rational(x) for x in row] for row in _checked(doc.get("rotation", []), d)],
        )

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "D": self.D,
            "gamma0": [[x.to_json() for x in row] for row in self.gamma0],
            "translation": [[x.to_json() for x in row] for row in self.translation],
            "rotation": [[str(x) for x in row] for row in self.rotation],
        }

    def digest(self) -> str:
        return model_digest(self.to_dict())

    def translation_matrix(self) -> list[list[QuadraticNumber]]:
        """``A @ gamma0``: translation of each Gamma_0 generator."""
        return _qmatmul(self.translation, self.gamma0, self.D)

    def rotation_matrix(self) -> list[list[QuadraticNumber]]:
        """``C @ gamma0``: rotation frequency of each Gamma_0 generator."""
        C = [[QuadraticNumber(x, 0, self.D) for x in row] for row in self.rotation]
        return _qmatmul(C, self.gamma0, self.D)

    def point(self, n: Sequence[int], level: int = 0) -> list[QuadraticNumber]:
        """The point of R^d with Gamma_level coordinates ``n``."""
        scale = Fraction(1, 2 ** level)
        return [sum((g * c for g, c in zip(row, n)), QuadraticNumber(0, 0, self.D)) * scale
                for row in self.gamma0]


def _checked(rows, d):
    if not isinstance(rows, list) or any(not isinstance(r, list) or len(r) != d for r in rows):
        raise ValueError(f"rotation must be a list of rows with {d} entries")
    return rows


def _qmatmul(A, B, D):
    zero = QuadraticNumber(0, 0, D)
    return [[sum((a * b for a, b in zip(row, col)), zero) for col in zip(*B)] for row in A]


def model_digest(doc: dict) -> str:
    """Content hash of a JSON document, insensitive to key order and spacing."""
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


@dataclass(frozen=True)
class KernelLattice:
    level: int
    basis: la.IntegerMatrix

    @property
    def rank(self) -> int:
        return la.lattice_rank(self.basis)


def kernel_lattice(spec: ActionSpec, i: int) -> KernelLattice:
    """Generators of K_i in Gamma_i coordinates.

    First the translation part (and any irrational rotation part) gives a
    rational linear system whose integer solutions form a saturated lattice
    L; then the rational rotation frequencies impose a congruence on L.
    """
    if i < 0:
        raise ValueError("level must be nonnegative")
    T = spec.translation_matrix()
    R = spec.rotation_matrix()
    equations = [[x.a for x in row] for row in T]
    if spec.D > 1:
        equations += [[x.b for x in row] for row in T]
        equations += [[x.b for x in row] for row in R]
    equations = [row for row in equations if any(row)]
    L = la.integer_kernel(equations, spec.d)
    s = len(L[0]) if L and L[0] else 0
    if s == 0 or spec.r == 0:
        return KernelLattice(level=i, basis=L)
    RL = [[sum((x.a * c for x, c in zip(row, col)), Fraction(0)) for col in zip(*L)] for row in R]
    B, den = la.clear_denominators(RL)
    sub = la.congruence_sublattice(B, den * 2 ** i)
    return KernelLattice(level=i, basis=la.matmul(L, sub))


@dataclass
class Classification:
    p: int
    torsion_profile: list
    free_lift_basis: la.IntegerMatrix
    kernel_basis: la.IntegerMatrix
    conservative: Optional[bool] = None
    alpha: Optional[Fraction] = None
    predicted_exponent: Optional[Fraction] = None

    @property
    def branch(self) -> str:
        if self.conservative is None:
            return "unknown"
        return "conservative" if self.conservative else "dissipative"

    @property
    def limit_law(self) -> str:
        if self.conservative is None:
            return "unknown"
        if self.conservative:
            return "degenerate at 0 under t^(-p/alpha) scaling"
        return "scaled Frechet"

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "torsion_profile": self.torsion_profile,
            "free_lift_basis": self.free_lift_basis,
            "kernel_basis": self.kernel_basis,
            "conservative": self.conservative,
            "branch": self.branch,
            "alpha": None if self.alpha is None else str(self.alpha),
            "predicted_exponent": None if self.predicted_exponent is None else str(self.predicted_exponent),
            "limit_law": self.limit_law,
        }


def level_decompositions(spec: ActionSpec, i_max: int) -> list[la.QuotientDecomposition]:
    return [
        la.quotient_decomposition(spec.d, kernel_lattice(spec, i).basis)
        for i in range(i_max + 1)
    ]


def effective_dimension(spec: ActionSpec, i_max: int = 3) -> Classification:
    """Group-theoretic dimension p, checked to agree on levels 0..i_max."""
    if i_max < 0:
        raise ValueError("i_max must be nonnegative")
    decomps = level_decompositions(spec, i_max)
    ps = [q.free_rank for q in decomps]
    if len(set(ps)) != 1:
        raise ConsistencyError(f"free rank differs across levels: {ps}")
    p = ps[0]
    if p == 0:
        raise DimensionError(
            "the quotient Gamma/K is finite (p = 0); the growth results assume p >= 1"
        )
    return Classification(
        p=p,
        torsion_profile=[q.torsion_invariants for q in decomps],
        free_lift_basis=decomps[0].free_lift_basis,
        kernel_basis=decomps[0].kernel_basis,
    )


def is_conservative(spec: ActionSpec, F_basis: la.IntegerMatrix, level: int = 0) -> bool:
    """Decide conservativity of the action restricted to the lattice F.

    ``F_basis`` columns are Gamma_level coordinates.  The restricted action is
    dissipative exactly when the translation vectors of F form a lattice in
    R^k: the translation map is injective on F and the Z-rank of the image
    equals the dimension of its real span.  Otherwise some orbit accumulates
    (a dense translation subgroup or an infinite-order rotation) and the
    action is conservative.
    """
    if len(F_basis) != spec.d:
        raise ValueError(f"F_basis must have {spec.d} rows")
    p = la.lattice_rank(F_basis) if F_basis and F_basis[0] else 0
    if p == 0:
        raise ValueError("F_basis spans the zero lattice")
    K = kernel_lattice(spec, level).basis
    q = la.lattice_rank(K) if K and K[0] else 0
    if la.lattice_rank(la.hstack(K, F_basis)) != p + q:
        raise ValueError("F_basis meets the kernel lattice nontrivially")
    T = spec.translation_matrix()
    # translation images of the generators, in R^k (scale 2^-level is irrelevant)
    images = la.transpose(la.matmul(T, F_basis), rows=len(F_basis[0])) if T else []
    if not images:
        return True
    # Z-rank of the image = Q-rank of the split (rational, surd) coordinates
    split = [[x.a for x in img] + [x.b for x in img] for img in images]
    z_rank = la.field_rank(split)
    real_rank = la.field_rank(images)
    return not (z_rank == p and real_rank == p)


def classify(spec: ActionSpec, alpha, i_max: int = 3) -> Classification:
    """Dimension, conservativity of the free part and the predicted rate p/alpha."""
    alpha = Fraction(alpha) if not isinstance(alpha, float) else Fraction(alpha).limit_denominator(10 ** 6)
    if not 0 < alpha < 2:
        raise ValueError("alpha must lie in (0, 2)")
    result = effective_dimension(spec, i_max)
    result.conservative = is_conservative(spec, result.free_lift_basis)
    result.alpha = alpha
    result.predicted_exponent = Fraction(result.p) / alpha
    return result
