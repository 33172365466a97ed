"""Root-system combinatorics for the finite simple types, in exact arithmetic.

Roots and weights are coordinate tuples over the simple-root basis.  The
invariant form is normalized so long roots have squared length 2, which fixes
the dual Coxeter number and every downstream Gram matrix exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Dict, List, NamedTuple, Sequence, Tuple

from .ratlinalg import Matrix, Vector, dot, mat, mat_inv, mat_vec, vec

Coords = Tuple[int, ...]

FAMILIES = ("A", "B", "C", "D", "E", "F", "G")


def cartan_matrix(family: str, rank: int) -> Tuple[Tuple[int, ...], ...]:
    """Integer Cartan matrix a[i][j] = 2(alpha_i, alpha_j)/(alpha_i, alpha_i)."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    a = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]

    def chain(i: int, j: int, strength_ij: int = -1, strength_ji: int = -1) -> None:
        a[i][j] = strength_ij
        a[j][i] = strength_ji

    if family == "A":
        if rank < 1:
            raise ValueError("rank out of range for A")
        for i in range(rank - 1):
            chain(i, i + 1)
    elif family == "B":
        # last node short: the arrow doubles on the short row
        if rank < 2:
            raise ValueError("rank out of range for B")
        for i in range(rank - 1):
            chain(i, i + 1)
        a[rank - 1][rank - 2] = -2
    elif family == "C":
        # last node long
        if rank < 2:
            raise ValueError("rank out of range for C")
        for i in range(rank - 1):
            chain(i, i + 1)
        a[rank - 2][rank - 1] = -2
    elif family == "D":
        if rank < 3:
            raise ValueError("rank out of range for D")
        for i in range(rank - 2):
            chain(i, i + 1)
        chain(rank - 3, rank - 1)
    elif family == "E":
        if rank not in (6, 7, 8):
            raise ValueError("rank out of range for E")
        # node 2 hangs off node 4 of the 1-3-4-5-... chain (1-indexed)
        spine = [1, 3, 4, 5, 6, 7, 8][: rank - 1]
        for u, v in zip(spine, spine[1:]):
            chain(u - 1, v - 1)
        chain(2 - 1, 4 - 1)
    elif family == "F":
        if rank != 4:
            raise ValueError("rank out of range for F")
        chain(0, 1)
        chain(1, 2)
        a[2][1] = -2
        chain(2, 3)
    elif family == "G":
        if rank != 2:
            raise ValueError("rank out of range for G")
        chain(0, 1)
        a[1][0] = -3
    return tuple(tuple(row) for row in a)


def _symmetrizer(a: Tuple[Tuple[int, ...], ...]) -> Tuple[Q, ...]:
    """Positive d_i with d_i a_ij symmetric, normalized so max(d_i) = 1."""
    rank = len(a)
    d: List[Q] = [Q(0)] * rank
    d[0] = Q(1)
    todo = [0]
    while todo:
        i = todo.pop()
        for j in range(rank):
            if i != j and a[i][j] != 0 and d[j] == 0:
                d[j] = d[i] * a[i][j] / a[j][i]
                todo.append(j)
    if any(x <= 0 for x in d):
        raise ValueError("Cartan matrix is not connected")
    top = max(d)
    return tuple(x / top for x in d)


def _positive_roots(a: Tuple[Tuple[int, ...], ...]) -> Tuple[Coords, ...]:
    """Close the simple roots under simple reflections, keeping positives.

    Ordered by height, then by simple-root coordinates so that alpha_1
    precedes alpha_2 within each height class.
    """
    rank = len(a)
    simples = [tuple(1 if j == i else 0 for j in range(rank)) for i in range(rank)]
    roots = set(simples)
    frontier = list(simples)
    while frontier:
        beta = frontier.pop()
        for i in range(rank):
            # <beta, alpha_i-vee> from the Cartan matrix rows
            c = sum(beta[j] * a[i][j] for j in range(rank))
            refl = tuple(beta[j] - (c if j == i else 0) for j in range(rank))
            if all(x >= 0 for x in refl) and any(refl) and refl not in roots:
                roots.add(refl)
                frontier.append(refl)
    return tuple(sorted(roots, key=lambda r: (sum(r), tuple(-x for x in r))))


@dataclass(frozen=True)
class RootSystem:
    family: str
    rank: int
    cartan: Tuple[Tuple[int, ...], ...]
    d: Tuple[Q, ...]
    form_matrix: Matrix
    form_inverse: Matrix
    positive_roots: Tuple[Coords, ...]
    root_index: Dict[Coords, int]
    highest_root: Coords
    dual_coxeter: int

    @property
    def num_positive(self) -> int:
        return len(self.positive_roots)

    @property
    def dim_algebra(self) -> int:
        return self.rank + 2 * self.num_positive

    @property
    def simple_roots(self) -> Tuple[Coords, ...]:
        return self.positive_roots[: self.rank]

    @property
    def is_simply_laced(self) -> bool:
        return all(x == self.d[0] for x in self.d)

    def form(self, u: Sequence, v: Sequence) -> Q:
        """Normalized invariant form on simple-root coordinates."""
        return dot(u, mat_vec(self.form_matrix, v))

    def norm(self, u: Sequence) -> Q:
        return self.form(u, u)

    def height(self, coords: Sequence) -> int:
        return int(sum(coords))

    def is_root(self, coords: Sequence) -> bool:
        c = tuple(int(x) for x in coords)
        return c in self.root_index or tuple(-x for x in c) in self.root_index

    def coroot(self, alpha: Sequence) -> Vector:
        """2 alpha / (alpha, alpha) as a vector in simple-root coordinates."""
        n = self.norm(alpha)
        return tuple(Q(2) * Q(x) / n for x in alpha)

    def coweight(self, i: int) -> Vector:
        """Vector w_i with (alpha_j, w_i) = delta_ij, in simple-root coordinates."""
        return tuple(row[i] for row in self.form_inverse)

    def fundamental_weight(self, i: int) -> Vector:
        """Vector with <w, alpha_j-vee> = delta_ij."""
        half = self.d[i]  # (alpha_i, alpha_i)/2
        return tuple(half * row[i] for row in self.form_inverse)

    def simple_coord(self, weight: Sequence, i: int) -> Q:
        """Coefficient of alpha_i when weight is written over the simple roots."""
        return Q(weight[i])

    def long_root_basis(self) -> Tuple[Vector, ...]:
        """Coroots of the simple roots; they span the long-root sublattice."""
        return tuple(self.coroot(alpha) for alpha in self.simple_roots)

    def long_root_gram(self) -> Matrix:
        basis = self.long_root_basis()
        return tuple(tuple(self.form(u, v) for v in basis) for u in basis)

    coroot_basis = long_root_basis
    coroot_gram = long_root_gram

    def coweight_gram(self) -> Matrix:
        basis = tuple(self.coweight(i) for i in range(self.rank))
        return tuple(tuple(self.form(u, v) for v in basis) for u in basis)

    def is_long(self, alpha: Sequence) -> bool:
        return self.norm(alpha) == 2

    def in_root_lattice(self, weight: Sequence) -> bool:
        return all(Q(x).denominator == 1 for x in weight)


def _dual_coxeter(form: Matrix, positives: Tuple[Coords, ...], theta: Coords) -> int:
    """Eigenvalue of w -> sum over positive roots of (w, alpha) alpha.

    Cross-checked against 1 + (rho, theta-vee); both must agree and be integral.
    """
    rank = len(form)

    def pair(u: Sequence, v: Sequence) -> Q:
        return dot(u, mat_vec(form, v))

    lam = positives[0]
    image = [Q(0)] * rank
    for alpha in positives:
        c = pair(lam, alpha)
        for j in range(rank):
            image[j] += c * alpha[j]
    ratio = image[0] / Q(lam[0])
    if any(image[j] != ratio * lam[j] for j in range(rank)):
        raise ValueError("form sum is not proportional to the test weight")
    rho = tuple(sum(Q(r[j]) for r in positives) / 2 for j in range(rank))
    theta_vee = tuple(Q(2) * x / pair(theta, theta) for x in theta)
    alt = 1 + pair(rho, theta_vee)
    if ratio != alt or ratio.denominator != 1:
        raise ValueError("dual Coxeter number consistency check failed")
    return int(ratio)


def build_root_system(family: str, rank: int) -> RootSystem:
    """Construct the full root-system data for one finite simple type."""
    a = cartan_matrix(family, rank)
    d = _symmetrizer(a)
    form = mat([[d[i] * a[i][j] for j in range(rank)] for i in range(rank)])
    form_inv = mat_inv(form)
    positives = _positive_roots(a)
    index = {r: i for i, r in enumerate(positives)}
    top_height = max(sum(r) for r in positives)
    tops = [r for r in positives if sum(r) == top_height]
    if len(tops) != 1:
        raise ValueError("highest root is not unique")
    theta = tops[0]
    return RootSystem(
        family=family,
        rank=rank,
        cartan=a,
        d=d,
        form_matrix=form,
        form_inverse=form_inv,
        positive_roots=positives,
        root_index=index,
        highest_root=theta,
        dual_coxeter=_dual_coxeter(form, positives, theta),
    )


def normalized_form(rs: RootSystem, lam: Sequence, mu: Sequence) -> Q:
    """Evaluate the normalized invariant form on two weights in the root span."""
    return rs.form(vec(lam), vec(mu))


class HveeWitness(NamedTuple):
    lhs: Vector
    rhs: Vector
    ok: bool


def check_hvee_identity(rs: RootSystem, weight: Sequence) -> HveeWitness:
    """Evaluate both sides of sum over positive roots of (w, alpha) alpha == h-vee * w."""
    w = vec(weight)
    image = [Q(0)] * rs.rank
    for alpha in rs.positive_roots:
        c = rs.form(w, alpha)
        for j in range(rs.rank):
            image[j] += c * alpha[j]
    lhs = tuple(image)
    rhs = tuple(rs.dual_coxeter * x for x in w)
    return HveeWitness(lhs, rhs, lhs == rhs)
