"""Integral lattices with two-cocycles, and the maps tying them to the roots.

Cocycles are stored as 0/1 exponent matrices E with eps(u, v) = (-1)^(u.E.v),
extended bimultiplicatively.  The defining sign identity
eps(u,v) eps(v,u) = (-1)^(<u,v> + <u,u><v,v>) reduces mod 2 to the matrix
congruence E + E^T = G + diag(G) diag(G)^T, which every constructor asserts,
so a wrong convention fails at build time rather than deep inside a product.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q
from math import isqrt
from typing import List, Optional, Sequence, Tuple

from .bilinear import ScWeight, sc_weight_from_jstar
from .ratlinalg import Vector, determinant, mat, smith_normal_form, vec
from .rootsys import RootSystem

IntMatrix = Tuple[Tuple[int, ...], ...]


def _diag_parity(gram: IntMatrix) -> Tuple[int, ...]:
    return tuple(gram[i][i] % 2 for i in range(len(gram)))


def _assert_cocycle_identity(gram: IntMatrix, eps: IntMatrix) -> None:
    g = _diag_parity(gram)
    n = len(gram)
    for i in range(n):
        for j in range(n):
            lhs = (eps[i][j] + eps[j][i]) % 2
            rhs = (gram[i][j] + g[i] * g[j]) % 2
            if lhs != rhs:
                raise ValueError(f"cocycle identity fails at basis pair ({i}, {j})")


def default_cocycle(gram: IntMatrix) -> IntMatrix:
    """Strictly lower-triangular exponent matrix satisfying the sign identity."""
    g = _diag_parity(gram)
    n = len(gram)
    return tuple(
        tuple((gram[i][j] + g[i] * g[j]) % 2 if i > j else 0 for j in range(n))
        for i in range(n)
    )


def _signature(gram: IntMatrix) -> str:
    """Sylvester classification into positive / negative / indefinite."""
    n = len(gram)
    if n == 0:
        return "positive"
    minors = []
    for m in range(1, n + 1):
        block = mat(row[:m] for row in gram[:m])
        minors.append(determinant(block))
    if all(x > 0 for x in minors):
        return "positive"
    if all((x > 0) == (m % 2 == 0) and x != 0 for m, x in zip(range(1, n + 1), minors)):
        return "negative"
    return "indefinite"


@dataclass(frozen=True)
class IntegralLattice:
    """A based integral lattice carrying a bimultiplicative two-cocycle."""

    name: str
    labels: Tuple[str, ...]
    gram: IntMatrix
    eps_exponents: IntMatrix
    signature: str

    def __post_init__(self) -> None:
        n = len(self.labels)
        if len(self.gram) != n or any(len(row) != n for row in self.gram):
            raise ValueError("gram matrix shape does not match basis")
        if len(self.eps_exponents) != n or any(len(r) != n for r in self.eps_exponents):
            raise ValueError("cocycle matrix shape does not match basis")
        for i in range(n):
            for j in range(n):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("gram matrix is not symmetric")
        _assert_cocycle_identity(self.gram, self.eps_exponents)

    @property
    def rank(self) -> int:
        return len(self.labels)

    def pair(self, u: Sequence, v: Sequence):
        if len(u) != self.rank or len(v) != self.rank:
            raise ValueError("dimension mismatch")
        return sum(u[i] * self.gram[i][j] * v[j] for i in range(self.rank) for j in range(self.rank))

    def norm(self, u: Sequence):
        return self.pair(u, u)

    def parity(self, u: Sequence) -> int:
        return int(self.norm(u)) % 2

    def eps(self, u: Sequence, v: Sequence) -> int:
        """Cocycle sign (+1 or -1) on integer vectors."""
        e = sum(
            int(u[i]) * self.eps_exponents[i][j] * int(v[j])
            for i in range(self.rank)
            for j in range(self.rank)
        )
        return -1 if e % 2 else 1


def _lattice(name: str, labels: Sequence[str], gram: IntMatrix,
             eps: Optional[IntMatrix] = None) -> IntegralLattice:
    if eps is None:
        eps = default_cocycle(gram)
    return IntegralLattice(name, tuple(labels), gram, eps, _signature(gram))


@dataclass(frozen=True)
class LatticeVector:
    """An integer coordinate vector over a named lattice basis."""

    lattice: IntegralLattice
    coords: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coords) != self.lattice.rank:
            raise ValueError("dimension mismatch")
        if any(not isinstance(x, int) for x in self.coords):
            raise ValueError("coordinates must be integers")

    def norm(self) -> int:
        return int(self.lattice.norm(self.coords))

    def pair(self, other: "LatticeVector") -> int:
        if self.lattice != other.lattice:
            raise ValueError("vectors live on different lattices")
        return int(self.lattice.pair(self.coords, other.coords))


def _root_label(coords: Sequence[int]) -> str:
    return "(" + ",".join(str(int(x)) for x in coords) + ")"


def build_L_plus(rs: RootSystem) -> IntegralLattice:
    """Rank-N lattice indexed by the positive roots, identity pairing."""
    n = rs.num_positive
    gram = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    eps = tuple(tuple(1 if i > j else 0 for j in range(n)) for i in range(n))
    labels = tuple(_root_label(a) + "+" for a in rs.positive_roots)
    return _lattice("L+", labels, gram, eps)


def build_L_minus(rs: RootSystem) -> IntegralLattice:
    """Rank-ell lattice indexed by the simple roots, negated identity pairing.

    The cocycle is the negative of the plus-side one on generators, which
    makes the exponent matrix upper triangular with ones on the diagonal.
    """
    ell = rs.rank
    gram = tuple(tuple(-1 if i == j else 0 for j in range(ell)) for i in range(ell))
    eps = tuple(tuple(1 if i <= j else 0 for j in range(ell)) for i in range(ell))
    labels = tuple(_root_label(a) + "-" for a in rs.simple_roots)
    return _lattice("L-", labels, gram, eps)


def direct_sum(a: IntegralLattice, b: IntegralLattice, name: Optional[str] = None) -> IntegralLattice:
    """Orthogonal direct sum with the parity-corrected product cocycle.

    The cross block records the sign (-1)^(<v,v> <u,u>) a graded tensor
    product inserts when the second-slot factor u moves past the first-slot
    factor v; without it the summed cocycle would violate the sign identity.
    """
    na, nb = a.rank, b.rank
    ga = _diag_parity(a.gram)
    gb = _diag_parity(b.gram)
    gram = []
    eps = []
    for i in range(na):
        gram.append(a.gram[i] + (0,) * nb)
        eps.append(a.eps_exponents[i] + (0,) * nb)
    for i in range(nb):
        gram.append((0,) * na + b.gram[i])
        eps.append(tuple(gb[i] * ga[j] for j in range(na)) + b.eps_exponents[i])
    return _lattice(name or f"{a.name}(+){b.name}", a.labels + b.labels,
                    tuple(gram), tuple(eps))


@dataclass(frozen=True)
class EmbeddedLattice:
    """A sublattice presented by basis vectors inside an ambient lattice."""

    lattice: IntegralLattice
    ambient: IntegralLattice
    basis_in_ambient: Tuple[Tuple[int, ...], ...]

    def embed(self, coords: Sequence[int]) -> Tuple[int, ...]:
        if len(coords) != self.lattice.rank:
            raise ValueError("dimension mismatch")
        n = self.ambient.rank
        out = [0] * n
        for c, row in zip(coords, self.basis_in_ambient):
            for j in range(n):
                out[j] += int(c) * row[j]
        return tuple(out)


def sublattice(ambient: IntegralLattice, basis: Sequence[Sequence[int]],
               name: str, labels: Sequence[str]) -> EmbeddedLattice:
    """Sublattice with Gram and cocycle pulled back along the embedding."""
    rows = tuple(tuple(int(x) for x in row) for row in basis)
    gram = tuple(
        tuple(int(ambient.pair(u, v)) for v in rows) for u in rows
    )
    m = len(rows)
    n = ambient.rank
    eps = tuple(
        tuple(
            sum(
                rows[i][p] * ambient.eps_exponents[p][q] * rows[j][q]
                for p in range(n)
                for q in range(n)
            )
            % 2
            for j in range(m)
        )
        for i in range(m)
    )
    return EmbeddedLattice(_lattice(name, labels, gram, eps), ambient, rows)


def f_af(rs: RootSystem, gamma: Sequence, sign: str) -> LatticeVector:
    """Embed a root-lattice element: gamma -> sum_i gamma_i alpha_i^(sign)."""
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    if len(gamma) != rs.rank:
        raise ValueError("dimension mismatch")
    coeffs = []
    for x in gamma:
        q = Q(x)
        if q.denominator != 1:
            raise ValueError("weight is not in the root lattice")
        coeffs.append(int(q))
    if sign == "+":
        lat = build_L_plus(rs)
        coords = tuple(coeffs) + (0,) * (rs.num_positive - rs.rank)
    else:
        lat = build_L_minus(rs)
        coords = tuple(coeffs)
    return LatticeVector(lat, coords)


def _coords(xi) -> Tuple[int, ...]:
    if isinstance(xi, LatticeVector):
        return xi.coords
    return tuple(int(x) for x in xi)


def g_af_plus(rs: RootSystem, xi) -> Vector:
    """Pair against the plus generators: sum over positive roots of <xi, a+> a."""
    c = _coords(xi)
    if len(c) != rs.num_positive:
        raise ValueError("dimension mismatch")
    out = [Q(0)] * rs.rank
    # the plus-side pairing is the identity form, so <xi, a+> is a coordinate
    for coeff, alpha in zip(c, rs.positive_roots):
        for j in range(rs.rank):
            out[j] += coeff * alpha[j]
    return tuple(out)


def g_af_minus(rs: RootSystem, zeta) -> Vector:
    """Pair against the minus generators: sum over simples of <zeta, a-> a."""
    c = _coords(zeta)
    if len(c) != rs.rank:
        raise ValueError("dimension mismatch")
    out = [Q(0)] * rs.rank
    for coeff, alpha in zip(c, rs.simple_roots):
        for j in range(rs.rank):
            out[j] += -coeff * alpha[j]
    return tuple(out)


def g_sc_plus(rs: RootSystem, k, xi) -> ScWeight:
    """Coset weight with value <xi, beta+> on each dual generator J*_beta."""
    c = _coords(xi)
    if len(c) != rs.num_positive:
        raise ValueError("dimension mismatch")
    return sc_weight_from_jstar(rs, k, c)


def g_sc_minus(rs: RootSystem, k, zeta) -> ScWeight:
    """Coset weight with value <zeta, beta-> on J*_beta for simple beta, else 0."""
    c = _coords(zeta)
    if len(c) != rs.rank:
        raise ValueError("dimension mismatch")
    jstar = tuple(-x for x in c) + (0,) * (rs.num_positive - rs.rank)
    return sc_weight_from_jstar(rs, k, jstar)


def form_profile(rs: RootSystem, gamma: Sequence) -> Vector:
    """Coordinates of sum over positive roots of (gamma, beta) beta+ in L+.

    The coefficients are rational for short inputs in some types, so the
    result is a plain coefficient vector rather than a LatticeVector.
    """
    g = vec(gamma)
    return tuple(rs.form(g, beta) for beta in rs.positive_roots)


def kernel_K(rs: RootSystem) -> EmbeddedLattice:
    """Kernel of g_af_plus inside L+, with basis alpha+ - f_af(alpha, +)."""
    lat = build_L_plus(rs)
    n = rs.num_positive
    basis = []
    labels = []
    for idx in range(rs.rank, n):
        alpha = rs.positive_roots[idx]
        row = [0] * n
        row[idx] = 1
        for j in range(rs.rank):
            row[j] -= alpha[j]
        basis.append(tuple(row))
        labels.append("xi" + _root_label(alpha))
    return sublattice(lat, basis, "K", labels)


def build_Qsc_dual_lattice(rs: RootSystem) -> IntegralLattice:
    """Lattice on the J generators with pairing (alpha, beta) + delta."""
    if not rs.is_simply_laced:
        raise ValueError("lattice requires a simply-laced root system")
    roots = rs.positive_roots
    gram = tuple(
        tuple(int(rs.form(a, b)) + (1 if i == j else 0) for j, b in enumerate(roots))
        for i, a in enumerate(roots)
    )
    labels = tuple("J" + _root_label(a) for a in roots)
    return _lattice("Qsc-dual", labels, gram)


def _positive_integer_level(k) -> int:
    q = Q(k)
    if q.denominator != 1 or q <= 0:
        raise ValueError("level must be a positive integer")
    return int(q)


def _long_root_gram_int(rs: RootSystem) -> IntMatrix:
    gram = rs.long_root_gram()
    return tuple(tuple(int(x) for x in row) for row in gram)


def build_E_plus_lattice(rs: RootSystem, k) -> IntegralLattice:
    """Long-root lattice rescaled by k + h_vee."""
    kk = _positive_integer_level(k)
    scale = kk + rs.dual_coxeter
    base = _long_root_gram_int(rs)
    gram = tuple(tuple(scale * x for x in row) for row in base)
    labels = tuple(_root_label(a) + "v" for a in rs.simple_roots)
    return _lattice("E+", labels, gram)


def build_E_minus_lattice(rs: RootSystem, k) -> IntegralLattice:
    """Long-root lattice rescaled by -(k + h_vee), plus a unimodular tail."""
    kk = _positive_integer_level(k)
    scale = kk + rs.dual_coxeter
    base = _long_root_gram_int(rs)
    ell = rs.rank
    tail = rs.num_positive - ell
    n = ell + tail
    gram = []
    for i in range(ell):
        gram.append(tuple(-scale * x for x in base[i]) + (0,) * tail)
    for i in range(tail):
        gram.append((0,) * ell + tuple(1 if i == j else 0 for j in range(tail)))
    labels = tuple(_root_label(a) + "v" for a in rs.simple_roots)
    labels += tuple(f"e{i + 1}" for i in range(tail))
    return _lattice("E-", labels, tuple(gram))


def discriminant_group(lattice: IntegralLattice) -> List[int]:
    """Elementary divisors (>1) of the Gram matrix, in divisibility order."""
    if lattice.rank == 0:
        return []
    det = determinant(mat(lattice.gram))
    if det == 0:
        raise ValueError("gram matrix is singular")
    divisors = smith_normal_form(lattice.gram)
    return [d for d in divisors if d > 1]


def _ldl(gram: IntMatrix) -> Tuple[List[Q], List[List[Q]]]:
    """Diagonal d and unit upper coefficients c with Q(x) = sum d_i (x_i + sum_j c_ij x_j)^2."""
    n = len(gram)
    d: List[Q] = [Q(0)] * n
    c: List[List[Q]] = [[Q(0)] * n for _ in range(n)]
    for i in range(n):
        acc = Q(gram[i][i])
        for m in range(i):
            acc -= d[m] * c[m][i] * c[m][i]
        d[i] = acc
        if acc <= 0:
            raise ValueError("lattice is not positive definite")
        for j in range(i + 1, n):
            s = Q(gram[i][j])
            for m in range(i):
                s -= d[m] * c[m][i] * c[m][j]
            c[i][j] = s / d[i]
    return d, c


def enumerate_by_norm(lattice: IntegralLattice, bound) -> List[Tuple[int, ...]]:
    """All vectors with |<v,v>| <= bound, in sorted coordinate order.

    Only definite lattices are accepted; on an indefinite one the solution
    set is infinite and the search below would not terminate.
    """
    b = Q(bound)
    if b < 0:
        raise ValueError("bound must be nonnegative")
    n = lattice.rank
    if n == 0:
        return [()]
    if lattice.signature == "indefinite":
        raise ValueError("lattice is not definite")
    gram = lattice.gram
    if lattice.signature == "negative":
        gram = tuple(tuple(-x for x in row) for row in gram)
    d, c = _ldl(gram)

    results: List[Tuple[int, ...]] = []
    partial = [0] * n

    def search(i: int, remaining: Q) -> None:
        if i < 0:
            results.append(tuple(partial))
            return
        t = sum((c[i][j] * partial[j] for j in range(i + 1, n)), Q(0))
        # safe integer window around -t, then exact acceptance per candidate
        radius = isqrt(int(remaining / d[i])) + 2
        center = round(-t)
        for x in range(center - radius, center + radius + 1):
            used = d[i] * (x + t) ** 2
            if used <= remaining:
                partial[i] = x
                search(i - 1, remaining - used)
        partial[i] = 0

    search(n - 1, b)
    return sorted(results)
