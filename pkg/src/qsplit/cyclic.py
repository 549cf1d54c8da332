"""
Cohomology of the cyclic groups Gamma_m = Z/p^m over the p-adic integers.

Cochains on B Gamma_m use the two-periodic resolution, so the cochain
complex is  Z --0--> Z --p^m--> Z --0--> Z --p^m--> ...  with generator
t^i in degree 2i and t^i theta in degree 2i+1.

With coefficients in a complex V carrying an automorphism sigma of order
p^m, a cochain of total degree D has components (i, eps, v) with
v in V^(D - 2i - eps).  The total differential is

    D(t^i v)       = t^i dv  + t^i theta (sigma - 1) v
    D(t^i theta v) = t^(i+1) N v  - t^i theta dv,      N = 1 + sigma + ...

All coefficients are Python integers; torsion is read off Smith normal
forms and localized at p.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import ConfigurationTooLarge, InputError, NotACocycle, OddDegree, WindowTooNarrow
from .scalars import as_context
from .snf import ModuleDescription, cohomology_at, in_image_p_local

IntMatrix = List[List[int]]

MAX_BASE_DIM = 3
MAX_GROUP_ORDER = 9


def _mm(a: IntMatrix, b: IntMatrix, inner: int) -> IntMatrix:
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner) if a[i][k]) for j in range(cols)]
            for i in range(len(a))]


def _mv(a: IntMatrix, v: Sequence[int]) -> List[int]:
    return [sum(x * y for x, y in zip(row, v) if x) for row in a]


def _eye(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _zero(r: int, c: int) -> IntMatrix:
    return [[0] * c for _ in range(r)]


# --- trivial coefficients ------------------------------------------------------


@dataclass
class BGammaCochain:
    """Finitely supported cochain on B Gamma_m: degree -> integer coefficient."""

    p: int
    m: int
    coeffs: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        as_context(self.p)
        self.coeffs = {d: c for d, c in self.coeffs.items() if c}

    @classmethod
    def generator(cls, p: int, m: int, degree: int, coeff: int = 1) -> "BGammaCochain":
        if degree < 0:
            raise ValueError("generators live in nonnegative degrees")
        return cls(p, m, {degree: coeff})

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out.get(d, 0) + c
        return BGammaCochain(self.p, self.m, out)

    def __neg__(self):
        return BGammaCochain(self.p, self.m, {d: -c for d, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, s: int) -> "BGammaCochain":
        return BGammaCochain(self.p, self.m, {d: s * c for d, c in self.coeffs.items()})

    def _check(self, other):
        if (self.p, self.m) != (other.p, other.m):
            raise ValueError("cochains live on different groups")

    def __eq__(self, other):
        if not isinstance(other, BGammaCochain):
            return NotImplemented
        return (self.p, self.m, self.coeffs) == (other.p, other.m, other.coeffs)

    def reduced(self, modulus: int) -> Dict[int, int]:
        return {d: c % modulus for d, c in self.coeffs.items() if c % modulus}


def bgamma_differential(c: BGammaCochain) -> BGammaCochain:
    N = c.p ** c.m
    return BGammaCochain(c.p, c.m, {d + 1: N * x for d, x in c.coeffs.items() if d % 2 == 1})


def bgamma_cohomology(p: int, m: int, degrees: Iterable[int]) -> List[ModuleDescription]:
    """H^d(B Gamma_m; Z_p): Z_p in degree 0, Z/p^m in positive even degrees, 0 otherwise."""
    as_context(p)
    out = []
    for d in degrees:
        if d == 0:
            out.append(ModuleDescription(d, 1, []))
        elif d > 0 and d % 2 == 0:
            out.append(ModuleDescription(d, 0, [p**m]))
        else:
            out.append(ModuleDescription(d, 0, []))
    return out


def theta_square_coefficient(p: int, m: int) -> int:
    N = p**m
    return N * (N - 1) // 2


def bgamma_cup(a: BGammaCochain, b: BGammaCochain) -> BGammaCochain:
    """Chain-level cup product, extended bilinearly from the generator rules."""
    a._check(b)
    out: Dict[int, int] = {}
    tt = theta_square_coefficient(a.p, a.m)
    for da, ca in a.coeffs.items():
        for db, cb in b.coeffs.items():
            j, ea = divmod(da, 2)
            k, eb = divmod(db, 2)
            if ea and eb:
                deg, c = 2 * (j + k + 1), tt * ca * cb
            else:
                deg, c = 2 * (j + k) + ea + eb, ca * cb
            out[deg] = out.get(deg, 0) + c
    return BGammaCochain(a.p, a.m, out)


def bgamma_restrict(c: BGammaCochain, levels: int = 1) -> BGammaCochain:
    """
    Restriction from Gamma_m to the subgroup Gamma_(m - levels):
    t^i -> t^i and t^i theta -> p^levels t^i theta.
    """
    if not 0 <= levels <= c.m:
        raise ValueError(f"cannot restrict {levels} levels from m={c.m}")
    f = c.p**levels
    return BGammaCochain(c.p, c.m - levels,
                         {d: (x * f if d % 2 else x) for d, x in c.coeffs.items()})


def restrict_on_cohomology(p: int, m: int, degree: int, residue: int, levels: int = 1) -> int:
    """Image of residue * [t^(degree/2)] in H^degree(B Gamma_(m-levels)), as a residue."""
    if degree <= 0 or degree % 2:
        raise ValueError("only positive even degrees carry torsion classes")
    img = bgamma_restrict(BGammaCochain(p, m, {degree: residue}), levels)
    return img.coeffs.get(degree, 0) % p ** (m - levels)


@dataclass
class TowerReport:
    p: int
    degree: int
    levels: List[int]
    orders: List[int]  # 0 for a free module, 1 for the zero module
    maps_verified: bool
    limit: str

    def describe(self) -> str:
        def name(o):
            return "Z_p" if o == 0 else ("0" if o == 1 else f"Z/{o}")
        return " <- ".join(name(o) for o in self.orders) + f"  (limit {self.limit})"


def inverse_limit_tower(p: int, degree: int, m_range: Sequence[int]) -> TowerReport:
    """
    The inverse system H^degree(B Gamma_m) under restriction, with every
    transition map checked to be the quotient Z/p^(m+1) -> Z/p^m.
    """
    as_context(p)
    ms = sorted(m_range)
    orders = []
    for m in ms:
        (mod,) = bgamma_cohomology(p, m, [degree])
        orders.append(0 if mod.free_rank else (mod.torsion[0] if mod.torsion else 1))
    ok = True
    if degree > 0 and degree % 2 == 0:
        for lo, hi in zip(ms, ms[1:]):
            levels = hi - lo
            for x in range(p**hi):
                if restrict_on_cohomology(p, hi, degree, x, levels) != x % p**lo:
                    ok = False
        limit = "Z_p"
    elif degree == 0:
        for lo, hi in zip(ms, ms[1:]):
            ok = ok and bgamma_restrict(BGammaCochain(p, hi, {0: 1}), hi - lo).coeffs == {0: 1}
        limit = "Z_p"
    else:
        limit = "0"
    return TowerReport(p, degree, ms, orders, ok, limit)


# --- coefficients in a complex with a cyclic action ---------------------------------


@dataclass
class EquivariantComplex:
    """
    A bounded complex of free Z-modules V^q (cohomological grading) with a
    chain automorphism sigma of order p^m.

    ``d[q]`` is the matrix V^q -> V^(q+1) (shape dims[q+1] x dims[q]);
    ``sigma[q]`` is dims[q] x dims[q].  Missing entries mean zero maps and
    identity actions respectively.
    """

    p: int
    m: int
    dims: Dict[int, int]
    d: Dict[int, IntMatrix] = field(default_factory=dict)
    sigma: Dict[int, IntMatrix] = field(default_factory=dict)
    degrees_of: Dict[int, List[int]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        as_context(self.p)
        self.dims = {q: n for q, n in self.dims.items() if n > 0}
        for q, n in self.dims.items():
            self.sigma.setdefault(q, _eye(n))
            mat = self.d.get(q)
            if mat is not None and (len(mat) != self.dim(q + 1) or any(len(r) != n for r in mat)):
                raise InputError(f"differential from degree {q} has the wrong shape")
            if len(self.sigma[q]) != n or any(len(r) != n for r in self.sigma[q]):
                raise InputError(f"sigma in degree {q} has the wrong shape")

    @property
    def order(self) -> int:
        return self.p**self.m

    def dim(self, q: int) -> int:
        return self.dims.get(q, 0)

    def degrees(self) -> List[int]:
        return sorted(self.dims)

    def diff(self, q: int) -> IntMatrix:
        mat = self.d.get(q)
        return mat if mat is not None else _zero(self.dim(q + 1), self.dim(q))

    def sig(self, q: int) -> IntMatrix:
        return self.sigma.get(q, _eye(self.dim(q)))

    def sigma_power(self, q: int, k: int) -> IntMatrix:
        n = self.dim(q)
        out = _eye(n)
        for _ in range(k % self.order if self.order else k):
            out = _mm(self.sig(q), out, n)
        return out

    def norm(self, q: int) -> IntMatrix:
        n = self.dim(q)
        acc = _zero(n, n)
        cur = _eye(n)
        for _ in range(self.order):
            acc = [[x + y for x, y in zip(ra, rc)] for ra, rc in zip(acc, cur)]
            cur = _mm(self.sig(q), cur, n)
        return acc

    def check(self) -> List[str]:
        """d^2 = 0, sigma d = d sigma, sigma^(p^m) = 1, and the norm identities."""
        bad = []
        for q in self.degrees():
            n = self.dim(q)
            if self.dim(q + 2) and self.dim(q + 1):
                if any(any(r) for r in _mm(self.diff(q + 1), self.diff(q), self.dim(q + 1))):
                    bad.append(f"d^2 != 0 at degree {q}")
            if self.dim(q + 1):
                lhs = _mm(self.sig(q + 1), self.diff(q), self.dim(q + 1))
                rhs = _mm(self.diff(q), self.sig(q), n)
                if lhs != rhs:
                    bad.append(f"sigma does not commute with d at degree {q}")
            if self.sigma_power(q, self.order) != _eye(n):
                bad.append(f"sigma^{self.order} != 1 at degree {q}")
            s_minus = [[x - int(i == j) for j, x in enumerate(r)] for i, r in enumerate(self.sig(q))]
            N = self.norm(q)
            if any(any(r) for r in _mm(s_minus, N, n)) or any(any(r) for r in _mm(N, s_minus, n)):
                bad.append(f"(sigma - 1) N != 0 at degree {q}")
        return bad

    def restricted(self, levels: int = 1) -> "EquivariantComplex":
        """The same complex viewed as a Gamma_(m - levels) module via sigma^(p^levels)."""
        k = self.p**levels
        return EquivariantComplex(self.p, self.m - levels, dict(self.dims), dict(self.d),
                                  {q: self.sigma_power(q, k) for q in self.degrees()})


def trivial_complex(p: int, m: int, degree: int = 0, rank: int = 1) -> EquivariantComplex:
    return EquivariantComplex(p, m, {degree: rank})


def regular_module(p: int, m: int) -> EquivariantComplex:
    """Z[Gamma_m] in degree 0 with sigma acting by the cyclic shift e_i -> e_(i+1)."""
    N = p**m
    s = [[int(i == (j + 1) % N) for j in range(N)] for i in range(N)]
    return EquivariantComplex(p, m, {0: N}, sigma={0: s})


# cochain bookkeeping -----------------------------------------------------------


def cochain_slots(V: EquivariantComplex, D: int) -> List[Tuple[int, int, int]]:
    """Components (i, eps, q) of total degree D, in a fixed order."""
    out = []
    for q in V.degrees():
        rest = D - q
        if rest < 0:
            continue
        i, eps = divmod(rest, 2)
        out.append((i, eps, q))
    return sorted(out)


def _offsets(V, D):
    slots = cochain_slots(V, D)
    offs, pos = {}, 0
    for s in slots:
        offs[s] = pos
        pos += V.dim(s[2])
    return slots, offs, pos


@dataclass
class EquivariantCochain:
    """Cochain of total degree ``degree``: (i, eps) -> integer vector in V^(degree - 2i - eps)."""

    degree: int
    components: Dict[Tuple[int, int], List[int]] = field(default_factory=dict)

    def __post_init__(self):
        self.components = {k: list(v) for k, v in self.components.items() if any(v)}

    def is_zero(self) -> bool:
        return not self.components

    def __add__(self, other):
        if other.degree != self.degree:
            raise ValueError("degrees differ")
        out = {k: list(v) for k, v in self.components.items()}
        for k, v in other.components.items():
            out[k] = [x + y for x, y in zip(out[k], v)] if k in out else list(v)
        return EquivariantCochain(self.degree, out)

    def __neg__(self):
        return EquivariantCochain(self.degree, {k: [-x for x in v] for k, v in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, s: int) -> "EquivariantCochain":
        return EquivariantCochain(self.degree, {k: [s * x for x in v] for k, v in self.components.items()})

    def __eq__(self, other):
        if not isinstance(other, EquivariantCochain):
            return NotImplemented
        return self.degree == other.degree and self.components == other.components

    def flatten(self, V: EquivariantComplex) -> List[int]:
        slots, offs, n = _offsets(V, self.degree)
        out = [0] * n
        for (i, eps), v in self.components.items():
            q = self.degree - 2 * i - eps
            if (i, eps, q) not in offs:
                raise ValueError(f"component {(i, eps)} does not fit the complex")
            out[offs[(i, eps, q)]:offs[(i, eps, q)] + len(v)] = v
        return out

    @classmethod
    def unflatten(cls, V: EquivariantComplex, D: int, vec: Sequence[int]) -> "EquivariantCochain":
        slots, offs, _ = _offsets(V, D)
        comps = {}
        for s in slots:
            o = offs[s]
            comps[(s[0], s[1])] = list(vec[o:o + V.dim(s[2])])
        return cls(D, comps)


def total_differential_matrix(V: EquivariantComplex, D: int) -> IntMatrix:
    """Matrix of C^D(B Gamma_m; V) -> C^(D+1)."""
    src_slots, src_off, n_src = _offsets(V, D)
    _, dst_off, n_dst = _offsets(V, D + 1)
    M = _zero(n_dst, n_src)

    def put(dst_slot, col0, block):
        r0 = dst_off[dst_slot]
        for a, row in enumerate(block):
            for b, x in enumerate(row):
                if x:
                    M[r0 + a][col0 + b] += x

    for (i, eps, q) in src_slots:
        c0 = src_off[(i, eps, q)]
        dv = V.diff(q) if V.dim(q + 1) else None
        if eps == 0:
            if dv is not None:
                put((i, 0, q + 1), c0, dv)
            s = V.sig(q)
            put((i, 1, q), c0, [[x - int(a == b) for b, x in enumerate(r)] for a, r in enumerate(s)])
        else:
            put((i + 1, 0, q), c0, V.norm(q))
            if dv is not None:
                put((i, 1, q + 1), c0, [[-x for x in r] for r in dv])
    return M


def total_differential(V: EquivariantComplex, c: EquivariantCochain) -> EquivariantCochain:
    M = total_differential_matrix(V, c.degree)
    return EquivariantCochain.unflatten(V, c.degree + 1, _mv(M, c.flatten(V)))


def is_cocycle(V: EquivariantComplex, c: EquivariantCochain) -> bool:
    return total_differential(V, c).is_zero()


def is_coboundary(V: EquivariantComplex, c: EquivariantCochain) -> bool:
    """Exact membership of c in the image of the total differential, over Z_(p)."""
    M = total_differential_matrix(V, c.degree - 1)
    n_src = _offsets(V, c.degree - 1)[2]
    return in_image_p_local(M, c.flatten(V), V.p, ncols=n_src)


def cohomologous(V: EquivariantComplex, a: EquivariantCochain, b: EquivariantCochain) -> bool:
    return is_coboundary(V, a - b)


def equivariant_cohomology(V: EquivariantComplex, degrees: Iterable[int]) -> List[ModuleDescription]:
    """
    H^D(B Gamma_m; V) over Z_(p) for each requested D.

    Every C^D is finite because V is bounded below, so no truncation of the
    resolution is involved.
    """
    degrees = list(degrees)
    if not degrees:
        raise WindowTooNarrow("empty degree window")
    out = []
    for D in degrees:
        n_prev = _offsets(V, D - 1)[2]
        n = _offsets(V, D)[2]
        n_next = _offsets(V, D + 1)[2]
        d_in = total_differential_matrix(V, D - 1)
        d_out = total_differential_matrix(V, D)
        out.append(cohomology_at(d_in, d_out, n, V.p, D, n_prev, n_next))
    return out


def restrict_cochain(V: EquivariantComplex, c: EquivariantCochain, levels: int = 1) -> EquivariantCochain:
    """
    C^*(B Gamma_m; V) -> C^*(B Gamma_(m - levels); V):
    t^i v -> t^i v,  t^i theta v -> t^i theta (v + sigma v + ... + sigma^(p^levels - 1) v).
    """
    k = V.p**levels
    comps = {}
    for (i, eps), v in c.components.items():
        if eps == 0:
            comps[(i, eps)] = list(v)
            continue
        q = c.degree - 2 * i - eps
        acc = [0] * len(v)
        cur = list(v)
        for _ in range(k):
            acc = [x + y for x, y in zip(acc, cur)]
            cur = _mv(V.sig(q), cur)
        comps[(i, eps)] = acc
    return EquivariantCochain(c.degree, comps)


# --- tensor products -------------------------------------------------------------


@dataclass
class TensorComplex:
    """An EquivariantComplex together with the labels of its tensor basis."""

    complex: EquivariantComplex
    basis: Dict[int, List[tuple]]

    def index(self, q: int, label: tuple) -> int:
        return self.basis[q].index(label)


def _complex_basis(V: EquivariantComplex) -> Dict[int, List[Tuple[int, int]]]:
    return {q: [(q, i) for i in range(V.dim(q))] for q in V.degrees()}


def tensor_product(V: EquivariantComplex, W: EquivariantComplex) -> TensorComplex:
    """V (x) W with d(v w) = dv w + (-1)^|v| v dw and the diagonal action."""
    if (V.p, V.m) != (W.p, W.m):
        raise ValueError("tensor factors carry different group actions")
    basis: Dict[int, List[tuple]] = {}
    for qv in V.degrees():
        for qw in W.degrees():
            for a in range(V.dim(qv)):
                for b in range(W.dim(qw)):
                    basis.setdefault(qv + qw, []).append(((qv, a), (qw, b)))
    index = {q: {lab: n for n, lab in enumerate(labs)} for q, labs in basis.items()}
    dims = {q: len(labs) for q, labs in basis.items()}
    d, sigma = {}, {}
    for q, labs in basis.items():
        n = dims[q]
        S = _zero(n, n)
        D = _zero(dims.get(q + 1, 0), n)
        for col, ((qv, a), (qw, b)) in enumerate(labs):
            sv, sw = V.sig(qv), W.sig(qw)
            for a2 in range(V.dim(qv)):
                if sv[a2][a]:
                    for b2 in range(W.dim(qw)):
                        if sw[b2][b]:
                            S[index[q][((qv, a2), (qw, b2))]][col] += sv[a2][a] * sw[b2][b]
            if q + 1 in index:
                if V.dim(qv + 1):
                    dv = V.diff(qv)
                    for a2 in range(V.dim(qv + 1)):
                        if dv[a2][a]:
                            D[index[q + 1][((qv + 1, a2), (qw, b))]][col] += dv[a2][a]
                if W.dim(qw + 1):
                    dw = W.diff(qw)
                    sgn = -1 if qv % 2 else 1
                    for b2 in range(W.dim(qw + 1)):
                        if dw[b2][b]:
                            D[index[q + 1][((qv, a), (qw + 1, b2))]][col] += sgn * dw[b2][b]
        sigma[q] = S
        if q + 1 in index:
            d[q] = D
    return TensorComplex(EquivariantComplex(V.p, V.m, dims, d, sigma), basis)


def _tensor_vec(TC: TensorComplex, qv: int, v: Sequence[int], qw: int, w: Sequence[int]) -> List[int]:
    q = qv + qw
    out = [0] * TC.complex.dim(q)
    if not TC.complex.dim(q):
        return out
    idx = {lab: n for n, lab in enumerate(TC.basis[q])}
    for a, x in enumerate(v):
        if x:
            for b, y in enumerate(w):
                if y:
                    out[idx[((qv, a), (qw, b))]] += x * y
    return out


def coefficient_cup(V: EquivariantComplex, W: EquivariantComplex, a: EquivariantCochain,
                    b: EquivariantCochain, TC: Optional[TensorComplex] = None) -> EquivariantCochain:
    """
    Chain-level cup product C(V) x C(W) -> C(V (x) W):

        t^j v       . t^k w       = t^(j+k) (v w)
        t^j theta v . t^k w       = t^(j+k) theta (v sigma(w))
        t^j v       . t^k theta w = (-1)^|v| t^(j+k) theta (v w)
        t^j theta v . t^k theta w = (-1)^|v| t^(j+k+1) sum_{r<s} sigma^r v  sigma^s w

    The sign (-1)^|v| is the Koszul sign for moving the odd theta of the
    second factor past v.
    """
    TC = TC or tensor_product(V, W)
    N = V.order
    D = a.degree + b.degree
    out = EquivariantCochain(D)
    for (j, ea), v in a.components.items():
        qv = a.degree - 2 * j - ea
        for (k, eb), w in b.components.items():
            qw = b.degree - 2 * k - eb
            sgn = -1 if (eb and qv % 2) else 1
            if not ea and not eb:
                key, vec = (j + k, 0), _tensor_vec(TC, qv, v, qw, w)
            elif ea and not eb:
                key, vec = (j + k, 1), _tensor_vec(TC, qv, v, qw, _mv(W.sig(qw), w))
            elif not ea and eb:
                key, vec = (j + k, 1), _tensor_vec(TC, qv, v, qw, w)
            else:
                key = (j + k + 1, 0)
                vec = [0] * TC.complex.dim(qv + qw)
                powers_v = [v]
                for _ in range(N - 1):
                    powers_v.append(_mv(V.sig(qv), powers_v[-1]))
                powers_w = [w]
                for _ in range(N - 1):
                    powers_w.append(_mv(W.sig(qw), powers_w[-1]))
                for s in range(N):
                    for r in range(s):
                        vec = [x + y for x, y in zip(vec, _tensor_vec(TC, qv, powers_v[r], qw, powers_w[s]))]
            if sgn < 0:
                vec = [-x for x in vec]
            out = out + EquivariantCochain(D, {key: vec})
    return out


# --- tensor powers with the cyclic permutation action ----------------------------


@dataclass
class BaseComplex:
    """A bounded complex of free Z-modules without group action."""

    dims: Dict[int, int]
    d: Dict[int, IntMatrix] = field(default_factory=dict)

    def __post_init__(self):
        self.dims = {q: n for q, n in self.dims.items() if n > 0}

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def dim(self, q):
        return self.dims.get(q, 0)

    def diff(self, q) -> IntMatrix:
        mat = self.d.get(q)
        return mat if mat is not None else _zero(self.dim(q + 1), self.dim(q))

    def apply_d(self, q: int, v: Sequence[int]) -> List[int]:
        if not self.dim(q + 1):
            return []
        return _mv(self.diff(q), v)

    def check(self) -> List[str]:
        bad = []
        for q in self.dims:
            if self.dim(q + 2) and self.dim(q + 1):
                if any(any(r) for r in _mm(self.diff(q + 1), self.diff(q), self.dim(q + 1))):
                    bad.append(f"d^2 != 0 at degree {q}")
        return bad


def tensor_power(B: BaseComplex, p: int, m: int) -> TensorComplex:
    """
    B^(x N), N = p^m, with sigma(x1 ... xN) = (-1)^(|x1|(|x2|+...+|xN|)) x2 ... xN x1.
    """
    N = p**m
    if B.total_dim > MAX_BASE_DIM or N > MAX_GROUP_ORDER:
        raise ConfigurationTooLarge(
            f"tensor powers are capped at dim B <= {MAX_BASE_DIM} and p^m <= {MAX_GROUP_ORDER}")
    gens = [(q, i) for q in sorted(B.dims) for i in range(B.dim(q))]
    basis: Dict[int, List[tuple]] = {}
    for word in itertools.product(gens, repeat=N):
        basis.setdefault(sum(g[0] for g in word), []).append(word)
    index = {q: {w: n for n, w in enumerate(ws)} for q, ws in basis.items()}
    dims = {q: len(ws) for q, ws in basis.items()}
    d, sigma = {}, {}
    for q, words in basis.items():
        n = dims[q]
        S = _zero(n, n)
        Dm = _zero(dims.get(q + 1, 0), n)
        for col, w in enumerate(words):
            first = w[0][0]
            rest = q - first
            sgn = -1 if (first * rest) % 2 else 1
            S[index[q][w[1:] + w[:1]]][col] += sgn
            if q + 1 not in index:
                continue
            prefix = 0
            for pos, (qg, ig) in enumerate(w):
                if B.dim(qg + 1):
                    col_d = B.diff(qg)
                    s2 = -1 if prefix % 2 else 1
                    for i2 in range(B.dim(qg + 1)):
                        if col_d[i2][ig]:
                            w2 = w[:pos] + ((qg + 1, i2),) + w[pos + 1:]
                            Dm[index[q + 1][w2]][col] += s2 * col_d[i2][ig]
                prefix += qg
        sigma[q] = S
        if q + 1 in index:
            d[q] = Dm
    return TensorComplex(EquivariantComplex(p, m, dims, d, sigma), basis)


def tensor_power_vector(TC: TensorComplex, q: int, b: Sequence[int], N: int) -> List[int]:
    """Coordinates of b^(x N) for b in B^q, in the tensor basis of degree N q."""
    deg = N * q
    out = [0] * TC.complex.dim(deg)
    idx = {w: n for n, w in enumerate(TC.basis.get(deg, []))}
    support = [(i, x) for i, x in enumerate(b) if x]
    for combo in itertools.product(support, repeat=N):
        coef = 1
        for _, x in combo:
            coef *= x
        out[idx[tuple((q, i) for i, _ in combo)]] += coef
    return out


def tensor_power_class(B: BaseComplex, q: int, b: Sequence[int], p: int, m: int,
                       TC: Optional[TensorComplex] = None):
    """
    The equivariant cocycle b^(x p^m) in C^(p^m q)(B Gamma_m; B^(x p^m)),
    concentrated in the t^0 component.

    Returns ``(tensor complex, cochain)``.
    """
    if q % 2:
        raise OddDegree(f"b has odd degree {q}")
    if len(b) != B.dim(q):
        raise InputError(f"b has {len(b)} coordinates but B^{q} has rank {B.dim(q)}")
    if any(B.apply_d(q, b)):
        raise NotACocycle("db != 0")
    TC = TC or tensor_power(B, p, m)
    N = p**m
    vec = tensor_power_vector(TC, q, b, N)
    return TC, EquivariantCochain(N * q, {(0, 0): vec})
