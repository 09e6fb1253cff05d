"""Classical matrix groups over a :class:`FieldCtx` (plus small permutation groups).

Elements are numpy ``int64`` arrays: an ``n x n`` matrix of field-element
integers, or a length-``n`` image list for permutations.  Matrices act on row
vectors, so ``mul(A, B)`` means "apply A, then B"; permutations follow the
same convention (``(a*b)[i] == b[a[i]]``).

Every batch routine accepts a stack of elements in the leading axes, which is
what keeps the enumeration and Cayley-graph code fast.

Fixed forms (basis order in brackets)::

    Sp_{2m}       J = [[0, I_m], [-I_m, 0]]                [e_1..e_m, f_1..f_m]
    Omega+_{2m}   Q(x) = sum_i x_i x_{m+i}                 [e_1..e_m, f_1..f_m]
    Omega-_{2m}   Q(x) = sum_{i<m} x_i x_{m-1+i}
                         + z1^2 + z1 z2 + mu z2^2          [e_1..e_{m-1}, f_1..f_{m-1}, u, w]

with ``mu`` the least field element of absolute trace 1, so that
``t^2 + t + mu`` is irreducible.  The orthogonal families are defined in
characteristic 2 only; membership there also requires Dickson invariant
``rank(M + I) mod 2 == 0``.
"""

from __future__ import annotations

import math
from collections import Counter, OrderedDict
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from .finfield import FieldCtx, GF, field_new
from .ppd import factor_power_minus_one, factorize

GroupElement = np.ndarray

FAMILIES = ("SL", "PSL", "GL", "Sp", "OmegaPlus", "OmegaMinus", "PermGroup")
_ALIASES = {
    "sl": "SL",
    "psl": "PSL",
    "gl": "GL",
    "sp": "Sp",
    "psp": "Sp",
    "omegaplus": "OmegaPlus",
    "omega+": "OmegaPlus",
    "o+": "OmegaPlus",
    "pomegaplus": "OmegaPlus",
    "omegaminus": "OmegaMinus",
    "omega-": "OmegaMinus",
    "o-": "OmegaMinus",
    "pomegaminus": "OmegaMinus",
    "perm": "PermGroup",
    "permgroup": "PermGroup",
}
MAX_DIM = 12


class GroupError(ValueError):
    """Unsupported family/dimension, malformed element, or a non-member."""


def normalize_family(name: str) -> str:
    key = name.strip().lower().replace("_", "").replace(" ", "")
    if key in _ALIASES:
        return _ALIASES[key]
    for fam in FAMILIES:
        if fam.lower() == key:
            return fam
    raise GroupError(f"unknown group family {name!r}")


@dataclass(frozen=True)
class GroupSpec:
    family: str
    n: int
    field: FieldCtx | None = None
    generators: tuple = ()

    def __post_init__(self):
        fam = normalize_family(self.family)
        object.__setattr__(self, "family", fam)
        if fam == "PermGroup":
            if not self.generators:
                raise GroupError("PermGroup needs explicit generators")
            gens = tuple(tuple(int(i) for i in g) for g in self.generators)
            for g in gens:
                if sorted(g) != list(range(self.n)):
                    raise GroupError(f"{g} is not a permutation of 0..{self.n - 1}")
            object.__setattr__(self, "generators", gens)
            return
        if self.field is None:
            raise GroupError(f"{fam} needs a field")
        if not 2 <= self.n <= MAX_DIM:
            raise GroupError(f"dimension must be in 2..{MAX_DIM}, got {self.n}")
        if fam in ("Sp", "OmegaPlus", "OmegaMinus") and self.n % 2:
            raise GroupError(f"{fam} needs even dimension, got {self.n}")
        if fam in ("OmegaPlus", "OmegaMinus"):
            if not self.field.binary:
                raise GroupError("orthogonal families are supported in characteristic 2 only")
            if self.n < 4:
                raise GroupError("orthogonal families need n >= 4")
        if self.generators:
            gens = tuple(tuple(int(v) for v in np.asarray(g).ravel()) for g in self.generators)
            object.__setattr__(self, "generators", gens)

    @property
    def is_matrix(self) -> bool:
        return self.family != "PermGroup"

    @property
    def q(self) -> int:
        return self.field.q if self.field else 0

    @property
    def f(self) -> int:
        return self.field.f if self.field else 0

    @property
    def projective(self) -> bool:
        return self.family == "PSL"

    @property
    def e(self) -> int:
        """Dimension parameter of the ppd order: n - 2 for Omega+, n otherwise."""
        return self.n - 2 if self.family == "OmegaPlus" else self.n

    @property
    def label(self) -> str:
        if not self.is_matrix:
            return f"Perm({self.n}; {len(self.generators)} gens)"
        sym = {"OmegaPlus": "Omega+", "OmegaMinus": "Omega-"}.get(self.family, self.family)
        return f"{sym}_{self.n}({self.q})"

    def descriptor(self) -> dict:
        d = {"family": self.family, "n": self.n}
        if self.field is not None:
            d["field"] = {"kind": self.field.kind, "q": self.q, "reduction": self.field.reduction}
        if self.family == "PermGroup":
            d["generators"] = [list(g) for g in self.generators]
        return d

    def __str__(self) -> str:
        return self.label


def make_spec(family: str, n: int, q: int | None = None, *, f: int | None = None,
              p: int | None = None, generators=None) -> GroupSpec:
    """Build a GroupSpec from loose parameters (``q``, or ``f`` for 2^f, or prime ``p``)."""
    fam = normalize_family(family)
    if fam == "PermGroup":
        return GroupSpec(fam, n, None, tuple(generators or ()))
    if f is not None:
        ctx = field_new("binary", f)
    elif p is not None:
        ctx = field_new("prime", p) if p != 2 else field_new("binary", 1)
    elif q is not None:
        ctx = GF(q)
    else:
        raise GroupError("need one of q, f or p")
    return GroupSpec(fam, n, ctx, tuple(generators or ()))


# ---------------------------------------------------------------------------
# scalar-loop linear algebra over the field (small matrices)

def _as_rows(M) -> list[list[int]]:
    return [list(map(int, row)) for row in np.asarray(M)]


def det(F: FieldCtx, M) -> int:
    A = _as_rows(M)
    n = len(A)
    d = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            d = F.neg(d)
        d = F.mul(d, A[c][c])
        inv = F.inv(A[c][c])
        for r in range(c + 1, n):
            if A[r][c]:
                k = F.mul(A[r][c], inv)
                A[r] = [F.sub(a, F.mul(k, b)) for a, b in zip(A[r], A[c])]
    return d


def rank(F: FieldCtx, M) -> int:
    A = _as_rows(M)
    rows, cols = len(A), len(A[0]) if A else 0
    rk = 0
    for c in range(cols):
        piv = next((r for r in range(rk, rows) if A[r][c]), None)
        if piv is None:
            continue
        A[rk], A[piv] = A[piv], A[rk]
        inv = F.inv(A[rk][c])
        for r in range(rows):
            if r != rk and A[r][c]:
                k = F.mul(A[r][c], inv)
                A[r] = [F.sub(a, F.mul(k, b)) for a, b in zip(A[r], A[rk])]
        rk += 1
    return rk


def mat_inverse(F: FieldCtx, M) -> np.ndarray:
    A = _as_rows(M)
    n = len(A)
    aug = [row + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c]), None)
        if piv is None:
            raise GroupError("matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = F.inv(aug[c][c])
        aug[c] = [F.mul(inv, a) for a in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                k = aug[r][c]
                aug[r] = [F.sub(a, F.mul(k, b)) for a, b in zip(aug[r], aug[c])]
    return np.array([row[n:] for row in aug], dtype=np.int64)


# ---------------------------------------------------------------------------
# batch products

def matmul(F: FieldCtx, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Field matrix product with numpy broadcasting over leading axes."""
    if F.q == 2:
        return (A @ B) & 1
    if not F.binary:
        return (A @ B) % F.p
    n = A.shape[-1]
    C = F.mul_np(A[..., :, 0:1], B[..., 0:1, :])
    for j in range(1, n):
        C = C ^ F.mul_np(A[..., :, j : j + 1], B[..., j : j + 1, :])
    return C


def mul(spec: GroupSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if spec.is_matrix:
        return matmul(spec.field, a, b)
    return np.take_along_axis(np.broadcast_to(b, np.broadcast_shapes(a.shape, b.shape)),
                              np.broadcast_to(a, np.broadcast_shapes(a.shape, b.shape)), axis=-1)


def identity(spec: GroupSpec) -> np.ndarray:
    if spec.is_matrix:
        return np.eye(spec.n, dtype=np.int64)
    return np.arange(spec.n, dtype=np.int64)


def inverse(spec: GroupSpec, g: np.ndarray) -> np.ndarray:
    if spec.is_matrix:
        return mat_inverse(spec.field, g)
    return np.argsort(g).astype(np.int64)


def power(spec: GroupSpec, g: np.ndarray, k: int) -> np.ndarray:
    if k < 0:
        g, k = inverse(spec, g), -k
    result = identity(spec)
    base = np.asarray(g, dtype=np.int64)
    while k:
        if k & 1:
            result = mul(spec, result, base)
        k >>= 1
        if k:
            base = mul(spec, base, base)
    return result


def is_scalar(g: np.ndarray) -> bool:
    d = g[0, 0]
    return bool(d != 0 and np.array_equal(g, d * np.eye(g.shape[0], dtype=g.dtype)))


def is_identity(spec: GroupSpec, g: np.ndarray) -> bool:
    if spec.projective:
        return is_scalar(g)
    return bool(np.array_equal(g, identity(spec)))


@lru_cache(maxsize=None)
def _center_scalars(spec: GroupSpec) -> tuple[int, ...]:
    if not spec.projective:
        return (1,)
    return tuple(spec.field.roots_of_unity(spec.n))


def canonical(spec: GroupSpec, g: np.ndarray) -> np.ndarray:
    """Projective normal form: the scalar multiple with least row-major tuple."""
    g = np.asarray(g, dtype=np.int64)
    lams = _center_scalars(spec)
    if len(lams) == 1:
        return g
    cands = [spec.field.mul_np(g, lam) for lam in lams]
    return min(cands, key=lambda c: tuple(c.ravel()))


def equal(spec: GroupSpec, g: np.ndarray, h: np.ndarray) -> bool:
    return bool(np.array_equal(canonical(spec, g), canonical(spec, h)))


# ---------------------------------------------------------------------------
# integer keys (for hashing and tables)

@lru_cache(maxsize=None)
def key_weights(spec: GroupSpec) -> np.ndarray | None:
    """Place values of the row-major base-q (or base-n for perms) encoding,
    or None when the encoding does not fit in 63 bits."""
    if spec.is_matrix:
        base, width = spec.q, spec.n * spec.n
    else:
        base, width = spec.n, spec.n
    if base ** width >= 1 << 63:
        return None
    return np.array([base ** (width - 1 - k) for k in range(width)], dtype=np.int64)


def encode(spec: GroupSpec, A: np.ndarray) -> np.ndarray:
    w = key_weights(spec)
    if w is None:
        raise GroupError(f"element encoding of {spec} does not fit in 63 bits")
    flat = A.reshape(A.shape[:-2] + (-1,)) if spec.is_matrix else A
    return flat @ w


def decode(spec: GroupSpec, keys) -> np.ndarray:
    keys = np.array(keys, dtype=np.int64, copy=True)
    base = spec.q if spec.is_matrix else spec.n
    width = spec.n * spec.n if spec.is_matrix else spec.n
    out = np.empty(keys.shape + (width,), dtype=np.int64)
    for k in range(width - 1, -1, -1):
        out[..., k] = keys % base
        keys //= base
    if spec.is_matrix:
        return out.reshape(keys.shape + (spec.n, spec.n))
    return out


def canonical_keys(spec: GroupSpec, A: np.ndarray) -> np.ndarray:
    """Keys of the projective normal forms of a stack of elements."""
    lams = _center_scalars(spec)
    keys = encode(spec, A)
    for lam in lams[1:]:
        keys = np.minimum(keys, encode(spec, spec.field.mul_np(A, lam)))
    return keys


def element_key(spec: GroupSpec, g: np.ndarray) -> tuple:
    """Hashable key for a single element (no width limit)."""
    return tuple(int(v) for v in canonical(spec, g).ravel())


# ---------------------------------------------------------------------------
# forms

@lru_cache(maxsize=None)
def anisotropic_mu(F: FieldCtx) -> int:
    return next(a for a in range(1, F.q) if F.trace(a) == 1)


@lru_cache(maxsize=None)
def form_matrix(spec: GroupSpec) -> np.ndarray:
    """Gram matrix (Sp) or upper-triangular quadratic-form matrix (Omega)."""
    n, F = spec.n, spec.field
    m = n // 2
    M = np.zeros((n, n), dtype=np.int64)
    if spec.family == "Sp":
        for i in range(m):
            M[i, m + i] = 1
            M[m + i, i] = F.neg(1)
    elif spec.family == "OmegaPlus":
        for i in range(m):
            M[i, m + i] = 1
    elif spec.family == "OmegaMinus":
        h = m - 1
        for i in range(h):
            M[i, h + i] = 1
        M[n - 2, n - 2] = 1
        M[n - 2, n - 1] = 1
        M[n - 1, n - 1] = anisotropic_mu(F)
    else:
        raise GroupError(f"{spec.family} has no form")
    M.setflags(write=False)
    return M


def _polar(spec: GroupSpec) -> np.ndarray:
    Qm = form_matrix(spec)
    return Qm ^ Qm.T


def quadratic_value(spec: GroupSpec, v) -> int:
    F, Qm = spec.field, form_matrix(spec)
    v = list(map(int, v))
    acc = 0
    for i in range(spec.n):
        for j in range(i, spec.n):
            if Qm[i, j] and v[i] and v[j]:
                acc = F.add(acc, F.mul(int(Qm[i, j]), F.mul(v[i], v[j])))
    return acc


def bilinear(spec: GroupSpec, u, v) -> int:
    G = _polar(spec) if spec.family != "Sp" else form_matrix(spec)
    return int(matmul(spec.field, np.asarray(u, dtype=np.int64)[None, :],
                      matmul(spec.field, G, np.asarray(v, dtype=np.int64)[:, None]))[0, 0])


def dickson_invariant(spec: GroupSpec, M) -> int:
    F = spec.field
    D = F.add_np(np.asarray(M, dtype=np.int64), np.eye(spec.n, dtype=np.int64))
    return rank(F, D) % 2


# ---------------------------------------------------------------------------
# membership and orders

def _check_shape(spec: GroupSpec, M) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64)
    if spec.is_matrix:
        if M.shape != (spec.n, spec.n):
            raise GroupError(f"expected a {spec.n}x{spec.n} matrix, got shape {M.shape}")
        if M.min() < 0 or M.max() >= spec.q:
            raise GroupError(f"matrix entries must lie in [0, {spec.q})")
    elif M.shape != (spec.n,):
        raise GroupError(f"expected a permutation of degree {spec.n}")
    return M


def in_group(spec: GroupSpec, M) -> bool:
    M = _check_shape(spec, M)
    F = spec.field
    fam = spec.family
    if fam == "PermGroup":
        if sorted(M.tolist()) != list(range(spec.n)):
            return False
        from .smallgrp import perm_closure_keys

        return int(encode(spec, M)) in perm_closure_keys(spec)
    if fam == "GL":
        return det(F, M) != 0
    if fam in ("SL", "PSL"):
        return det(F, M) == 1
    if fam == "Sp":
        J = form_matrix(spec)
        return bool(np.array_equal(matmul(F, matmul(F, M, J), M.T), J))
    # orthogonal, characteristic 2
    Qm = form_matrix(spec)
    A = matmul(F, matmul(F, M, Qm), M.T)
    if not np.array_equal(np.diag(A), np.diag(Qm)):
        return False
    if not np.array_equal(A ^ A.T, Qm ^ Qm.T):
        return False
    return dickson_invariant(spec, M) == 0


def _order_pieces(spec: GroupSpec) -> tuple[int, list[tuple[int, int]]]:
    """(power of q, [(i, sign)]) with |G| = q^k * prod (q^i + sign) before the PSL quotient."""
    n = spec.n
    m = n // 2
    fam = spec.family
    if fam in ("SL", "PSL"):
        return n * (n - 1) // 2, [(i, -1) for i in range(2, n + 1)]
    if fam == "GL":
        return n * (n - 1) // 2, [(i, -1) for i in range(1, n + 1)]
    if fam == "Sp":
        return m * m, [(2 * i, -1) for i in range(1, m + 1)]
    if fam == "OmegaPlus":
        return m * (m - 1), [(m, -1)] + [(2 * i, -1) for i in range(1, m)]
    if fam == "OmegaMinus":
        return m * (m - 1), [(m, +1)] + [(2 * i, -1) for i in range(1, m)]
    raise GroupError(f"no order formula for {fam}")


@lru_cache(maxsize=None)
def group_order(spec: GroupSpec) -> int:
    """Exact order from the standard product formulas (enumeration for PermGroup)."""
    if spec.family == "PermGroup":
        from .smallgrp import perm_closure_keys

        return len(perm_closure_keys(spec))
    q = spec.q
    k, pieces = _order_pieces(spec)
    order = q**k
    for i, s in pieces:
        order *= q**i + s
    if spec.projective:
        order //= math.gcd(spec.n, q - 1)
    return order


@lru_cache(maxsize=None)
def group_order_factors(spec: GroupSpec) -> dict[int, int]:
    """Prime factorization of the group order, assembled from cyclotomic pieces."""
    if spec.family == "PermGroup":
        return dict(factorize(group_order(spec)))
    F = spec.field
    p, f = F.char, F.f
    k, pieces = _order_pieces(spec)
    out: Counter = Counter({p: k * f})
    for i, s in pieces:
        if s < 0:
            out.update(factor_power_minus_one(p, i * f))
        else:
            out.update(factor_power_minus_one(p, 2 * i * f))
            out.subtract(factor_power_minus_one(p, i * f))
    if spec.projective:
        out.subtract(factorize(math.gcd(spec.n, spec.q - 1)))
    fac = {r: e for r, e in out.items() if e > 0}
    assert reduce(lambda a, b: a * b, (r**e for r, e in fac.items()), 1) == group_order(spec)
    return fac


def element_order(spec: GroupSpec, g, check: bool = True) -> int:
    """Multiplicative order by dividing primes out of the factored group order."""
    g = np.asarray(g, dtype=np.int64)
    if check and not in_group(spec, g):
        raise GroupError(f"element is not in {spec}")
    m = group_order(spec)
    for r in group_order_factors(spec):
        while m % r == 0 and is_identity(spec, power(spec, g, m // r)):
            m //= r
    return m


# ---------------------------------------------------------------------------
# named elements and generators

def suzuki_involution(n: int, l: int, F: FieldCtx) -> np.ndarray:
    """Block unitriangular involution [[I_l,0,0],[0,I_{n-2l},0],[I_l,0,I_l]]."""
    if not (1 <= l and 2 * l <= n):
        raise GroupError(f"need 1 <= l <= n/2, got n={n}, l={l}")
    M = np.eye(n, dtype=np.int64)
    for i in range(l):
        M[n - l + i, i] = 1
    return M


def _elementary(n: int, i: int, j: int, t: int) -> np.ndarray:
    M = np.eye(n, dtype=np.int64)
    M[i, j] = t
    return M


def _block(A, B, C, D) -> np.ndarray:
    return np.block([[A, B], [C, D]]).astype(np.int64)


def eichler(spec: GroupSpec, u, v) -> np.ndarray:
    """Eichler transformation x -> x + B(x,u) v - B(x,v) u - Q(v) B(x,u) u
    for singular u and v orthogonal to u."""
    F, n = spec.field, spec.n
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if quadratic_value(spec, u) != 0 or bilinear(spec, u, v) != 0:
        raise GroupError("Eichler transformation needs u singular and B(u, v) = 0")
    qv = quadratic_value(spec, v)
    rows = []
    for k in range(n):
        x = np.zeros(n, dtype=np.int64)
        x[k] = 1
        bu, bv = bilinear(spec, x, u), bilinear(spec, x, v)
        coef_u = F.neg(F.add(bv, F.mul(qv, bu)))
        row = F.add_np(x, F.add_np(F.mul_np(v, bu), F.mul_np(u, coef_u)))
        rows.append(row)
    return np.array(rows, dtype=np.int64)


@lru_cache(maxsize=None)
def _standard_generators(spec: GroupSpec) -> tuple[np.ndarray, ...]:
    fam, n, F = spec.family, spec.n, spec.field
    if fam == "PermGroup":
        return tuple(np.array(g, dtype=np.int64) for g in spec.generators)
    if spec.generators:
        return tuple(np.array(g, dtype=np.int64).reshape(n, n) for g in spec.generators)
    basis = F.additive_basis()
    gens: list[np.ndarray] = []
    if fam in ("SL", "PSL", "GL"):
        # elementary transvections on adjacent positions generate SL_n(q)
        for i in range(n - 1):
            for t in basis:
                gens.append(_elementary(n, i, i + 1, t))
                gens.append(_elementary(n, i + 1, i, t))
        if fam == "GL" and F.q > 2:
            D = np.eye(n, dtype=np.int64)
            D[0, 0] = F.generator
            gens.append(D)
    elif fam in ("Sp", "OmegaPlus"):
        # root elements for a simple system and its negative (Chevalley generators)
        m = n // 2
        Z, I = np.zeros((m, m), dtype=np.int64), np.eye(m, dtype=np.int64)
        for i in range(m - 1):
            for t in basis:
                for A in (_elementary(m, i, i + 1, t), _elementary(m, i + 1, i, t)):
                    gens.append(_block(A, Z, Z, mat_inverse(F, A).T))
        for t in basis:
            S = np.zeros((m, m), dtype=np.int64)
            if fam == "Sp":
                S[m - 1, m - 1] = t
            else:
                S[m - 2, m - 1] = t
                S[m - 1, m - 2] = F.neg(t)
            gens.append(_block(I, S, Z, I))
            lower = S if fam == "OmegaPlus" else S
            if fam == "Sp":
                lower = np.zeros((m, m), dtype=np.int64)
                lower[m - 1, m - 1] = F.neg(t)
            gens.append(_block(I, Z, lower, I))
    elif fam == "OmegaMinus":
        # Eichler transformations E_{u,v}, u a hyperbolic basis vector
        m = n // 2
        h = m - 1

        def unit(k, t=1):
            x = np.zeros(n, dtype=np.int64)
            x[k] = t
            return x

        hyper = list(range(2 * h))
        partner = {k: (k + h) % (2 * h) for k in hyper}
        for k in hyper:
            targets = [unit(j) for j in hyper if j != k and j != partner[k]]
            targets += [unit(n - 2, t) for t in basis] + [unit(n - 1, t) for t in basis]
            for v in targets:
                gens.append(eichler(spec, unit(k), v))
    else:  # pragma: no cover
        raise GroupError(f"no generators for {fam}")
    for g in gens:
        g.setflags(write=False)
    return tuple(gens)


def standard_generators(spec: GroupSpec) -> list[np.ndarray]:
    """Documented generating set for the family.

    SL/PSL/GL: elementary transvections ``I + t E_{i,i+1}`` and ``I + t E_{i+1,i}``
    for t in an additive basis of the field (GL adds ``diag(w, 1, ..., 1)``).
    Sp and Omega+: Levi transvections ``diag(A, A^-T)`` plus the unipotent
    root elements ``[[I, S], [0, I]]`` / ``[[I, 0], [S', I]]`` for the last
    simple root (``S = t E_mm`` resp. ``t (E_{m-1,m} - E_{m,m-1})``).
    Omega-: Eichler transformations ``E_{u,v}`` with u a hyperbolic basis
    vector and v another hyperbolic basis vector (not u's partner) or a basis
    multiple of an anisotropic-plane vector.
    PermGroup: the explicit generators.
    """
    return [g.copy() for g in _standard_generators(spec)]


# ---------------------------------------------------------------------------
# random elements

class ProductReplacer:
    """Product replacement with an accumulator ("rattle").

    Each step replaces a random slot ``s_i`` by ``s_i * s_j^{+-1}`` or
    ``s_j^{+-1} * s_i`` and multiplies the accumulator by the new slot.
    """

    def __init__(self, spec: GroupSpec, rng: np.random.Generator, slots: int | None = None,
                 burn_in: int = 100, stride: int = 4):
        gens = standard_generators(spec)
        if not gens:
            raise GroupError(f"{spec} has no generators")
        self.spec = spec
        self.rng = rng
        self.stride = stride
        k = slots or max(10, len(gens) + 2)
        self.slots = [gens[i % len(gens)] for i in range(k)]
        self.inverses = [inverse(spec, s) for s in self.slots]
        self.acc = identity(spec)
        for _ in range(burn_in):
            self._step()

    def _step(self) -> None:
        k = len(self.slots)
        i, j = self.rng.choice(k, size=2, replace=False)
        if self.rng.integers(2):
            other, other_inv = self.slots[j], self.inverses[j]
        else:
            other, other_inv = self.inverses[j], self.slots[j]
        if self.rng.integers(2):
            new = mul(self.spec, self.slots[i], other)
            new_inv = mul(self.spec, other_inv, self.inverses[i])
        else:
            new = mul(self.spec, other, self.slots[i])
            new_inv = mul(self.spec, self.inverses[i], other_inv)
        self.slots[i] = new
        self.inverses[i] = new_inv
        self.acc = mul(self.spec, self.acc, new)

    def next(self) -> np.ndarray:
        for _ in range(self.stride):
            self._step()
        return canonical(self.spec, self.acc.copy())


# (id(rng), spec) -> (rng, replacer); numpy generators cannot be weakly referenced,
# so the rng is held alongside its state and the oldest entries are evicted.
_REPLACERS: OrderedDict = OrderedDict()
_MAX_REPLACERS = 64


def random_element(spec: GroupSpec, rng: np.random.Generator) -> np.ndarray:
    """Near-uniform random element; the product-replacement state is tied to ``rng``."""
    key = (id(rng), spec)
    hit = _REPLACERS.get(key)
    if hit is None or hit[0] is not rng:
        hit = (rng, ProductReplacer(spec, rng))
        _REPLACERS[key] = hit
        while len(_REPLACERS) > _MAX_REPLACERS:
            _REPLACERS.popitem(last=False)
    _REPLACERS.move_to_end(key)
    return hit[1].next()


# ---------------------------------------------------------------------------
# literals

def parse_matrix(text: str, spec: GroupSpec | None = None) -> np.ndarray:
    """Parse ``"1,0,0;0,1,0;1,0,1"`` (rows separated by ';')."""
    try:
        rows = [[int(v) for v in row.split(",")] for row in text.strip().split(";")]
    except ValueError as exc:
        raise GroupError(f"malformed matrix literal {text!r}") from exc
    if len({len(r) for r in rows}) != 1:
        raise GroupError(f"ragged matrix literal {text!r}")
    M = np.array(rows, dtype=np.int64)
    if spec is not None:
        _check_shape(spec, M)
    return M


def format_matrix(M) -> str:
    M = np.asarray(M)
    if M.ndim == 1:
        return ",".join(str(int(v)) for v in M)
    return ";".join(",".join(str(int(v)) for v in row) for row in M)
