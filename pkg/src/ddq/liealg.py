"""Lie bialgebras, Drinfel'd doubles, and the classical check suite.

Structure tensors are stored in bracket layout: the triple (i, j, k) with
i < j holds the coefficient of generator k in the bracket of generators i
and j, antisymmetry in (i, j) being implicit.  The cocommutator tensor c is
stored the same way, read as the bracket tensor of the dual basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .scalars import Gaussian, QuadExt, ZERO, ONE, G, ScalarError


class DoubleConstructionError(ValueError):
    """A bialgebra axiom failed while building a double; carries the axiom name."""

    def __init__(self, axiom: str, violations):
        self.axiom = axiom
        self.violations = violations
        super().__init__(f"axiom {axiom} fails at {len(violations)} index tuples")


@dataclass
class Residual:
    """One nonzero term left over by a check."""

    location: str
    term: str
    coefficient: str
    z_order: int | None = None

    def to_json(self):
        out = {"location": self.location, "term": self.term, "coefficient": self.coefficient}
        if self.z_order is not None:
            out["z_order"] = self.z_order
        return out


@dataclass
class CheckResult:
    """Structured pass/fail record for a single check."""

    check: str
    passed: bool
    residuals: list[Residual] = field(default_factory=list)
    note: str = ""

    def to_json(self):
        out = {
            "check": self.check,
            "pass": self.passed,
            "residuals": [r.to_json() for r in self.residuals],
        }
        if self.note:
            out["note"] = self.note
        return out


def _result(check: str, residuals, note: str = "") -> CheckResult:
    return CheckResult(check, not residuals, list(residuals), note)


class StructureTensor:
    """Antisymmetric 3-index tensor of exact scalars in bracket layout."""

    __slots__ = ("dim", "_rows")

    def __init__(self, dim: int, triples=()):
        self.dim = dim
        self._rows: dict[tuple[int, int], dict[int, Gaussian]] = {}
        for i, j, k, c in triples:
            self.add(i, j, k, c)

    def add(self, i: int, j: int, k: int, c: Gaussian):
        if isinstance(c, (int, str, Fraction)):
            c = G(c) if not isinstance(c, str) else G(Fraction(c))
        if i == j:
            if c:
                raise ValueError(f"nonzero diagonal component ({i},{j},{k})")
            return
        if i > j:
            i, j, c = j, i, -c
        row = self._rows.setdefault((i, j), {})
        val = row.get(k, ZERO) + c
        if val:
            row[k] = val
        else:
            row.pop(k, None)
            if not row:
                self._rows.pop((i, j), None)

    def coeff(self, i: int, j: int, k: int) -> Gaussian:
        if i == j:
            return ZERO
        if i < j:
            return self._rows.get((i, j), {}).get(k, ZERO)
        return -self._rows.get((j, i), {}).get(k, ZERO)

    def row(self, i: int, j: int) -> dict[int, Gaussian]:
        """Bracket of generators i and j as a {generator: coefficient} map."""
        if i == j:
            return {}
        if i < j:
            return dict(self._rows.get((i, j), {}))
        return {k: -c for k, c in self._rows.get((j, i), {}).items()}

    def items(self):
        for (i, j), row in sorted(self._rows.items()):
            for k, c in sorted(row.items()):
                yield i, j, k, c

    def is_zero(self) -> bool:
        return not self._rows

    def __eq__(self, other):
        if not isinstance(other, StructureTensor):
            return NotImplemented
        if self.dim != other.dim:
            return False
        return {t[:3]: t[3] for t in self.items()} == {t[:3]: t[3] for t in other.items()}

    def to_json(self):
        return {
            "dim": self.dim,
            "triples": [[i, j, k, str(c)] for i, j, k, c in self.items()],
        }

    @classmethod
    def from_json(cls, doc) -> "StructureTensor":
        t = cls(doc["dim"])
        for i, j, k, c in doc["triples"]:
            from .scalars import eval_coefficient

            t.add(i, j, k, eval_coefficient(c) if isinstance(c, str) else G(c))
        return t

    def __repr__(self):
        return f"StructureTensor(dim={self.dim}, {list(self.items())})"


@dataclass
class LieBialgebra:
    """Dimension n plus the bracket tensor f and cocommutator tensor c."""

    n: int
    f: StructureTensor
    c: StructureTensor

    def __post_init__(self):
        if self.f.dim != self.n or self.c.dim != self.n:
            raise ValueError("tensor dimensions disagree with n")


def generator_labels(n: int) -> list[str]:
    return [f"x{i}" for i in range(n)] + [f"X{i}" for i in range(n)]


class DoubleAlgebra:
    """2n-dimensional double with bracket table, labels, and canonical pairing."""

    def __init__(self, n: int, brackets, labels=None, pairing=None):
        self.n = n
        self.dim = 2 * n
        self.labels = list(labels) if labels else generator_labels(n)
        self.brackets: dict[tuple[int, int], dict[int, Gaussian]] = {}
        for (a, b), row in brackets.items():
            if a == b:
                continue
            if a > b:
                a, b = b, a
                row = {k: -c for k, c in row.items()}
            clean = {k: c for k, c in row.items() if c}
            if clean:
                self.brackets[(a, b)] = clean
        if pairing is None:
            pairing = [[ZERO] * self.dim for _ in range(self.dim)]
            for i in range(n):
                pairing[i][n + i] = ONE
                pairing[n + i][i] = ONE
        self.pairing = pairing

    def bracket(self, a: int, b: int) -> dict[int, Gaussian]:
        if a == b:
            return {}
        if a < b:
            return self.brackets.get((a, b), {})
        return {k: -c for k, c in self.brackets.get((b, a), {}).items()}

    def bracket_elements(self, va: dict[int, Gaussian], vb: dict[int, Gaussian]) -> dict[int, Gaussian]:
        out: dict[int, Gaussian] = {}
        for a, ca in va.items():
            for b, cb in vb.items():
                scale = ca * cb
                if not scale:
                    continue
                for k, c in self.bracket(a, b).items():
                    val = out.get(k, ZERO) + scale * c
                    if val:
                        out[k] = val
                    else:
                        out.pop(k, None)
        return out

    def term_str(self, coeffs: dict[int, Gaussian]) -> str:
        if not coeffs:
            return "0"
        parts = []
        for k in sorted(coeffs):
            c = coeffs[k]
            parts.append(f"({c})*{self.labels[k]}" if str(c) not in ("1",) else self.labels[k])
        return " + ".join(parts)

    def __repr__(self):
        return f"DoubleAlgebra(n={self.n})"


@dataclass
class TensorElement:
    """Finitely supported rank-2 or rank-3 tensor over the double's generators."""

    rank: int
    comps: dict[tuple, Gaussian] = field(default_factory=dict)

    def add(self, idx: tuple, c: Gaussian):
        if len(idx) != self.rank:
            raise ValueError("index rank mismatch")
        val = self.comps.get(idx, ZERO) + c
        if val:
            self.comps[idx] = val
        else:
            self.comps.pop(idx, None)

    def scaled(self, s: Gaussian) -> "TensorElement":
        return TensorElement(self.rank, {k: s * v for k, v in self.comps.items() if s * v})

    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = TensorElement(self.rank, dict(self.comps))
        for k, v in other.comps.items():
            out.add(k, v)
        return out

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + other.scaled(G(-1))

    def is_zero(self) -> bool:
        return not self.comps

    def transpose(self) -> "TensorElement":
        if self.rank != 2:
            raise ValueError("transpose needs rank 2")
        return TensorElement(2, {(b, a): c for (a, b), c in self.comps.items()})

    def __eq__(self, other):
        return isinstance(other, TensorElement) and self.rank == other.rank and self.comps == other.comps


# --- classical checks ----------------------------------------------------


def jacobiator(t: StructureTensor, i: int, j: int, k: int) -> dict[int, Gaussian]:
    """[[i,j],k] + [[j,k],i] + [[k,i],j] expanded through the tensor."""
    out: dict[int, Gaussian] = {}
    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
        for l, cl in t.row(a, b).items():
            for m, cm in t.row(l, c).items():
                val = out.get(m, ZERO) + cl * cm
                if val:
                    out[m] = val
                else:
                    out.pop(m, None)
    return out


def check_jacobi(t: StructureTensor, name: str = "jacobi") -> CheckResult:
    residuals = []
    for i in range(t.dim):
        for j in range(i + 1, t.dim):
            for k in range(j + 1, t.dim):
                res = jacobiator(t, i, j, k)
                for m, c in sorted(res.items()):
                    residuals.append(Residual(f"triple ({i},{j},{k})", f"e{m}", str(c)))
    return _result(name, residuals)


def check_cocycle(b: LieBialgebra) -> CheckResult:
    """Compatibility of (f, c): the cocycle identity at every (a,b,i,j)."""
    f, c, n = b.f, b.c, b.n
    residuals = []
    for a in range(n):
        for bb in range(n):
            for i in range(n):
                for j in range(n):
                    lhs = ZERO
                    for k in range(n):
                        lhs = lhs + f.coeff(a, bb, k) * c.coeff(i, j, k)
                    rhs = ZERO
                    for k in range(n):
                        rhs = rhs + f.coeff(a, k, i) * c.coeff(k, j, bb)
                        rhs = rhs + f.coeff(k, bb, i) * c.coeff(k, j, a)
                        rhs = rhs + f.coeff(a, k, j) * c.coeff(i, k, bb)
                        rhs = rhs + f.coeff(k, bb, j) * c.coeff(i, k, a)
                    if lhs != rhs:
                        residuals.append(
                            Residual(f"cocycle ({a},{bb},{i},{j})", "difference", str(lhs - rhs))
                        )
    return _result("cocycle", residuals)


def dualize(b: LieBialgebra) -> LieBialgebra:
    """Swap the roles of bracket and cocommutator."""
    return LieBialgebra(b.n, b.c, b.f)


def build_double(b: LieBialgebra) -> DoubleAlgebra:
    """Assemble the 2n-dimensional double; rejects invalid bialgebras."""
    jac_f = check_jacobi(b.f, "jacobi(f)")
    if not jac_f.passed:
        raise DoubleConstructionError("jacobi(f)", jac_f.residuals)
    jac_c = check_jacobi(b.c, "jacobi(c)")
    if not jac_c.passed:
        raise DoubleConstructionError("jacobi(c)", jac_c.residuals)
    coc = check_cocycle(b)
    if not coc.passed:
        raise DoubleConstructionError("cocycle", coc.residuals)

    n = b.n
    brackets: dict[tuple[int, int], dict[int, Gaussian]] = {}
    for i, j, k, c in b.f.items():
        brackets.setdefault((i, j), {})[k] = c
    for i, j, k, c in b.c.items():
        brackets.setdefault((n + i, n + j), {})[n + k] = c
    # crossed sector: bracket of x^i with X_j from the two tensors
    for i in range(n):
        for j in range(n):
            row: dict[int, Gaussian] = {}
            for k in range(n):
                cc = b.c.coeff(j, k, i)
                if cc:
                    row[k] = row.get(k, ZERO) + cc
                fc = b.f.coeff(i, k, j)
                if fc:
                    row[n + k] = row.get(n + k, ZERO) - fc
            row = {k: v for k, v in row.items() if v}
            if row:
                brackets[(i, n + j)] = row
    return DoubleAlgebra(n, brackets)


def check_double_jacobi(d: DoubleAlgebra) -> CheckResult:
    residuals = []
    for i in range(d.dim):
        for j in range(i + 1, d.dim):
            for k in range(j + 1, d.dim):
                acc: dict[int, Gaussian] = {}
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    inner = d.bracket(a, b)
                    for m, cm in d.bracket_elements(inner, {c: ONE}).items():
                        val = acc.get(m, ZERO) + cm
                        if val:
                            acc[m] = val
                        else:
                            acc.pop(m, None)
                for m, cval in sorted(acc.items()):
                    residuals.append(
                        Residual(
                            f"jacobi ({d.labels[i]},{d.labels[j]},{d.labels[k]})",
                            d.labels[m],
                            str(cval),
                        )
                    )
    return _result("double_jacobi", residuals)


def check_pairing_invariance(d: DoubleAlgebra) -> CheckResult:
    """Ad-invariance <[a,b],c> + <b,[a,c]> = 0 for all basis triples."""
    residuals = []
    P = d.pairing

    def pair(vec: dict[int, Gaussian], c: int):
        s = ZERO
        for k, coeff in vec.items():
            p = P[k][c]
            if p:
                s = s + coeff * p
        return s

    for a in range(d.dim):
        for b in range(d.dim):
            for c in range(d.dim):
                val = pair(d.bracket(a, b), c) + pair(d.bracket(a, c), b)
                if val:
                    residuals.append(
                        Residual(
                            f"pairing ({d.labels[a]},{d.labels[b]},{d.labels[c]})",
                            "<[a,b],c>+<b,[a,c]>",
                            str(val),
                        )
                    )
    return _result("pairing_invariance", residuals)


@dataclass
class CanonicalStructures:
    r: TensorElement
    r_skew: TensorElement
    omega: TensorElement
    casimir: dict[tuple[int, int], Gaussian]  # symmetric degree-2 element


def canonical_structures(d: DoubleAlgebra) -> CanonicalStructures:
    """The canonical r-matrix, its skew part, the symmetric invariant, and the
    quadratic Casimir of the double."""
    n = d.n
    r = TensorElement(2)
    omega = TensorElement(2)
    casimir: dict[tuple[int, int], Gaussian] = {}
    half = G(Fraction(1, 2))
    for i in range(n):
        r.add((i, n + i), ONE)
        omega.add((i, n + i), ONE)
        omega.add((n + i, i), ONE)
        casimir[(i, n + i)] = ONE
    r_skew = r - omega.scaled(half)
    return CanonicalStructures(r, r_skew, omega, casimir)


def tensor_ad_action(d: DoubleAlgebra, y: int, t: TensorElement) -> TensorElement:
    """Adjoint action of generator y on a tensor, leg by leg."""
    out = TensorElement(t.rank)
    for idx, c in t.comps.items():
        for leg in range(t.rank):
            for m, cm in d.bracket(y, idx[leg]).items():
                new = idx[:leg] + (m,) + idx[leg + 1 :]
                out.add(new, c * cm)
    return out


def check_omega_invariance(d: DoubleAlgebra) -> CheckResult:
    omega = canonical_structures(d).omega
    residuals = []
    for y in range(d.dim):
        act = tensor_ad_action(d, y, omega)
        for idx, c in sorted(act.comps.items()):
            residuals.append(
                Residual(f"ad_{d.labels[y]}(Omega)", "x".join(d.labels[i] for i in idx), str(c))
            )
    return _result("omega_invariance", residuals)


def schouten_bracket(d: DoubleAlgebra, rho: TensorElement) -> TensorElement:
    """[[rho,rho]] of a rank-2 tensor via the double's brackets on leg pairs."""
    if rho.rank != 2:
        raise ValueError("schouten bracket needs a rank-2 tensor")
    out = TensorElement(3)
    items = list(rho.comps.items())
    for (i, j), cij in items:
        for (k, l), ckl in items:
            scale = cij * ckl
            if not scale:
                continue
            for m, cm in d.bracket(i, k).items():  # [rho_12, rho_13]
                out.add((m, j, l), scale * cm)
            for m, cm in d.bracket(j, k).items():  # [rho_12, rho_23]
                out.add((i, m, l), scale * cm)
            for m, cm in d.bracket(j, l).items():  # [rho_13, rho_23]
                out.add((i, k, m), scale * cm)
    return out


def check_schouten_r(d: DoubleAlgebra) -> CheckResult:
    """Classical Yang-Baxter equation for the canonical r-matrix."""
    s = schouten_bracket(d, canonical_structures(d).r)
    residuals = [
        Residual("[[r,r]]", "x".join(d.labels[i] for i in idx), str(c))
        for idx, c in sorted(s.comps.items())
    ]
    return _result("schouten_r", residuals)


def check_schouten_skew_invariance(d: DoubleAlgebra) -> CheckResult:
    """[[r_skew, r_skew]] must be ad-invariant (modified Yang-Baxter)."""
    s = schouten_bracket(d, canonical_structures(d).r_skew)
    residuals = []
    for y in range(d.dim):
        act = tensor_ad_action(d, y, s)
        for idx, c in sorted(act.comps.items()):
            residuals.append(
                Residual(
                    f"ad_{d.labels[y]}([[r_skew,r_skew]])",
                    "x".join(d.labels[i] for i in idx),
                    str(c),
                )
            )
    return _result("schouten_skew_invariance", residuals)


def cocommutator_from_r(d: DoubleAlgebra, r: TensorElement) -> StructureTensor:
    """Cocommutator delta(Y) = [Y x 1 + 1 x Y, r] as a tensor on 2n generators."""
    t = StructureTensor(d.dim)
    for y in range(d.dim):
        delta = tensor_ad_action(d, y, r)
        seen = set()
        for (a, b), c in delta.comps.items():
            if (b, a) in seen:
                continue
            seen.add((a, b))
            opposite = delta.comps.get((b, a), ZERO)
            if opposite != -c:
                raise ValueError(
                    f"cocommutator of {d.labels[y]} is not antisymmetric at ({a},{b})"
                )
            if a < b:
                t.add(a, b, y, c)
            else:
                t.add(b, a, y, -c)
    return t


def expected_double_cocommutator(b: LieBialgebra) -> StructureTensor:
    """(c on the x sector, -f on the dual sector) as one tensor on 2n generators."""
    n = b.n
    t = StructureTensor(2 * n)
    for i, j, k, c in b.c.items():
        t.add(i, j, k, c)  # delta(x^k) = c^k_{ij} x^i^x^j
    for i, j, k, c in b.f.items():
        t.add(n + i, n + j, n + k, -c)
    return t


def check_cocommutator_match(d: DoubleAlgebra, b: LieBialgebra) -> CheckResult:
    derived = cocommutator_from_r(d, canonical_structures(d).r)
    expected = expected_double_cocommutator(b)
    residuals = []
    keys = {t[:3] for t in derived.items()} | {t[:3] for t in expected.items()}
    for i, j, k in sorted(keys):
        diff = derived.coeff(i, j, k) - expected.coeff(i, j, k)
        if diff:
            residuals.append(
                Residual(
                    f"delta({d.labels[k]})",
                    f"{d.labels[i]}x{d.labels[j]}",
                    str(diff),
                )
            )
    return _result("cocommutator_match", residuals)


def check_casimir(d: DoubleAlgebra) -> CheckResult:
    """Centrality of the quadratic Casimir, in the symmetric degree-2 space.

    ad_Y acts by the Leibniz rule on symmetric products; vanishing there
    implies vanishing of [Y, C] in the enveloping algebra.
    """
    casimir = canonical_structures(d).casimir
    residuals = []
    for y in range(d.dim):
        acc: dict[tuple[int, int], Gaussian] = {}

        def sym_add(a: int, b: int, c: Gaussian):
            key = (a, b) if a <= b else (b, a)
            val = acc.get(key, ZERO) + c
            if val:
                acc[key] = val
            else:
                acc.pop(key, None)

        for (a, b), c in casimir.items():
            for m, cm in d.bracket(y, a).items():
                sym_add(m, b, c * cm)
            for m, cm in d.bracket(y, b).items():
                sym_add(a, m, c * cm)
        for (a, b), c in sorted(acc.items()):
            residuals.append(
                Residual(f"[{d.labels[y]}, C]", f"{d.labels[a]}v{d.labels[b]}", str(c))
            )
    return _result("casimir", residuals)


# --- change of basis ------------------------------------------------------


def matrix_inverse(m):
    """Exact inverse by Gauss elimination; entries may carry one formal radical."""
    dim = len(m)
    aug = [[m[i][j] for j in range(dim)] + [ONE if i == j else ZERO for j in range(dim)] for i in range(dim)]
    for col in range(dim):
        pivot = None
        for r in range(col, dim):
            if aug[r][col]:
                pivot = r
                break
        if pivot is None:
            raise ScalarError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col] if not isinstance(aug[col][col], (Gaussian, QuadExt)) else None
        pivot_val = aug[col][col]
        aug[col] = [v / pivot_val for v in aug[col]]
        for r in range(dim):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [aug[r][j] - factor * aug[col][j] for j in range(2 * dim)]
    return [row[dim:] for row in aug]


@dataclass
class BasisChangeReport:
    pairing_preserved: bool
    pairing_matrix: list
    transformed: DoubleAlgebra
    residuals: list[Residual]


def apply_change_of_basis(d: DoubleAlgebra, matrix, labels=None) -> tuple[DoubleAlgebra, BasisChangeReport]:
    """Express the double in the basis e'_a = sum_b M[a][b] e_b.

    Returns the transformed double and a report stating whether M preserves
    the canonical pairing.  Entries may involve one formal radical.
    """
    dim = d.dim
    minv = matrix_inverse(matrix)
    new_brackets: dict[tuple[int, int], dict[int, Gaussian]] = {}
    for a in range(dim):
        for b in range(a + 1, dim):
            row: dict[int, Gaussian] = {}
            for i in range(dim):
                ma = matrix[a][i]
                if not ma:
                    continue
                for j in range(dim):
                    mb = matrix[b][j]
                    if not mb:
                        continue
                    scale = ma * mb
                    for k, c in d.bracket(i, j).items():
                        for cc in range(dim):
                            mk = minv[k][cc]
                            if mk:
                                val = row.get(cc, ZERO) + scale * c * mk
                                if val:
                                    row[cc] = val
                                else:
                                    row.pop(cc, None)
            if row:
                new_brackets[(a, b)] = row
    new_pairing = []
    for a in range(dim):
        new_pairing.append(
            [
                sum(
                    (matrix[a][i] * d.pairing[i][j] * matrix[b][j] for i in range(dim) for j in range(dim) if d.pairing[i][j]),
                    ZERO,
                )
                for b in range(dim)
            ]
        )
    residuals = []
    for a in range(dim):
        for b in range(dim):
            if new_pairing[a][b] != d.pairing[a][b]:
                residuals.append(
                    Residual(
                        f"pairing ({a},{b})",
                        "difference",
                        str(new_pairing[a][b] - d.pairing[a][b]),
                    )
                )
    transformed = DoubleAlgebra(d.n, new_brackets, labels=labels, pairing=new_pairing)
    return transformed, BasisChangeReport(not residuals, new_pairing, transformed, residuals)


def split_bialgebra(d: DoubleAlgebra) -> LieBialgebra:
    """Read (f, c) off a double whose sectors close; checks the crossed sector.

    Used after a pairing-preserving block change of basis, where the first n
    generators still span the algebra and the last n its dual.
    """
    n = d.n
    f = StructureTensor(n)
    c = StructureTensor(n)
    for (a, b), row in d.brackets.items():
        if a < n and b < n:
            for k, coeff in row.items():
                if k >= n:
                    raise ValueError("algebra sector does not close")
                f.add(a, b, k, coeff)
        elif a >= n and b >= n:
            for k, coeff in row.items():
                if k < n:
                    raise ValueError("dual sector does not close")
                c.add(a - n, b - n, k - n, coeff)
    bial = LieBialgebra(n, f, c)
    rebuilt = build_double(bial)
    for i in range(n):
        for j in range(n):
            if rebuilt.bracket(i, n + j) != d.bracket(i, n + j):
                raise ValueError(
                    f"crossed bracket [{d.labels[i]},{d.labels[n + j]}] is not of double type"
                )
    return bial


def check_crossed_brackets(d: DoubleAlgebra, printed: dict[tuple[int, int], dict[int, Gaussian]]) -> CheckResult:
    """Compare the double's crossed sector against printed rows."""
    residuals = []
    for (i, j), row in sorted(printed.items()):
        derived = d.bracket(i, d.n + j)
        keys = set(row) | set(derived)
        for k in sorted(keys):
            diff = derived.get(k, ZERO) - row.get(k, ZERO)
            if diff:
                residuals.append(
                    Residual(
                        f"[{d.labels[i]},{d.labels[d.n + j]}]",
                        d.labels[k],
                        str(diff),
                    )
                )
    return _result("crossed_print", residuals)
