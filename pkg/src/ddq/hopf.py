"""Tensor-square algebra over the rewrite engine and the Hopf-level checks:
coassociativity, bracket/coproduct compatibility, classical limit, first-order
match with the double cocommutator, generalized cocommutativity, counit and
antipode, central elements, contraction limits, and self-duality."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .liealg import (
    CheckResult,
    DoubleAlgebra,
    LieBialgebra,
    Residual,
    StructureTensor,
    _result,
    dualize,
)
from .ncpoly import (
    NCPoly,
    RewriteEngine,
    SpecError,
    gen_mono,
    mono_degree,
    mono_str,
    mono_word,
    unit_mono,
)
from .scalars import Gaussian, ZERO, ONE, G


class TensorPoly:
    """Rank-2 or rank-3 truncated polynomial with normal-ordered legs."""

    __slots__ = ("ngens", "order", "rank", "terms")

    def __init__(self, ngens, order, rank, terms=None):
        self.ngens = ngens
        self.order = order
        self.rank = rank
        self.terms = dict(terms) if terms else {}

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, TensorPoly)
            and self.rank == other.rank
            and self.terms == other.terms
        )

    def __sub__(self, other):
        out = dict(self.terms)
        for key, c in other.terms.items():
            v = out.get(key)
            if v is None:
                out[key] = -c
            else:
                v = v - c
                if v:
                    out[key] = v
                else:
                    del out[key]
        return TensorPoly(self.ngens, self.order, self.rank, out)

    def pretty(self, labels):
        if not self.terms:
            return "0"
        bits = []
        for (k, monos), c in sorted(self.terms.items()):
            z = "" if k == 0 else ("z*" if k == 1 else f"z^{k}*")
            legs = " o ".join(mono_str(m, labels) for m in monos)
            bits.append(f"({c})*{z}{legs}")
        return " + ".join(bits)


def _merge(out: dict, key, c):
    v = out.get(key)
    if v is None:
        out[key] = c
    else:
        v = v + c
        if v:
            out[key] = v
        else:
            del out[key]


def eval_coproduct_tree(engine: RewriteEngine, node) -> dict:
    """Evaluate a parsed tensor expression into {(k, (m1, m2)): coeff}."""
    if node[0] != "tsum":
        raise SpecError("not a tensor expression")
    out: dict = {}
    for sign, legs in node[1]:
        left = engine.eval_tree(legs[0], engine.N)
        right = engine.eval_tree(legs[1], engine.N)
        for (k1, m1), c1 in left.items():
            for (k2, m2), c2 in right.items():
                k = k1 + k2
                if k > engine.N:
                    continue
                _merge(out, (k, (m1, m2)), sign * c1 * c2)
    return out


def t2_multiply(engine: RewriteEngine, A: dict, B: dict) -> dict:
    """Componentwise product (a o b)(c o d) = ac o bd with leg ordering."""
    N = engine.N
    out: dict = {}
    for (k1, (a1, b1)), c1 in A.items():
        wa1 = mono_word(a1)
        wb1 = mono_word(b1)
        for (k2, (a2, b2)), c2 in B.items():
            k = k1 + k2
            if k > N:
                continue
            c = c1 * c2
            left = engine.nf(wa1 + mono_word(a2), N - k)
            right = engine.nf(wb1 + mono_word(b2), N - k)
            for (kl, ml), cl in left.items():
                ccl = c * cl
                for (kr, mr), cr in right.items():
                    kk = k + kl + kr
                    if kk > N:
                        continue
                    _merge(out, (kk, (ml, mr)), ccl * cr)
    return out


class HopfChecker:
    """All Hopf-level checks for one spec/engine, with coproduct caches."""

    def __init__(self, engine: RewriteEngine):
        self.engine = engine
        self.spec = engine.spec
        self.labels = engine.spec.labels
        self.ngens = engine.spec.ngens
        self._unit = unit_mono(self.ngens)
        self._cop_gen: dict[int, dict] = {}
        self._cop_mono: dict = {
            self._unit: {(0, (self._unit, self._unit)): ONE}
        }

    # -- coproducts ---------------------------------------------------------

    def coproduct(self, g: int) -> dict:
        cached = self._cop_gen.get(g)
        if cached is None:
            cached = eval_coproduct_tree(self.engine, self.spec.coproducts[g])
            self._cop_gen[g] = cached
        return cached

    def coproduct_mono(self, mono) -> dict:
        cached = self._cop_mono.get(mono)
        if cached is not None:
            return cached
        g = next(i for i, e in enumerate(mono) if e)
        rest = list(mono)
        rest[g] -= 1
        rest = tuple(rest)
        out = t2_multiply(self.engine, self.coproduct(g), self.coproduct_mono(rest))
        self._cop_mono[mono] = out
        return out

    def coproduct_poly(self, p: NCPoly) -> dict:
        """Multiplicative extension of the generator coproducts."""
        out: dict = {}
        N = self.engine.N
        for (k, mono), c in p.terms.items():
            for (k2, legs), c2 in self.coproduct_mono(mono).items():
                kk = k + k2
                if kk <= N:
                    _merge(out, (kk, legs), c * c2)
        return out

    def _t2(self, terms) -> TensorPoly:
        return TensorPoly(self.ngens, self.engine.N, 2, terms)

    # -- checks --------------------------------------------------------------

    def check_coassociativity(self) -> CheckResult:
        residuals = []
        N = self.engine.N
        for g in range(self.ngens):
            acc: dict = {}
            for (k, (m1, m2)), c in self.coproduct(g).items():
                for (k2, (a, b)), c2 in self.coproduct_mono(m1).items():
                    kk = k + k2
                    if kk <= N:
                        _merge(acc, (kk, (a, b, m2)), c * c2)
                for (k2, (a, b)), c2 in self.coproduct_mono(m2).items():
                    kk = k + k2
                    if kk <= N:
                        _merge(acc, (kk, (m1, a, b)), -(c * c2))
            for (k, monos), c in sorted(acc.items()):
                residuals.append(
                    Residual(
                        f"coassociativity {self.labels[g]}",
                        " o ".join(mono_str(m, self.labels) for m in monos),
                        str(c),
                        z_order=k,
                    )
                )
        return _result("coassociativity", residuals)

    def check_homomorphism(self) -> CheckResult:
        residuals = []
        e = self.engine
        for a in range(self.ngens):
            for b in range(a + 1, self.ngens):
                bracket = e.poly(dict(e.bracket_terms(a, b, e.N)))
                lhs = self.coproduct_poly(bracket)
                A, B = self.coproduct(a), self.coproduct(b)
                rhs = t2_multiply(e, A, B)
                for key, c in t2_multiply(e, B, A).items():
                    _merge(rhs, key, -c)
                diff = self._t2(lhs) - self._t2(rhs)
                for (k, monos), c in sorted(diff.terms.items()):
                    residuals.append(
                        Residual(
                            f"homomorphism [{self.labels[a]},{self.labels[b]}]",
                            " o ".join(mono_str(m, self.labels) for m in monos),
                            str(c),
                            z_order=k,
                        )
                    )
        return _result("homomorphism", residuals)

    def check_classical_limit(self, double: DoubleAlgebra) -> CheckResult:
        """z^0 of every deformed bracket equals the classical bracket."""
        residuals = []
        e = self.engine
        for a in range(self.ngens):
            for b in range(a + 1, self.ngens):
                classical = double.bracket(a, b)
                slice0: dict = {}
                for (k, mono), c in e.bracket_terms(a, b, e.N).items():
                    if k == 0:
                        slice0[mono] = c
                expected = {gen_mono(self.ngens, g): c for g, c in classical.items()}
                keys = set(slice0) | set(expected)
                for mono in sorted(keys):
                    diff = slice0.get(mono, ZERO) - expected.get(mono, ZERO)
                    if diff:
                        residuals.append(
                            Residual(
                                f"classical limit [{self.labels[a]},{self.labels[b]}]",
                                mono_str(mono, self.labels),
                                str(diff),
                                z_order=0,
                            )
                        )
        return _result("classical_limit", residuals)

    def check_first_order(self, cocommutator: StructureTensor) -> tuple[int, CheckResult]:
        """z^1 of every coproduct equals a single global sign times the
        cocommutator induced by the canonical r-matrix."""
        z1: dict[int, dict] = {}
        for g in range(self.ngens):
            terms: dict = {}
            for (k, (m1, m2)), c in self.coproduct(g).items():
                if k == 1:
                    terms[(m1, m2)] = c
            z1[g] = terms

        def expected(g, sign):
            out: dict = {}
            for i, j, k, c in cocommutator.items():
                if k != g:
                    continue
                mi, mj = gen_mono(self.ngens, i), gen_mono(self.ngens, j)
                _merge(out, (mi, mj), sign * c)
                _merge(out, (mj, mi), -sign * c)
            return out

        def failures(sign):
            bad = {}
            for g in range(self.ngens):
                want = expected(g, sign)
                got = z1[g]
                keys = set(want) | set(got)
                diffs = []
                for key in sorted(keys):
                    d = got.get(key, ZERO) - want.get(key, ZERO)
                    if d:
                        diffs.append((key, d))
                if diffs:
                    bad[g] = diffs
            return bad

        plus, minus = failures(G(1)), failures(G(-1))
        sign, bad = (1, plus) if len(plus) <= len(minus) else (-1, minus)
        residuals = []
        for g, diffs in sorted(bad.items()):
            for (m1, m2), d in diffs:
                residuals.append(
                    Residual(
                        f"first order {self.labels[g]}",
                        f"{mono_str(m1, self.labels)} o {mono_str(m2, self.labels)}",
                        str(d),
                        z_order=1,
                    )
                )
        note = f"epsilon={'+1' if sign == 1 else '-1'}"
        return sign, CheckResult("first_order", not residuals, residuals, note)

    def check_generalized_cocommutativity(self) -> CheckResult:
        """flip(Delta_z) = Delta_{-z}, generator by generator."""
        residuals = []
        for g in range(self.ngens):
            cop = self.coproduct(g)
            diff: dict = {}
            for (k, (m1, m2)), c in cop.items():
                _merge(diff, (k, (m2, m1)), c)  # flip
                _merge(diff, (k, (m1, m2)), c if k % 2 else -c)  # minus z -> -z
            for (k, monos), c in sorted(diff.items()):
                residuals.append(
                    Residual(
                        f"generalized cocommutativity {self.labels[g]}",
                        " o ".join(mono_str(m, self.labels) for m in monos),
                        str(c),
                        z_order=k,
                    )
                )
        return _result("generalized_cocommutativity", residuals)

    def check_counit(self) -> CheckResult:
        """epsilon(g)=0: both partial counit contractions return the generator."""
        residuals = []
        for g in range(self.ngens):
            for side in (0, 1):
                acc: dict = {}
                for (k, legs), c in self.coproduct(g).items():
                    if legs[side] == self._unit:
                        _merge(acc, (k, legs[1 - side]), c)
                expect = {(0, gen_mono(self.ngens, g)): ONE}
                keys = set(acc) | set(expect)
                for key in sorted(keys):
                    d = acc.get(key, ZERO) - expect.get(key, ZERO)
                    if d:
                        residuals.append(
                            Residual(
                                f"counit {self.labels[g]} ({'left' if side == 0 else 'right'})",
                                mono_str(key[1], self.labels),
                                str(d),
                                z_order=key[0],
                            )
                        )
        return _result("counit", residuals)

    # -- antipode --------------------------------------------------------------

    def _antipode_of_mono(self, table, mono, budget) -> dict:
        """S(monomial) as the reversed product of generator antipodes."""
        e = self.engine
        out = {(0, self._unit): ONE}
        word = mono_word(mono)
        for g in reversed(word):
            out = e.multiply_terms(out, table[g], budget)
        return out

    def solve_antipode(self) -> tuple[dict, CheckResult]:
        """Solve m(S o id)Delta(g) = 0 order by order, then verify the right
        antipode axiom with the same table."""
        e = self.engine
        N = e.N
        table = {g: {} for g in range(self.ngens)}
        for level in range(N + 1):
            for g in range(self.ngens):
                acc: dict = {}
                for (k, (m1, m2)), c in self.coproduct(g).items():
                    if k > level:
                        continue
                    s = self._antipode_of_mono(table, m1, level - k)
                    for (k2, ms), c2 in s.items():
                        kk = k + k2
                        if kk > level:
                            continue
                        prod = e.nf(mono_word(ms) + mono_word(m2), level - kk)
                        for (k3, m3), c3 in prod.items():
                            if k + k2 + k3 == level:
                                _merge(acc, m3, c * c2 * c3)
                for mono, c in acc.items():
                    _merge(table[g], (level, mono), -c)
        # verify the right axiom m(id o S)Delta(g) = 0
        residuals = []
        for g in range(self.ngens):
            acc: dict = {}
            for (k, (m1, m2)), c in self.coproduct(g).items():
                s = self._antipode_of_mono(table, m2, N - k)
                for (k2, ms), c2 in s.items():
                    kk = k + k2
                    if kk > N:
                        continue
                    prod = e.nf(mono_word(m1) + mono_word(ms), N - kk)
                    for (k3, m3), c3 in prod.items():
                        _merge(acc, (kk + k3, m3), c * c2 * c3)
            for (k, mono), c in sorted(acc.items()):
                residuals.append(
                    Residual(
                        f"antipode {self.labels[g]} (right axiom)",
                        mono_str(mono, self.labels),
                        str(c),
                        z_order=k,
                    )
                )
        return table, _result("antipode", residuals)

    # -- central elements --------------------------------------------------------

    def check_central(self, element: NCPoly, name: str, primitive: bool = False) -> CheckResult:
        e = self.engine
        residuals = []
        for g in range(self.ngens):
            com = e.commutator(element, NCPoly.generator(self.ngens, e.N, g))
            for (k, mono), c in sorted(com.terms.items()):
                residuals.append(
                    Residual(
                        f"central [{name},{self.labels[g]}]",
                        mono_str(mono, self.labels),
                        str(c),
                        z_order=k,
                    )
                )
        if primitive:
            cop = self.coproduct_poly(element)
            expect: dict = {}
            for (k, mono), c in element.terms.items():
                _merge(expect, (k, (mono, self._unit)), c)
                _merge(expect, (k, (self._unit, mono)), c)
            diff = self._t2(cop) - self._t2(expect)
            for (k, monos), c in sorted(diff.terms.items()):
                residuals.append(
                    Residual(
                        f"primitive {name}",
                        " o ".join(mono_str(m, self.labels) for m in monos),
                        str(c),
                        z_order=k,
                    )
                )
        return _result("central", residuals, note=name)

    # -- symmetrized-product identities -------------------------------------------

    def check_sym_identity(self, pair: tuple[int, int], terms) -> CheckResult:
        """The bracket equals a sum of Sym[...] of ordered products."""
        e = self.engine
        lhs = e.poly(dict(e.bracket_terms(pair[0], pair[1], e.N)))
        rhs = NCPoly(self.ngens, e.N)
        for coeff, factors in terms:
            rhs = rhs + e.symmetrize_product(factors).scaled(coeff)
        diff = lhs - rhs
        residuals = [
            Residual(
                f"sym identity [{self.labels[pair[0]]},{self.labels[pair[1]]}]",
                mono_str(mono, self.labels),
                str(c),
                z_order=k,
            )
            for (k, mono), c in sorted(diff.terms.items())
        ]
        return _result("sym_identity", residuals)


def check_limit_contraction(engine_from: RewriteEngine, engine_to: RewriteEngine) -> CheckResult:
    """Instantiating the source spec at the limit binding must reproduce the
    target spec term by term (brackets and coproducts)."""
    if engine_from.ngens != engine_to.ngens or engine_from.N != engine_to.N:
        raise SpecError("contraction engines disagree in shape")
    residuals = []
    labels = engine_to.spec.labels
    for a in range(engine_from.ngens):
        for b in range(a + 1, engine_from.ngens):
            lhs = engine_from.bracket_terms(a, b, engine_from.N)
            rhs = engine_to.bracket_terms(a, b, engine_to.N)
            keys = set(lhs) | set(rhs)
            for k, mono in sorted(keys):
                d = lhs.get((k, mono), ZERO) - rhs.get((k, mono), ZERO)
                if d:
                    residuals.append(
                        Residual(
                            f"contraction bracket [{labels[a]},{labels[b]}]",
                            mono_str(mono, labels),
                            str(d),
                            z_order=k,
                        )
                    )
    hc_from, hc_to = HopfChecker(engine_from), HopfChecker(engine_to)
    for g in range(engine_from.ngens):
        lhs = hc_from.coproduct(g)
        rhs = hc_to.coproduct(g)
        keys = set(lhs) | set(rhs)
        for k, monos in sorted(keys):
            d = lhs.get((k, monos), ZERO) - rhs.get((k, monos), ZERO)
            if d:
                residuals.append(
                    Residual(
                        f"contraction coproduct {labels[g]}",
                        " o ".join(mono_str(m, labels) for m in monos),
                        str(d),
                        z_order=k,
                    )
                )
    return _result("contraction", residuals)


# -- self-duality ------------------------------------------------------------


def _morphism_residuals(b: LieBialgebra, matrix) -> list[Residual]:
    """Conditions for x_i -> sum_j M[i][j] X_j to be a bialgebra morphism onto
    the dual (bracket tensor c, cocommutator tensor f)."""
    n = b.n
    f, c = b.f, b.c
    residuals = []
    for i in range(n):
        for j in range(i + 1, n):
            lhs = [ZERO] * n
            for k in range(n):
                fk = f.coeff(i, j, k)
                if fk:
                    for m in range(n):
                        lhs[m] = lhs[m] + fk * matrix[k][m]
            rhs = [ZERO] * n
            for p in range(n):
                mip = matrix[i][p]
                if not mip:
                    continue
                for q in range(n):
                    mjq = matrix[j][q]
                    if not mjq:
                        continue
                    for m in range(n):
                        cc = c.coeff(p, q, m)
                        if cc:
                            rhs[m] = rhs[m] + mip * mjq * cc
            for m in range(n):
                if lhs[m] != rhs[m]:
                    residuals.append(
                        Residual(f"bracket image ({i},{j})", f"X{m}", str(lhs[m] - rhs[m]))
                    )
    for i in range(n):
        lhs: dict = {}
        for l, m, k, cc in c.items():
            if k != i:
                continue
            for p in range(n):
                for q in range(n):
                    val = cc * (matrix[l][p] * matrix[m][q] - matrix[m][p] * matrix[l][q])
                    if val:
                        _merge(lhs, (p, q), val)
        rhs: dict = {}
        for l, m, t, fc in f.items():
            scale = matrix[i][t]
            if not scale:
                continue
            _merge(rhs, (l, m), scale * fc)
            _merge(rhs, (m, l), -scale * fc)
        keys = set(lhs) | set(rhs)
        for key in sorted(keys):
            d = lhs.get(key, ZERO) - rhs.get(key, ZERO)
            if d:
                residuals.append(
                    Residual(f"cocommutator image x{i}", f"X{key[0]}oX{key[1]}", str(d))
                )
    return residuals


def _scale_candidates(b: LieBialgebra) -> list[Gaussian]:
    values = {ONE}
    for tensor in (b.f, b.c):
        for _, _, _, c in tensor.items():
            values.add(c)
            values.add(ONE / c)
    out = []
    for v in values:
        for s in (v, -v):
            if s not in out:
                out.append(s)
    return out


def check_self_dual(b: LieBialgebra, candidate=None) -> CheckResult:
    """Find (or verify) a linear map carrying the bialgebra onto its dual.

    The search runs over signed scaled basis permutations with scales drawn
    from the structure constants and their inverses.
    """
    n = b.n
    if candidate is not None:
        residuals = _morphism_residuals(b, candidate)
        return _result("self_dual", residuals, note="candidate map supplied")
    scales = _scale_candidates(b)
    for perm in itertools.permutations(range(n)):
        for combo in itertools.product(scales, repeat=n):
            matrix = [[ZERO] * n for _ in range(n)]
            for i in range(n):
                matrix[i][perm[i]] = combo[i]
            if not _morphism_residuals(b, matrix):
                desc = ", ".join(
                    f"x{i} -> ({combo[i]})*X{perm[i]}" for i in range(n)
                )
                return CheckResult("self_dual", True, [], note=desc)
    return CheckResult(
        "self_dual",
        False,
        [Residual("self-duality search", "scaled signed permutations", "no morphism found")],
    )
