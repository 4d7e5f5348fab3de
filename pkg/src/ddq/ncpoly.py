"""Truncated z-graded noncommutative polynomial engine.

Elements are sums of z^k * (normal-ordered monomial) with Gaussian-rational
coefficients, truncated above a fixed z order N.  The generator order is
x0 < x1 < ... < X0 < X1 < ...; straightening rewrites descents b*a into
a*b - [a,b] using the active deformation spec's bracket table.  A bracket's
z^k coefficient must have total degree <= k+1 (admissibility), which makes
the weight (degree - z order) drop on every correction and bounds rewriting.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .liealg import CheckResult, Residual, _result
from .scalars import Gaussian, ZERO, ONE, I, G, eval_coefficient, ParamBinding


class SpecError(ValueError):
    """Malformed or inadmissible deformation data."""


ATOM_KINDS = ("exp", "cosh", "sinh", "cos", "sin", "sinhc", "cosh_sqrt", "sinhc_sqrt")

Mono = tuple
Word = tuple


def unit_mono(ngens: int) -> Mono:
    return (0,) * ngens


def gen_mono(ngens: int, g: int) -> Mono:
    return tuple(1 if i == g else 0 for i in range(ngens))


def mono_degree(m: Mono) -> int:
    return sum(m)


def mono_mul(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def mono_word(m: Mono) -> Word:
    out = []
    for g, e in enumerate(m):
        out.extend([g] * e)
    return tuple(out)


def word_mono(w: Word, ngens: int) -> Mono:
    m = [0] * ngens
    for g in w:
        m[g] += 1
    return tuple(m)


def mono_str(m: Mono, labels) -> str:
    parts = []
    for g, e in enumerate(m):
        if e == 1:
            parts.append(labels[g])
        elif e > 1:
            parts.append(f"{labels[g]}^{e}")
    return "*".join(parts) if parts else "1"


class NCPoly:
    """Truncation-bounded polynomial: {(z_order, monomial): coefficient}."""

    __slots__ = ("ngens", "order", "terms")

    def __init__(self, ngens: int, order: int, terms=None):
        self.ngens = ngens
        self.order = order
        self.terms: dict = dict(terms) if terms else {}

    @classmethod
    def zero(cls, ngens, order):
        return cls(ngens, order)

    @classmethod
    def scalar(cls, ngens, order, c):
        c = c if isinstance(c, Gaussian) else G(c)
        return cls(ngens, order, {(0, unit_mono(ngens)): c} if c else None)

    @classmethod
    def generator(cls, ngens, order, g):
        return cls(ngens, order, {(0, gen_mono(ngens, g)): ONE})

    def __add__(self, other):
        out = dict(self.terms)
        for key, c in other.terms.items():
            v = out.get(key)
            if v is None:
                out[key] = c
            else:
                v = v + c
                if v:
                    out[key] = v
                else:
                    del out[key]
        return NCPoly(self.ngens, self.order, out)

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
        return NCPoly(self.ngens, self.order, out)

    def scaled(self, c) -> "NCPoly":
        c = c if isinstance(c, Gaussian) else G(c)
        if not c:
            return NCPoly(self.ngens, self.order)
        return NCPoly(self.ngens, self.order, {k: c * v for k, v in self.terms.items()})

    def z_slice(self, k: int) -> dict:
        return {mono: c for (kk, mono), c in self.terms.items() if kk == k}

    def is_zero(self) -> bool:
        return not self.terms

    def weight(self) -> int:
        """Largest degree - z_order over the support (-order when empty)."""
        if not self.terms:
            return -self.order
        return max(mono_degree(m) - k for (k, m) in self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, NCPoly)
            and self.ngens == other.ngens
            and self.terms == other.terms
        )

    def pretty(self, labels=None) -> str:
        labels = labels or [f"g{i}" for i in range(self.ngens)]
        if not self.terms:
            return "0"
        bits = []
        for (k, m), c in sorted(self.terms.items()):
            z = "" if k == 0 else ("z*" if k == 1 else f"z^{k}*")
            bits.append(f"({c})*{z}{mono_str(m, labels)}")
        return " + ".join(bits)

    def __repr__(self):
        return f"NCPoly({self.pretty()})"


@dataclass(frozen=True)
class SeriesAtom:
    """One analytic factor: kind, square parameter w (for *_sqrt kinds),
    scale a, and a linear combination of pairwise-commuting generators."""

    kind: str
    scale: Gaussian
    arg: tuple  # ((gen, coeff), ...)
    w: Gaussian = ZERO

    def arg_gens(self):
        return [g for g, _ in self.arg]


# ----------------------------------------------------------------- parsing

_NAME = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_"
_NAMETAIL = _NAME + "0123456789'"


def _scan(text: str):
    """Tokens: name, number (p or p/q), brace-scalar, and punctuation."""
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "{":
            depth = 1
            j = i + 1
            while j < n and depth:
                if text[j] == "{":
                    depth += 1
                elif text[j] == "}":
                    depth -= 1
                j += 1
            if depth:
                raise SpecError(f"unbalanced brace in {text!r}")
            toks.append(("brace", text[i + 1 : j - 1]))
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "/" and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            toks.append(("num", Fraction(text[i:j])))
            i = j
            continue
        if ch in _NAME:
            j = i
            while j < n and text[j] in _NAMETAIL:
                j += 1
            toks.append(("name", text[i:j]))
            i = j
            continue
        if ch in "+-*();^":
            toks.append(("op", ch))
            i += 1
            continue
        raise SpecError(f"bad character {ch!r} in {text!r}")
    return toks


class _ExprParser:
    """Parses the textual expression form used by catalog and user spec files."""

    def __init__(self, text: str, labels, binding: ParamBinding):
        self.text = text
        self.toks = _scan(text)
        self.pos = 0
        self.labels = list(labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.binding = binding

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val = self.next()
        if kind != "op" or val != op:
            raise SpecError(f"expected {op!r} in {self.text!r}")

    def parse_tensor(self):
        """sum of tensor terms; returns ('tsum', [(coeff_sign, legs)])."""
        terms = []
        sign = ONE
        if self.peek() == ("op", "-"):
            self.next()
            sign = -ONE
        while True:
            legs = [self.parse_product()]
            while self.peek() == ("name", "o"):
                self.next()
                legs.append(self.parse_product())
            terms.append((sign, legs))
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                sign = ONE if val == "+" else -ONE
                continue
            break
        if self.pos != len(self.toks):
            raise SpecError(f"trailing input in {self.text!r}")
        return ("tsum", terms)

    def parse_expr(self):
        node = self.parse_tensor()
        for _, legs in node[1]:
            if len(legs) != 1:
                raise SpecError(f"tensor product not allowed here: {self.text!r}")
        return ("sum", [("prod", [("scalar", s)] + legs[0][1]) for s, legs in node[1]])

    def parse_product(self):
        factors = [self.parse_factor()]
        while self.peek() == ("op", "*"):
            self.next()
            factors.append(self.parse_factor())
        return ("prod", factors)

    def parse_factor(self):
        kind, val = self.next()
        if kind == "num":
            return ("scalar", Gaussian(val))
        if kind == "brace":
            return ("scalar", self._coeff(val))
        if kind == "name":
            if val == "z":
                if self.peek() == ("op", "^"):
                    self.next()
                    k2, v2 = self.next()
                    if k2 != "num" or v2.denominator != 1:
                        raise SpecError(f"bad z power in {self.text!r}")
                    return ("zpow", int(v2))
                return ("zpow", 1)
            if val == "i":
                return ("scalar", I)
            if val in ATOM_KINDS:
                return ("atom", self.parse_atom(val))
            if val in self.index:
                return ("gen", self.index[val])
            raise SpecError(f"unknown name {val!r} in {self.text!r}")
        raise SpecError(f"unexpected token in {self.text!r}")

    def parse_atom(self, kind) -> SeriesAtom:
        self.expect_op("(")
        scalar = self.parse_signed_scalar()
        self.expect_op(";")
        arg = self.parse_linear()
        self.expect_op(")")
        if kind in ("cosh_sqrt", "sinhc_sqrt"):
            return SeriesAtom(kind, ONE, arg, w=scalar)
        return SeriesAtom(kind, scalar, arg)

    def parse_signed_scalar(self) -> Gaussian:
        sign = ONE
        while self.peek() == ("op", "-"):
            self.next()
            sign = -sign
        kind, val = self.next()
        if kind == "num":
            base = Gaussian(val)
        elif kind == "brace":
            base = self._coeff(val)
        elif kind == "name" and val == "i":
            base = I
        else:
            raise SpecError(f"expected scalar in {self.text!r}")
        if self.peek() == ("op", "*"):
            self.next()
            return sign * base * self.parse_signed_scalar()
        return sign * base

    def parse_linear(self):
        items = []
        sign = ONE
        if self.peek() == ("op", "-"):
            self.next()
            sign = -ONE
        while True:
            coeff = ONE
            kind, val = self.peek()
            if kind in ("num", "brace") or (kind == "name" and val == "i"):
                self.next()
                coeff = Gaussian(val) if kind == "num" else (I if kind == "name" else self._coeff(val))
                self.expect_op("*")
            kind, val = self.next()
            if kind != "name" or val not in self.index:
                raise SpecError(f"expected generator in linear argument of {self.text!r}")
            items.append((self.index[val], sign * coeff))
            k2, v2 = self.peek()
            if k2 == "op" and v2 in "+-":
                self.next()
                sign = ONE if v2 == "+" else -ONE
                continue
            break
        merged: dict[int, Gaussian] = {}
        for g, c in items:
            v = merged.get(g, ZERO) + c
            if v:
                merged[g] = v
            else:
                merged.pop(g, None)
        return tuple(sorted(merged.items()))

    def _coeff(self, text) -> Gaussian:
        from .scalars import bind_parameters

        return bind_parameters(self.binding, text)


def parse_element(text: str, labels, binding: ParamBinding):
    """Parse a non-tensor expression into an evaluable tree."""
    return _ExprParser(text, labels, binding).parse_expr()


def parse_coproduct(text: str, labels, binding: ParamBinding):
    """Parse a rank-2 tensor expression; every term must have exactly 2 legs."""
    node = _ExprParser(text, labels, binding).parse_tensor()
    for _, legs in node[1]:
        if len(legs) != 2:
            raise SpecError(f"coproduct term with {len(legs)} legs in {text!r}")
    return node


@dataclass
class DeformationSpec:
    """Bracket and coproduct tables of one quantization, fully bound."""

    ngens: int
    labels: list
    brackets: dict  # (a, b) with a < b -> expression tree
    coproducts: dict  # generator -> tensor tree
    provenance: str = ""

    def __post_init__(self):
        for a in range(self.ngens):
            for b in range(a + 1, self.ngens):
                if (a, b) not in self.brackets:
                    raise SpecError(
                        f"missing bracket [{self.labels[a]},{self.labels[b]}]"
                    )
        for g in range(self.ngens):
            if g not in self.coproducts:
                raise SpecError(f"missing coproduct of {self.labels[g]}")

    @classmethod
    def from_strings(cls, labels, brackets, coproducts, binding, provenance=""):
        index = {lab: i for i, lab in enumerate(labels)}
        btab = {}
        for pair, text in brackets.items():
            a_lab, b_lab = pair.split(",")
            a, b = index[a_lab.strip()], index[b_lab.strip()]
            if a > b:
                raise SpecError(f"bracket pair {pair!r} out of order")
            btab[(a, b)] = parse_element(text, labels, binding)
        ctab = {}
        for lab, text in coproducts.items():
            ctab[index[lab]] = parse_coproduct(text, labels, binding)
        return cls(len(labels), list(labels), btab, ctab, provenance)


_FACT = [Fraction(1, factorial(j)) for j in range(40)]


class RewriteEngine:
    """Evaluation and normal ordering for one spec at one truncation order."""

    def __init__(self, spec: DeformationSpec, order: int, zsign: int = 1):
        self.spec = spec
        self.N = order
        self.ngens = spec.ngens
        self.zsign = zsign
        self._unit = unit_mono(spec.ngens)
        self._nf: dict = {}
        self._brackets: dict = {}
        self._busy: set = set()
        self.rewrite_steps = 0

    # -- brackets ---------------------------------------------------------

    def bracket_terms(self, a: int, b: int, budget: int | None = None) -> dict:
        """Normal form of [g_a, g_b] (a < b) up to z^budget."""
        if budget is None:
            budget = self.N
        if budget < 0:
            return {}
        key = (a, b, budget)
        cached = self._brackets.get(key)
        if cached is not None:
            return cached
        if key in self._busy:
            raise SpecError(
                f"cyclic z^0 dependency straightening [{self.spec.labels[a]},{self.spec.labels[b]}]"
            )
        self._busy.add(key)
        try:
            terms = self.eval_tree(self.spec.brackets[(a, b)], budget)
        finally:
            self._busy.discard(key)
        self._brackets[key] = terms
        return terms

    def generators_commute(self, a: int, b: int) -> bool:
        if a == b:
            return True
        if a > b:
            a, b = b, a
        return not self.bracket_terms(a, b, self.N)

    # -- normal ordering ---------------------------------------------------

    def nf(self, word: Word, budget: int | None = None) -> dict:
        """Normal form of a product of generators as {(k, mono): coeff}."""
        if budget is None:
            budget = self.N
        if budget < 0:
            return {}
        descent = -1
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                descent = i
                break
        if descent < 0:
            return {(0, word_mono(word, self.ngens)): ONE}
        key = (word, budget)
        cached = self._nf.get(key)
        if cached is not None:
            return cached
        self.rewrite_steps += 1
        i = descent
        b, a = word[i], word[i + 1]
        out = dict(self.nf(word[:i] + (a, b) + word[i + 2 :], budget))
        for (k, mono), c in self.bracket_terms(a, b, budget).items():
            inner = word[:i] + mono_word(mono) + word[i + 2 :]
            for (k2, m2), c2 in self.nf(inner, budget - k).items():
                kk = k + k2
                cc = c * c2
                v = out.get((kk, m2))
                if v is None:
                    out[(kk, m2)] = -cc
                else:
                    v = v - cc
                    if v:
                        out[(kk, m2)] = v
                    else:
                        del out[(kk, m2)]
        self._nf[key] = out
        return out

    def nf_random(self, word: Word, rng, budget: int | None = None) -> dict:
        """Uncached normal form choosing a random descent at each step."""
        if budget is None:
            budget = self.N
        if budget < 0:
            return {}
        descents = [i for i in range(len(word) - 1) if word[i] > word[i + 1]]
        if not descents:
            return {(0, word_mono(word, self.ngens)): ONE}
        i = rng.choice(descents)
        b, a = word[i], word[i + 1]
        out = dict(self.nf_random(word[:i] + (a, b) + word[i + 2 :], rng, budget))
        for (k, mono), c in self.bracket_terms(a, b, budget).items():
            inner = word[:i] + mono_word(mono) + word[i + 2 :]
            for (k2, m2), c2 in self.nf_random(inner, rng, budget - k).items():
                kk = k + k2
                v = out.get((kk, m2))
                if v is None:
                    out[(kk, m2)] = -c * c2
                else:
                    v = v - c * c2
                    if v:
                        out[(kk, m2)] = v
                    else:
                        del out[(kk, m2)]
        return out

    # -- multiplication ----------------------------------------------------

    def multiply_terms(self, p: dict, q: dict, budget: int | None = None) -> dict:
        if budget is None:
            budget = self.N
        out: dict = {}
        for (k1, m1), c1 in p.items():
            w1 = mono_word(m1)
            top1 = w1[-1] if w1 else -1
            for (k2, m2), c2 in q.items():
                k = k1 + k2
                if k > budget:
                    continue
                c = c1 * c2
                w2 = mono_word(m2)
                if not w2 or not w1 or top1 <= w2[0]:
                    key = (k, mono_mul(m1, m2))
                    v = out.get(key)
                    if v is None:
                        out[key] = c
                    else:
                        v = v + c
                        if v:
                            out[key] = v
                        else:
                            del out[key]
                else:
                    for (k3, m3), c3 in self.nf(w1 + w2, budget - k).items():
                        key = (k + k3, m3)
                        cc = c * c3
                        v = out.get(key)
                        if v is None:
                            out[key] = cc
                        else:
                            v = v + cc
                            if v:
                                out[key] = v
                            else:
                                del out[key]
        return out

    # -- series atoms ------------------------------------------------------

    def _atom_orders(self, atom: SeriesAtom, budget: int):
        """Yield (z_order, scalar, power of the argument)."""
        kind = atom.kind
        eps = self.zsign
        if kind == "exp":
            for j in range(budget + 1):
                yield j, atom.scale**j * Gaussian(_FACT[j]) * (ONE if eps == 1 or j % 2 == 0 else -ONE), j
        elif kind == "sinh":
            for j in range(1, budget + 1, 2):
                yield j, atom.scale**j * Gaussian(_FACT[j]) * (ONE if eps == 1 else -ONE), j
        elif kind == "cosh":
            for j in range(0, budget + 1, 2):
                yield j, atom.scale**j * Gaussian(_FACT[j]), j
        elif kind == "sin":
            for m in range(0, (budget + 1) // 2 + 1):
                j = 2 * m + 1
                if j > budget:
                    break
                sgn = ONE if m % 2 == 0 else -ONE
                yield j, sgn * atom.scale**j * Gaussian(_FACT[j]) * (ONE if eps == 1 else -ONE), j
        elif kind == "cos":
            for m in range(0, budget // 2 + 1):
                j = 2 * m
                sgn = ONE if m % 2 == 0 else -ONE
                yield j, sgn * atom.scale**j * Gaussian(_FACT[j]), j
        elif kind == "sinhc":
            for m in range(0, budget // 2 + 1):
                j = 2 * m
                yield j, atom.scale**j * Gaussian(_FACT[j + 1]), j + 1
        elif kind == "cosh_sqrt":
            for m in range(0, budget // 2 + 1):
                j = 2 * m
                yield j, atom.w**m * Gaussian(_FACT[j]), j
        elif kind == "sinhc_sqrt":
            for m in range(0, budget // 2 + 1):
                j = 2 * m
                yield j, atom.w**m * Gaussian(_FACT[j + 1]), j + 1
        else:
            raise SpecError(f"unknown atom kind {kind!r}")

    def expand_atom_terms(self, atom: SeriesAtom, budget: int | None = None) -> dict:
        if budget is None:
            budget = self.N
        max_power = 0
        orders = list(self._atom_orders(atom, budget))
        for _, _, j in orders:
            max_power = max(max_power, j)
        # powers of the commuting linear argument
        powers = [{self._unit: ONE}]
        lin = {gen_mono(self.ngens, g): c for g, c in atom.arg}
        for _ in range(max_power):
            nxt: dict = {}
            for m1, c1 in powers[-1].items():
                for m2, c2 in lin.items():
                    key = mono_mul(m1, m2)
                    v = nxt.get(key)
                    c = c1 * c2
                    if v is None:
                        nxt[key] = c
                    else:
                        nxt[key] = v + c
            powers.append(nxt)
        out: dict = {}
        for k, scalar, j in orders:
            if not scalar:
                continue
            for m, c in powers[j].items():
                key = (k, m)
                v = out.get(key)
                cc = scalar * c
                if v is None:
                    out[key] = cc
                else:
                    v = v + cc
                    if v:
                        out[key] = v
                    else:
                        del out[key]
        return out

    # -- expression trees ---------------------------------------------------

    def eval_tree(self, node, budget: int | None = None) -> dict:
        if budget is None:
            budget = self.N
        op = node[0]
        if op == "sum":
            out: dict = {}
            for child in node[1]:
                for key, c in self.eval_tree(child, budget).items():
                    v = out.get(key)
                    if v is None:
                        out[key] = c
                    else:
                        v = v + c
                        if v:
                            out[key] = v
                        else:
                            del out[key]
            return out
        if op == "prod":
            terms = {(0, self._unit): ONE}
            for child in node[1]:
                terms = self.multiply_terms(terms, self.eval_tree(child, budget), budget)
                if not terms:
                    return terms
            return terms
        if op == "scalar":
            c = node[1]
            return {(0, self._unit): c} if c else {}
        if op == "zpow":
            k = node[1]
            if k > budget:
                return {}
            eps = ONE if self.zsign == 1 or k % 2 == 0 else -ONE
            return {(k, self._unit): eps}
        if op == "gen":
            return {(0, gen_mono(self.ngens, node[1])): ONE}
        if op == "atom":
            return self.expand_atom_terms(node[1], budget)
        raise SpecError(f"bad expression node {node[0]!r}")

    # -- public wrappers -----------------------------------------------------

    def poly(self, terms: dict) -> NCPoly:
        return NCPoly(self.ngens, self.N, terms)

    def eval_expr(self, node) -> NCPoly:
        return self.poly(self.eval_tree(node, self.N))

    def bracket_poly(self, a: int, b: int) -> NCPoly:
        if a == b:
            return NCPoly(self.ngens, self.N)
        if a < b:
            return self.poly(dict(self.bracket_terms(a, b, self.N)))
        return self.poly(self.bracket_terms(b, a, self.N)).scaled(G(-1))

    def commutator(self, p: NCPoly, q: NCPoly) -> NCPoly:
        pq = self.multiply_terms(p.terms, q.terms, self.N)
        qp = self.multiply_terms(q.terms, p.terms, self.N)
        return self.poly(pq) - self.poly(qp)

    def multiply(self, p: NCPoly, q: NCPoly) -> NCPoly:
        return self.poly(self.multiply_terms(p.terms, q.terms, self.N))

    def normal_order(self, items, rng=None) -> NCPoly:
        """Straighten a sum of (coefficient, z_order, word) items."""
        out = NCPoly(self.ngens, self.N)
        for c, k, word in items:
            c = c if isinstance(c, Gaussian) else G(c)
            if k > self.N:
                continue
            nf = self.nf(word, self.N - k) if rng is None else self.nf_random(word, rng, self.N - k)
            shifted = {(k + kk, m): c * v for (kk, m), v in nf.items()}
            out = out + NCPoly(self.ngens, self.N, {key: v for key, v in shifted.items() if v})
        return out

    def symmetrize(self, word: Word, z_order: int = 0, rng=None) -> NCPoly:
        """Average of all permutations of the word, normal-ordered."""
        n = len(word)
        scale = Gaussian(_FACT[n])
        out = NCPoly(self.ngens, self.N)
        for perm in itertools.permutations(word):
            out = out + self.normal_order([(scale, z_order, perm)], rng=rng)
        return out

    def symmetrize_product(self, factors, budget: int | None = None) -> NCPoly:
        """Sym applied to an ordered product of generators and atoms.

        The product is expanded formally (no straightening) into words with
        z-prefactors; each word is symmetrized and normal-ordered.
        """
        if budget is None:
            budget = self.N
        words: dict = {(0, ()): ONE}
        for node in factors:
            kind = node[0]
            if kind == "gen":
                words = {
                    (k, w + (node[1],)): c for (k, w), c in words.items()
                }
            elif kind == "scalar":
                words = {key: c * node[1] for key, c in words.items()}
            elif kind == "zpow":
                words = {
                    (k + node[1], w): c
                    for (k, w), c in words.items()
                    if k + node[1] <= budget
                }
            elif kind == "atom":
                expanded = self.expand_atom_terms(node[1], budget)
                nxt: dict = {}
                for (k, w), c in words.items():
                    for (k2, m), c2 in expanded.items():
                        kk = k + k2
                        if kk > budget:
                            continue
                        key = (kk, w + mono_word(m))
                        v = nxt.get(key)
                        cc = c * c2
                        if v is None:
                            nxt[key] = cc
                        else:
                            nxt[key] = v + cc
                words = nxt
            else:
                raise SpecError(f"cannot symmetrize node {kind!r}")
        out = NCPoly(self.ngens, self.N)
        for (k, w), c in words.items():
            if not c:
                continue
            out = out + self.symmetrize(w, z_order=k).scaled(c)
        return out


# ----------------------------------------------------------------- checks


def check_atom_arguments(engine: RewriteEngine) -> list[Residual]:
    """Every atom argument must be a set of pairwise commuting generators."""
    residuals = []

    def visit(node, where):
        op = node[0]
        if op in ("sum", "prod"):
            for child in node[1]:
                visit(child, where)
        elif op == "tsum":
            for _, legs in node[1]:
                for leg in legs:
                    visit(leg, where)
        elif op == "atom":
            gens = node[1].arg_gens()
            for idx, a in enumerate(gens):
                for b in gens[idx + 1 :]:
                    if not engine.generators_commute(a, b):
                        residuals.append(
                            Residual(
                                where,
                                f"[{engine.spec.labels[min(a, b)]},{engine.spec.labels[max(a, b)]}]",
                                "non-commuting atom argument",
                            )
                        )

    spec = engine.spec
    for (a, b), tree in spec.brackets.items():
        visit(tree, f"bracket [{spec.labels[a]},{spec.labels[b]}]")
    for g, tree in spec.coproducts.items():
        visit(tree, f"coproduct {spec.labels[g]}")
    return residuals


def admissibility_check(engine: RewriteEngine) -> CheckResult:
    """Degree of every z^k coefficient bounded by k+1, brackets and coproducts."""
    spec = engine.spec
    residuals = list(check_atom_arguments(engine))
    for a in range(spec.ngens):
        for b in range(a + 1, spec.ngens):
            for (k, mono), c in engine.bracket_terms(a, b, engine.N).items():
                if mono_degree(mono) > k + 1:
                    residuals.append(
                        Residual(
                            f"bracket [{spec.labels[a]},{spec.labels[b]}]",
                            mono_str(mono, spec.labels),
                            str(c),
                            z_order=k,
                        )
                    )
    from .hopf import eval_coproduct_tree  # late import; no cycle at module load

    for g in range(spec.ngens):
        for (k, (m1, m2)), c in eval_coproduct_tree(engine, spec.coproducts[g]).items():
            if mono_degree(m1) + mono_degree(m2) > k + 1:
                residuals.append(
                    Residual(
                        f"coproduct {spec.labels[g]}",
                        f"{mono_str(m1, spec.labels)} o {mono_str(m2, spec.labels)}",
                        str(c),
                        z_order=k,
                    )
                )
    return _result("admissibility", residuals)
