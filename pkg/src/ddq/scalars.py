"""Exact coefficient arithmetic and parameter binding.

All engine coefficients are Gaussian rationals (a + b*i with exact Fraction
components).  Deformation parameters (lambda, rho, mu, omega) are bound to
exact values before any computation; square roots are never computed, they
are supplied by the binding and checked against their radicand.  Printed
basis changes may involve a genuinely irrational radical such as sqrt(2);
those are carried formally as one quadratic extension (QuadExt) so pairing
checks stay exact.
"""

from __future__ import annotations

import re
from fractions import Fraction


class ScalarError(ArithmeticError):
    """Invalid exact-scalar operation (e.g. division by zero)."""


class BindingError(ValueError):
    """Unbound parameter, malformed binding, or radical/radicand mismatch."""


_F0 = Fraction(0)
_F1 = Fraction(1)


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


class Gaussian:
    """Element of Q(i): re + im*i with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    def __add__(self, other):
        if type(other) is Gaussian:
            return Gaussian(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return Gaussian(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is Gaussian:
            return Gaussian(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return Gaussian(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return Gaussian(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if type(other) is Gaussian:
            if not self.im and not other.im:
                return Gaussian(self.re * other.re)
            return Gaussian(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, (int, Fraction)):
            return Gaussian(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Gaussian(other)
        if type(other) is Gaussian:
            if not other.re and not other.im:
                raise ScalarError("division by zero")
            if not other.im:
                return Gaussian(self.re / other.re, self.im / other.re)
            n = other.re * other.re + other.im * other.im
            return Gaussian(
                (self.re * other.re + self.im * other.im) / n,
                (self.im * other.re - self.re * other.im) / n,
            )
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Gaussian(other) / self
        return NotImplemented

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return ONE / self ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if type(other) is Gaussian:
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> "Gaussian":
        return Gaussian(self.re, -self.im)

    def __str__(self):
        if not self.im:
            return _frac_str(self.re)
        if not self.re:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"i*{_frac_str(self.im)}" if self.im > 0 else f"-i*{_frac_str(-self.im)}"
        im = Gaussian(0, self.im)
        return f"{_frac_str(self.re)}{'+' if self.im > 0 else '-'}{str(im).lstrip('-')}"

    def __repr__(self):
        return f"Gaussian({self})"


ZERO = Gaussian(0)
ONE = Gaussian(1)
I = Gaussian(0, 1)


def G(re, im=0) -> Gaussian:
    """Shorthand constructor; accepts ints, Fractions, or 'p/q' strings."""
    if isinstance(re, str):
        re = Fraction(re)
    if isinstance(im, str):
        im = Fraction(im)
    return Gaussian(re, im)


class QuadExt:
    """a + b*sqrt(q) with Gaussian a, b and a fixed rational radicand q.

    Only one radical may appear in a computation; mixing distinct radicands
    raises.  Values with b = 0 compare equal to plain Gaussians.
    """

    __slots__ = ("a", "b", "q")

    def __init__(self, a: Gaussian, b: Gaussian, q: Fraction):
        self.a = a
        self.b = b
        self.q = q if isinstance(q, Fraction) else Fraction(q)

    @staticmethod
    def _lift(value, q):
        if isinstance(value, QuadExt):
            return value
        if isinstance(value, (int, Fraction)):
            value = Gaussian(value)
        if type(value) is Gaussian:
            return QuadExt(value, ZERO, q)
        raise TypeError(f"cannot lift {value!r} into a quadratic extension")

    def _q_for(self, other):
        if isinstance(other, QuadExt) and other.b and self.b and other.q != self.q:
            raise ScalarError(f"incompatible radicals sqrt({self.q}) and sqrt({other.q})")
        if isinstance(other, QuadExt) and other.b:
            return other.q
        return self.q

    def __add__(self, other):
        q = self._q_for(other)
        o = self._lift(other, q)
        return QuadExt(self.a + o.a, self.b + o.b, q)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._lift(other, self._q_for(other)))

    def __rsub__(self, other):
        return self._lift(other, self.q) - self

    def __mul__(self, other):
        q = self._q_for(other)
        o = self._lift(other, q)
        return QuadExt(
            self.a * o.a + Gaussian(q) * self.b * o.b,
            self.a * o.b + self.b * o.a,
            q,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        q = self._q_for(other)
        o = self._lift(other, q)
        n = o.a * o.a - Gaussian(q) * o.b * o.b
        if not n:
            raise ScalarError("division by zero in quadratic extension")
        conj = QuadExt(o.a, -o.b, q)
        num = self * conj
        return QuadExt(num.a / n, num.b / n, q)

    def __rtruediv__(self, other):
        return self._lift(other, self.q) / self

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.q)

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            if self.b and other.b and self.q != other.q:
                return False
            return self.a == other.a and self.b == other.b
        if type(other) is Gaussian or isinstance(other, (int, Fraction)):
            return not self.b and self.a == other
        return NotImplemented

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b, self.q))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __str__(self):
        if not self.b:
            return str(self.a)
        rad = f"sqrt({_frac_str(self.q)})"
        parts = []
        if self.a:
            parts.append(str(self.a))
        coeff = str(self.b)
        parts.append(f"{coeff}*{rad}" if coeff not in ("1", "-1") else ("-" if coeff == "-1" else "") + rad)
        out = "+".join(parts)
        return out.replace("+-", "-")

    def __repr__(self):
        return f"QuadExt({self})"


def as_gaussian(value) -> Gaussian:
    """Collapse a scalar to a plain Gaussian; error if a formal radical survives."""
    if type(value) is Gaussian:
        return value
    if isinstance(value, (int, Fraction)):
        return Gaussian(value)
    if isinstance(value, QuadExt):
        if value.b:
            raise BindingError(f"radical sqrt({value.q}) has no declared value")
        return value.a
    raise TypeError(f"not a scalar: {value!r}")


# --- coefficient expression language ------------------------------------
#
# expr   := term (('+'|'-') term)*
# term   := unary (('*'|'/') unary)*
# unary  := '-' unary | atom ('^' int)?
# atom   := int | 'i' | name | '(' expr ')' | 'sqrt' '(' expr ')'
#
# Numeric literals like 3/4 or i*3/4 come out of the ordinary '/' and '*'.

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|([()+\-*/^]))")

PARAMETER_NAMES = ("lambda", "rho", "mu", "omega")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise BindingError(f"bad character in coefficient {text!r} at {pos}")
            break
        pos = m.end()
        if m.group(1):
            tokens.append(("int", int(m.group(1))))
        elif m.group(2):
            tokens.append(("name", m.group(2)))
        else:
            tokens.append(("op", m.group(3)))
    return tokens


class _CoeffParser:
    def __init__(self, tokens, text):
        self.tokens = tokens
        self.pos = 0
        self.text = text

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, op):
        kind, val = self.next()
        if kind != "op" or val != op:
            raise BindingError(f"expected {op!r} in coefficient {self.text!r}")

    def parse(self):
        node = self.expr()
        if self.pos != len(self.tokens):
            raise BindingError(f"trailing input in coefficient {self.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.next()
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.next()
            rhs = self.unary()
            node = ("mul" if op == "*" else "div", node, rhs)
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.next()
            return ("neg", self.unary())
        node = self.atom()
        if self.peek() == ("op", "^"):
            self.next()
            sign = 1
            if self.peek() == ("op", "-"):
                self.next()
                sign = -1
            kind, val = self.next()
            if kind != "int":
                raise BindingError(f"expected integer exponent in {self.text!r}")
            node = ("pow", node, sign * val)
        return node

    def atom(self):
        kind, val = self.next()
        if kind == "int":
            return ("num", val)
        if kind == "name":
            if val == "i":
                return ("imag",)
            if val == "sqrt":
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return ("sqrt", inner)
            return ("param", val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise BindingError(f"unexpected token in coefficient {self.text!r}")


def _eval_node(node, binding: "ParamBinding", formal_sqrt: bool):
    op = node[0]
    if op == "num":
        return Gaussian(node[1])
    if op == "imag":
        return I
    if op == "param":
        name = node[1]
        if binding is None or name not in binding.parameters:
            raise BindingError(f"unbound parameter {name!r}")
        return binding.parameters[name]
    if op == "neg":
        return -_eval_node(node[1], binding, formal_sqrt)
    if op == "add":
        return _eval_node(node[1], binding, formal_sqrt) + _eval_node(node[2], binding, formal_sqrt)
    if op == "sub":
        return _eval_node(node[1], binding, formal_sqrt) - _eval_node(node[2], binding, formal_sqrt)
    if op == "mul":
        return _eval_node(node[1], binding, formal_sqrt) * _eval_node(node[2], binding, formal_sqrt)
    if op == "div":
        return _eval_node(node[1], binding, formal_sqrt) / _eval_node(node[2], binding, formal_sqrt)
    if op == "pow":
        base = _eval_node(node[1], binding, formal_sqrt)
        k = node[2]
        if k < 0:
            return 1 / (base ** (-k))
        out = ONE
        for _ in range(k):
            out = out * base
        return out
    if op == "sqrt":
        radicand = _eval_node(node[1], binding, formal_sqrt)
        radicand = as_gaussian(radicand)
        if binding is not None:
            declared = binding.radicals.get(radicand)
            if declared is not None:
                return declared
        if formal_sqrt:
            if radicand.im:
                raise BindingError(f"formal radical of non-real radicand {radicand}")
            return QuadExt(ZERO, ONE, radicand.re)
        raise BindingError(f"no declared value for sqrt({radicand})")
    raise BindingError(f"bad coefficient node {node!r}")


def eval_coefficient(text: str, binding: "ParamBinding" = None, formal_sqrt: bool = False):
    """Evaluate a coefficient expression to a Gaussian (or QuadExt if formal)."""
    node = _CoeffParser(_tokenize(text), text).parse()
    return _eval_node(node, binding, formal_sqrt)


def bind_parameters(binding: "ParamBinding", text: str) -> Gaussian:
    """Fully numeric value of a symbolic coefficient under the binding."""
    return as_gaussian(eval_coefficient(text, binding))


class ParamBinding:
    """Exact values for deformation parameters plus declared radical values.

    Radicals are keyed by the evaluated radicand; every declared value v for
    radicand q must satisfy v*v == q exactly.  `zsign` rescales the
    deformation parameter z to -z when set to -1.
    """

    def __init__(self, parameters=None, radicals=None, zsign=1):
        self.parameters: dict[str, Gaussian] = {}
        for name, value in (parameters or {}).items():
            if isinstance(value, str):
                value = eval_coefficient(value)
            self.parameters[name] = as_gaussian(value)
        if zsign not in (1, -1):
            raise BindingError("zsign must be +1 or -1")
        self.zsign = zsign
        self.radicals: dict[Gaussian, Gaussian] = {}
        for radicand, value in (radicals or {}).items():
            if isinstance(radicand, str):
                radicand = as_gaussian(eval_coefficient(radicand, self))
            if isinstance(value, str):
                value = eval_coefficient(value)
            radicand = as_gaussian(radicand)
            value = as_gaussian(value)
            if value * value != radicand:
                raise BindingError(
                    f"declared sqrt value {value} squares to {value * value}, not {radicand}"
                )
            self.radicals[radicand] = value

    @classmethod
    def parse(cls, items) -> "ParamBinding":
        """Build a binding from CLI strings: name=p/q, sqrt(expr)=value, zsign=-1."""
        plain: dict[str, str] = {}
        radical_items: list[tuple[str, str]] = []
        zsign = 1
        for item in items:
            if "=" not in item:
                raise BindingError(f"malformed binding {item!r} (expected name=value)")
            lhs, rhs = item.split("=", 1)
            lhs = lhs.strip()
            rhs = rhs.strip()
            if lhs == "zsign":
                if rhs not in ("1", "+1", "-1"):
                    raise BindingError("zsign must be +1 or -1")
                zsign = 1 if rhs in ("1", "+1") else -1
            elif lhs.startswith("sqrt(") and lhs.endswith(")"):
                radical_items.append((lhs[5:-1], rhs))
            else:
                plain[lhs] = rhs
        binding = cls(plain, zsign=zsign)
        for radicand, value in radical_items:
            radicand_value = as_gaussian(eval_coefficient(radicand, binding))
            value_g = as_gaussian(eval_coefficient(value))
            if value_g * value_g != radicand_value:
                raise BindingError(
                    f"sqrt({radicand}) = {value} fails: square is {value_g * value_g},"
                    f" radicand is {radicand_value}"
                )
            binding.radicals[radicand_value] = value_g
        return binding

    def describe(self) -> str:
        parts = [f"{k}={v}" for k, v in sorted(self.parameters.items())]
        parts += [f"sqrt({q})={v}" for q, v in sorted(self.radicals.items(), key=lambda kv: str(kv[0]))]
        if self.zsign == -1:
            parts.append("zsign=-1")
        return ",".join(parts) if parts else "(none)"

    def __repr__(self):
        return f"ParamBinding({self.describe()})"
