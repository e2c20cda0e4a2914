"""Shift-multiplier operator calculus for (p^2, q^2)-commuting normal pairs.

Operators act on functions of two real variables (x, y) and are finite sums
of atoms  M_f T_{(dx,dy)}  with  (M_f T_v phi)(x, y) = f(x,y) phi(x-dx, y-dy)
and f a closed-form multiplier.  The concrete model realizing a
(p^2, q^2)-commuting pair is

    R = M_{e^x} T_{(0,c)},   S = M_{e^y} T_{(a,0)},
    a = ln(p/q),  c = -ln(p q),

so that R, S are normal with |R|^2 = e^{2x}, |S|^2 = e^{2y}, and
RS = p^2 SR, RS* = q^2 S*R.  Because R*R and S*S are zero-shift multipliers,
every z-transform expression stays inside the atom algebra with closed-form
multipliers: identity checks are pointwise evaluations, with no
discretization, truncation, or boundary effects.  (No finite-dimensional
normal pair can scale by p != 1, which is why a function-space model is
used instead of matrices.)

Residuals compare multipliers bucket-by-bucket over seeded sample points in
a box, scaled by max(1, |value|) so the 1e-12 tolerance is meaningful for
multipliers as large as e^8 * pq on the default [-4,4]^2 box.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass

from .scalars import Scalar

DEFAULT_BOX = 4.0
DEFAULT_SHIFT_TOL = 1e-9


class PositivityError(ArithmeticError):
    """A square root was evaluated at a non-positive-real argument."""


# ---------------------------------------------------------------------------
# closed-form multipliers
# ---------------------------------------------------------------------------


class MultiplierExpr:
    """Closed-form expression in (x, y): constants, e^{ax+by}, +, *, /, sqrt."""

    def __call__(self, x: float, y: float) -> complex:
        raise NotImplementedError

    def conj(self) -> "MultiplierExpr":
        raise NotImplementedError

    def shift(self, dx: float, dy: float) -> "MultiplierExpr":
        """Substitute x -> x - dx, y -> y - dy."""
        raise NotImplementedError

    def __mul__(self, other):
        return Mul(self, other)

    def __add__(self, other):
        return Add(self, other)

    def is_zero_literal(self) -> bool:
        return isinstance(self, Const) and self.value == 0


@dataclass(frozen=True)
class Const(MultiplierExpr):
    value: complex

    def __call__(self, x, y):
        return self.value

    def conj(self):
        return Const(complex(self.value).conjugate())

    def shift(self, dx, dy):
        return self


@dataclass(frozen=True)
class ExpLin(MultiplierExpr):
    """e^{cx * x + cy * y}; coefficients may be complex."""

    cx: complex
    cy: complex

    def __call__(self, x, y):
        return cmath.exp(self.cx * x + self.cy * y)

    def conj(self):
        return ExpLin(complex(self.cx).conjugate(), complex(self.cy).conjugate())

    def shift(self, dx, dy):
        factor = cmath.exp(-(self.cx * dx + self.cy * dy))
        if factor == 1.0:
            return self
        return Mul(Const(factor), self)


@dataclass(frozen=True)
class Add(MultiplierExpr):
    a: MultiplierExpr
    b: MultiplierExpr

    def __call__(self, x, y):
        return self.a(x, y) + self.b(x, y)

    def conj(self):
        return Add(self.a.conj(), self.b.conj())

    def shift(self, dx, dy):
        return Add(self.a.shift(dx, dy), self.b.shift(dx, dy))


@dataclass(frozen=True)
class Mul(MultiplierExpr):
    """Product, evaluated over the flattened factors in value order.

    Sorting before multiplying makes the result independent of how the
    product tree was associated, so algebraically equal compositions built
    along different routes evaluate bit-identically (the "exactly zero"
    cases of the undeformed model rely on this).
    """

    a: MultiplierExpr
    b: MultiplierExpr

    def __call__(self, x, y):
        vals = []
        stack = [self]
        while stack:
            e = stack.pop()
            if isinstance(e, Mul):
                stack.append(e.a)
                stack.append(e.b)
            else:
                vals.append(complex(e(x, y)))
        vals.sort(key=lambda z: (z.real, z.imag))
        out = complex(1.0)
        for v in vals:
            out *= v
        return out

    def conj(self):
        return Mul(self.a.conj(), self.b.conj())

    def shift(self, dx, dy):
        return Mul(self.a.shift(dx, dy), self.b.shift(dx, dy))


@dataclass(frozen=True)
class Div(MultiplierExpr):
    num: MultiplierExpr
    den: MultiplierExpr

    def __call__(self, x, y):
        return self.num(x, y) / self.den(x, y)

    def conj(self):
        return Div(self.num.conj(), self.den.conj())

    def shift(self, dx, dy):
        return Div(self.num.shift(dx, dy), self.den.shift(dx, dy))


@dataclass(frozen=True)
class Sqrt(MultiplierExpr):
    """Square root of a positive expression; positivity checked at evaluation."""

    arg: MultiplierExpr

    def __call__(self, x, y):
        v = complex(self.arg(x, y))
        scale = abs(v) + 1.0
        if abs(v.imag) > 1e-9 * scale or v.real < -1e-9 * scale:
            raise PositivityError(
                f"sqrt argument {v} at ({x}, {y}) is not a positive real")
        return complex(math.sqrt(max(v.real, 0.0)))

    def conj(self):
        return Sqrt(self.arg.conj())

    def shift(self, dx, dy):
        return Sqrt(self.arg.shift(dx, dy))


ONE_EXPR = Const(1.0)


def _scaled_expr(c: complex, f: MultiplierExpr) -> MultiplierExpr:
    if c == 1.0:
        return f
    return Mul(Const(c), f)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


class ShiftMultiplierOperator:
    """Finite sum of (multiplier, shift) atoms; immutable."""

    __slots__ = ("atoms",)

    def __init__(self, atoms=None):
        canon = {}
        if atoms:
            for v, f in atoms.items():
                if f.is_zero_literal():
                    continue
                key = (float(v[0]), float(v[1]))
                if key in canon:
                    canon[key] = Add(canon[key], f)
                else:
                    canon[key] = f
        object.__setattr__(self, "atoms", canon)

    @staticmethod
    def zero() -> "ShiftMultiplierOperator":
        return ShiftMultiplierOperator()

    @staticmethod
    def identity() -> "ShiftMultiplierOperator":
        return ShiftMultiplierOperator({(0.0, 0.0): ONE_EXPR})

    @staticmethod
    def multiplier(expr: MultiplierExpr) -> "ShiftMultiplierOperator":
        return ShiftMultiplierOperator({(0.0, 0.0): expr})

    def is_zero(self) -> bool:
        return not self.atoms

    def scaled(self, c: complex) -> "ShiftMultiplierOperator":
        if c == 0:
            return ShiftMultiplierOperator.zero()
        return ShiftMultiplierOperator(
            {v: _scaled_expr(c, f) for v, f in self.atoms.items()})

    def __add__(self, other):
        atoms = dict(self.atoms)
        for v, f in other.atoms.items():
            atoms[v] = Add(atoms[v], f) if v in atoms else f
        return ShiftMultiplierOperator(atoms)

    def apply(self, func, point):
        """Evaluate (A phi)(point) for a sampled/closed-form function phi."""
        x, y = point
        total = 0j
        for (dx, dy), f in self.atoms.items():
            total += f(x, y) * func(x - dx, y - dy)
        return total

    def __repr__(self):
        return f"ShiftMultiplierOperator({sorted(self.atoms)})"


def compose(a: ShiftMultiplierOperator, b: ShiftMultiplierOperator):
    """(M_f T_v)(M_g T_w) = M_{f * (g o tau_v)} T_{v+w}."""
    atoms = {}
    for v, f in a.atoms.items():
        for w, g in b.atoms.items():
            key = (v[0] + w[0], v[1] + w[1])
            expr = Mul(f, g.shift(v[0], v[1]))
            atoms[key] = Add(atoms[key], expr) if key in atoms else expr
    return ShiftMultiplierOperator(atoms)


def adjoint(a: ShiftMultiplierOperator) -> ShiftMultiplierOperator:
    """(M_f T_v)* = M_{conj(f) o tau_{-v}} T_{-v}."""
    atoms = {}
    for (dx, dy), f in a.atoms.items():
        key = (-dx, -dy)
        expr = f.conj().shift(-dx, -dy)
        atoms[key] = Add(atoms[key], expr) if key in atoms else expr
    return ShiftMultiplierOperator(atoms)


def _diagonal_modulus(a: ShiftMultiplierOperator) -> MultiplierExpr:
    """Multiplier of A*A when it is a single zero-shift atom; errors otherwise."""
    prod = compose(adjoint(a), a)
    keys = list(prod.atoms)
    if keys and (len(keys) > 1 or any(abs(k[0]) + abs(k[1]) > 1e-12 for k in keys)):
        raise ValueError(f"A*A is not a zero-shift multiplier (shifts {keys})")
    return prod.atoms.get((0.0, 0.0), Const(0.0))


def z_transform(a: ShiftMultiplierOperator, scale: float = 1.0):
    """Contraction z(scale*A) = scale A (1 + scale^2 A*A)^{-1/2}.

    Requires A*A to be a zero-shift multiplier (true for the normal atoms
    of a PQModel); the result is again a single-atom operator whose
    multiplier has absolute value < 1 everywhere.
    """
    if scale <= 0:
        raise ValueError("z-transform scale must be positive")
    if a.is_zero():
        return ShiftMultiplierOperator.zero()
    m = _diagonal_modulus(a)
    damp = Div(ONE_EXPR, Sqrt(Add(ONE_EXPR, _scaled_expr(scale * scale, m))))
    return compose(a, ShiftMultiplierOperator.multiplier(damp)).scaled(scale)


def defect_sqrt(a: ShiftMultiplierOperator, scale: float = 1.0):
    """(1 - z_scale(A)* z_scale(A))^{1/2} as a zero-shift multiplier.

    Since z_s(A)*z_s(A) = s^2 A*A (1 + s^2 A*A)^{-1}, the defect is exactly
    (1 + s^2 A*A)^{-1/2}; building it in that form avoids the catastrophic
    cancellation of a literal 1 - z*z subtraction where |z| approaches 1.
    """
    m = _diagonal_modulus(a)
    return ShiftMultiplierOperator.multiplier(
        Div(ONE_EXPR, Sqrt(Add(ONE_EXPR, _scaled_expr(scale * scale, m)))))


# ---------------------------------------------------------------------------
# the (p,q) model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PQModel:
    """Concrete normal pair with RS = p^2 SR and RS* = q^2 S*R."""

    p: float
    q: float
    a: float
    c: float
    R: ShiftMultiplierOperator
    S: ShiftMultiplierOperator


def build_pq_pair(p: float, q: float) -> PQModel:
    if p <= 0 or q <= 0:
        raise ValueError("p and q must be positive")
    a = math.log(p / q)
    c = -math.log(p * q)
    R = ShiftMultiplierOperator({(0.0, c): ExpLin(1.0, 0.0)})
    S = ShiftMultiplierOperator({(a, 0.0): ExpLin(0.0, 1.0)})
    model = PQModel(p, q, a, c, R, S)
    for op, label in ((R, "R"), (S, "S")):
        res = op_equal(compose(adjoint(op), op), compose(op, adjoint(op)),
                       samples=16, seed=0)
        if res != 0.0:
            raise AssertionError(f"{label} is not normal in the model: {res}")
    return model


# ---------------------------------------------------------------------------
# operator comparison
# ---------------------------------------------------------------------------


def _sample_points(samples, seed, box):
    rng = random.Random(seed)
    return [(rng.uniform(-box, box), rng.uniform(-box, box))
            for _ in range(samples)]


def _match_buckets(a, b, shift_tol):
    pairs, unmatched_a, used = [], [], set()
    for va in a.atoms:
        best = None
        for vb in b.atoms:
            if vb in used:
                continue
            if abs(va[0] - vb[0]) <= shift_tol and abs(va[1] - vb[1]) <= shift_tol:
                best = vb
                break
        if best is None:
            unmatched_a.append(va)
        else:
            used.add(best)
            pairs.append((va, best))
    unmatched_b = [vb for vb in b.atoms if vb not in used]
    return pairs, unmatched_a, unmatched_b


def op_equal(a: ShiftMultiplierOperator, b: ShiftMultiplierOperator, *,
             samples: int = 1000, seed: int = 0, box: float = DEFAULT_BOX,
             shift_tol: float = DEFAULT_SHIFT_TOL) -> float:
    """Scaled residual of operator equality.

    Shift buckets are matched within shift_tol; matched multipliers are
    compared pointwise over seeded samples with the residual
    |f_a - f_b| / max(1, |f_a|, |f_b|); an unmatched bucket contributes its
    own scaled magnitude.
    """
    pts = _sample_points(samples, seed, box)
    pairs, only_a, only_b = _match_buckets(a, b, shift_tol)
    worst = 0.0
    for va, vb in pairs:
        fa, fb = a.atoms[va], b.atoms[vb]
        for x, y in pts:
            u, v = fa(x, y), fb(x, y)
            worst = max(worst, abs(u - v) / max(1.0, abs(u), abs(v)))
    for op, keys in ((a, only_a), (b, only_b)):
        for k in keys:
            f = op.atoms[k]
            for x, y in pts:
                u = abs(f(x, y))
                worst = max(worst, u / max(1.0, u))
    return worst


def op_norm_sample(a: ShiftMultiplierOperator, *, samples=1000, seed=0,
                   box=DEFAULT_BOX) -> float:
    """Max multiplier magnitude over sample points (0 for the zero operator)."""
    pts = _sample_points(samples, seed, box)
    worst = 0.0
    for f in a.atoms.values():
        for x, y in pts:
            worst = max(worst, abs(f(x, y)))
    return worst


# ---------------------------------------------------------------------------
# identity suites
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorCheck:
    name: str
    p: float
    q: float
    samples: int
    seed: int
    residuals: tuple  # (label, residual)

    @property
    def max_residual(self) -> float:
        return max((r for _, r in self.residuals), default=0.0)

    def passed(self, tol: float = 1e-12) -> bool:
        return self.max_residual < tol


def check_def_mu2(model: PQModel, samples: int = 1000, seed: int = 0,
                  box: float = DEFAULT_BOX) -> OperatorCheck:
    """The two z-transform identities defining a (p^2, q^2)-commuting pair:

        z(R) z(S*) = z_{pq}(S*) z_{q/p}(R)
        z_{q/p}(R) z(S) = z_{pq}(S) z(R)
    """
    p, q, R, S = model.p, model.q, model.R, model.S
    Sstar = adjoint(S)
    kw = dict(samples=samples, seed=seed, box=box)
    r1 = op_equal(compose(z_transform(R), z_transform(Sstar)),
                  compose(z_transform(Sstar, p * q), z_transform(R, q / p)), **kw)
    r2 = op_equal(compose(z_transform(R, q / p), z_transform(S)),
                  compose(z_transform(S, p * q), z_transform(R)), **kw)
    return OperatorCheck("def-mu2", p, q, samples, seed,
                         (("z(R)z(S*) = z_pq(S*)z_q/p(R)", r1),
                          ("z_q/p(R)z(S) = z_pq(S)z(R)", r2)))


def build_Q(model: PQModel):
    """The 2x2 affiliation matrix of the product RS:

        [ (1-z_{p/q}(R)*z_{p/q}(R))^{1/2} (1-z(S)*z(S))^{1/2}    -z(S)* z(R)*  ]
        [ z(R) z(S)        (1-z(R)*z(R))^{1/2} (1-z_{pq}(S)*z_{pq}(S))^{1/2}   ]
    """
    p, q, R, S = model.p, model.q, model.R, model.S
    zR, zS = z_transform(R), z_transform(S)
    q11 = compose(defect_sqrt(R, p / q), defect_sqrt(S))
    q12 = compose(adjoint(zS), adjoint(zR)).scaled(-1.0)
    q21 = compose(zR, zS)
    q22 = compose(defect_sqrt(R), defect_sqrt(S, p * q))
    return ((q11, q12), (q21, q22))


def _qq_star(Q):
    out = []
    for i in range(2):
        row = []
        for j in range(2):
            acc = ShiftMultiplierOperator.zero()
            for k in range(2):
                acc = acc + compose(Q[i][k], adjoint(Q[j][k]))
            row.append(acc)
        out.append(row)
    return out


def check_QQstar(model: PQModel, samples: int = 1000, seed: int = 0,
                 box: float = DEFAULT_BOX) -> OperatorCheck:
    """QQ* must be diagonal with the closed-form rational diagonal.

    With A = (p/q)^2 e^{2x}, B = e^{2y}:      (QQ*)_11 = (1+AB)/((1+A)(1+B));
    with A = e^{2x},      B = (pq)^2 e^{2y}:  (QQ*)_22 = (1+AB)/((1+A)(1+B)).
    The scale factors (p/q)^2 and (pq)^2 come from commuting z(S)* past
    z(R)*z(R) (and z(R)*z(R) past z_{pq}(S)*z_{pq}(S)); at p = q the first
    closed form is literally (1+|R|^2|S|^2)/((1+|R|^2)(1+|S|^2)).
    """
    p, q = model.p, model.q
    P = _qq_star(build_Q(model))
    kw = dict(samples=samples, seed=seed, box=box)

    def diagonal_form(ax: float, by: float):
        A = _scaled_expr(ax, ExpLin(2.0, 0.0))
        B = _scaled_expr(by, ExpLin(0.0, 2.0))
        num = Add(ONE_EXPR, Mul(A, B))
        den = Mul(Add(ONE_EXPR, A), Add(ONE_EXPR, B))
        return ShiftMultiplierOperator.multiplier(Div(num, den))

    zero = ShiftMultiplierOperator.zero()
    r12 = op_equal(P[0][1], zero, **kw)
    r21 = op_equal(P[1][0], zero, **kw)
    r11 = op_equal(P[0][0], diagonal_form((p / q) ** 2, 1.0), **kw)
    r22 = op_equal(P[1][1], diagonal_form(1.0, (p * q) ** 2), **kw)
    return OperatorCheck("QQ*", p, q, samples, seed,
                         (("(QQ*)_12 = 0", r12), ("(QQ*)_21 = 0", r21),
                          ("(QQ*)_11 closed form", r11),
                          ("(QQ*)_22 closed form", r22)))


def check_twrs(model: PQModel, samples: int = 1000, seed: int = 0,
               box: float = DEFAULT_BOX) -> OperatorCheck:
    """RS = p^2 SR, RS* = q^2 S*R, and the joint-core identities

        RS (1-z(R)*z(R))^{1/2} (1-z(S)*z(S))^{1/2} = (p/q)  z_{q/p}(R) z(S)
        SR (1-z(R)*z(R))^{1/2} (1-z(S)*z(S))^{1/2} = 1/(pq) z_{pq}(S) z(R)
    """
    p, q, R, S = model.p, model.q, model.R, model.S
    kw = dict(samples=samples, seed=seed, box=box)
    Sstar = adjoint(S)
    r_comm = op_equal(compose(R, S), compose(S, R).scaled(p * p), **kw)
    r_comm_star = op_equal(compose(R, Sstar), compose(Sstar, R).scaled(q * q), **kw)
    dd = compose(defect_sqrt(R), defect_sqrt(S))
    core1 = op_equal(compose(compose(R, S), dd),
                     compose(z_transform(R, q / p), z_transform(S)).scaled(p / q),
                     **kw)
    core2 = op_equal(compose(compose(S, R), dd),
                     compose(z_transform(S, p * q), z_transform(R)).scaled(1.0 / (p * q)),
                     **kw)
    return OperatorCheck("twrs", p, q, samples, seed,
                         (("RS = p^2 SR", r_comm), ("RS* = q^2 S*R", r_comm_star),
                          ("core identity RS", core1), ("core identity SR", core2)))


# ---------------------------------------------------------------------------
# bridge to the symbolic layer
# ---------------------------------------------------------------------------


def pq_from_pair_label(label_p: float, label_q: float, convention: str = "plain"):
    """Translate a "(P, Q)-commuting" label into model parameters (p, q).

    convention="plain" (default): the label already names the squares,
    p^2 = P and q^2 = Q.  convention="squared": the label names p and q
    themselves.
    """
    if convention == "plain":
        return math.sqrt(label_p), math.sqrt(label_q)
    if convention == "squared":
        return float(label_p), float(label_q)
    raise ValueError("convention must be 'plain' or 'squared'")


@dataclass(frozen=True)
class ConsistencyCheck:
    s: float
    convention: str
    p: float
    q: float
    samples: int
    seed: int
    residuals: tuple

    @property
    def max_residual(self) -> float:
        return max((r for _, r in self.residuals), default=0.0)

    def passed(self, tol: float = 1e-12) -> bool:
        return self.max_residual < tol


def check_symbolic_consistency(s: float, *, convention: str = "plain",
                               samples: int = 1000, seed: int = 0,
                               box: float = DEFAULT_BOX) -> ConsistencyCheck:
    """The operator model must reproduce the symbolic (x, w) constants.

    The symbolic layer says x w = t^-1 w x with t = q^-4 (q = e^{2s}); the
    matching model takes the pair label (t^-1, t).  The check compares the
    model's commutation constants against the formally evaluated Laurent
    scalars q^{+-4} (or q^{+-8} under the squared convention).
    """
    t = math.exp(-8.0 * s)
    p, q = pq_from_pair_label(1.0 / t, t, convention)
    model = build_pq_pair(p, q)
    kw = dict(samples=samples, seed=seed, box=box)
    r_ops = op_equal(compose(model.R, model.S),
                     compose(model.S, model.R).scaled(p * p), **kw)
    r_ops_star = op_equal(compose(model.R, adjoint(model.S)),
                          compose(adjoint(model.S), model.R).scaled(q * q), **kw)
    exponent = 4 if convention == "plain" else 8
    fwd = Scalar.q_power(exponent).eval(s)
    bwd = Scalar.q_power(-exponent).eval(s)
    r_fwd = abs(p * p - fwd) / max(1.0, abs(fwd))
    r_bwd = abs(q * q - bwd) / max(1.0, abs(bwd))
    return ConsistencyCheck(s, convention, p, q, samples, seed,
                            (("RS = p^2 SR", r_ops), ("RS* = q^2 S*R", r_ops_star),
                             (f"p^2 = eval(q^{exponent})", r_fwd),
                             (f"q^2 = eval(q^-{exponent})", r_bwd)))


def gaussian_bump(cx: float = 0.0, cy: float = 0.0, width: float = 1.0):
    """A closed-form test function for vector-level checks."""

    def bump(x, y):
        return math.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2.0 * width * width))

    return bump


class SampledFunction:
    """A function known on finitely many points; evaluating elsewhere errors.

    Useful as a vector for identity checks when a closed form is not wanted:
    the caller supplies values on the sample points and on their shifts.
    """

    def __init__(self, values):
        self._values = {(float(x), float(y)): complex(v)
                        for (x, y), v in dict(values).items()}

    def __call__(self, x, y):
        try:
            return self._values[(x, y)]
        except KeyError:
            raise KeyError(f"function not sampled at ({x}, {y})") from None

    def points(self):
        return list(self._values)
