"""Wreath-product arithmetic and orientable quadratic equations.

Elements of A wr B are pairs (delta, f) with delta in B and f a finitely
supported function B -> A; multiplication twists the function part by the
base shift:

    (d1, f1) * (d2, f2) = (d1 + d2, shift(f1, d2) + f2).

An orientable equation of genus g with constants c_1..c_m asks for values of
the variables making

    [x_1,y_1]...[x_g,y_g] * z_1^-1 c_1 z_1 ... z_m^-1 c_m z_m = 1.

Solvability reduces to a Quotient Sum Problem instance over the quotient of B
by the constants' base shifts, with rank budget 2g.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence, Union

from .abelian import (
    BudgetExceeded,
    GroupElement,
    GroupPresentation,
    cached_quotient,
    enumerate_ball,
)
from .group_ring import SupportedFunction, lambda_term, shift
from .qsp import QspInstance


@dataclass(frozen=True)
class WreathElement:
    """(delta, f) with delta in the base group B and f supported on B."""

    delta: GroupElement
    f: SupportedFunction

    def __post_init__(self) -> None:
        if self.delta.group != self.f.base_group:
            raise ValueError("delta lives outside the function's base group")

    @property
    def coeff_group(self) -> GroupPresentation:
        return self.f.coeff_group

    @property
    def base_group(self) -> GroupPresentation:
        return self.f.base_group

    def is_identity(self) -> bool:
        return self.delta.is_zero() and self.f.is_zero()


def wreath_identity(A: GroupPresentation, B: GroupPresentation) -> WreathElement:
    return WreathElement(B.zero(), SupportedFunction.zero(A, B))


def _check_same_groups(u: WreathElement, v: WreathElement) -> None:
    if u.coeff_group != v.coeff_group or u.base_group != v.base_group:
        raise ValueError("wreath elements from different groups")


def wreath_multiply(u: WreathElement, v: WreathElement) -> WreathElement:
    _check_same_groups(u, v)
    return WreathElement(u.delta + v.delta, shift(u.f, v.delta) + v.f)


def wreath_inverse(u: WreathElement) -> WreathElement:
    return WreathElement(-u.delta, -shift(u.f, -u.delta))


def conjugate(c: WreathElement, z: WreathElement) -> WreathElement:
    """z^-1 c z = (delta_c, lambda_term(f_z, delta_c) + shift(f_c, delta_z))."""
    _check_same_groups(c, z)
    return WreathElement(
        c.delta, lambda_term(z.f, c.delta) + shift(c.f, z.delta)
    )


def commutator(x: WreathElement, y: WreathElement) -> WreathElement:
    """[x,y] = (0, lambda_term(f_y, delta_x) - lambda_term(f_x, delta_y))."""
    _check_same_groups(x, y)
    return WreathElement(
        x.delta.group.zero(),
        lambda_term(y.f, x.delta) - lambda_term(x.f, y.delta),
    )


# ---------------------------------------------------------------------------
# equations


@dataclass(frozen=True)
class OrientableEquation:
    """[x_1,y_1]..[x_g,y_g] z_1^-1 c_1 z_1 .. z_m^-1 c_m z_m = 1."""

    A: GroupPresentation
    B: GroupPresentation
    genus: int
    constants: tuple[WreathElement, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "constants", tuple(self.constants))
        if self.genus < 0:
            raise ValueError("genus must be nonnegative")
        if self.genus == 0 and not self.constants:
            raise ValueError("genus 0 requires at least one constant")
        for c in self.constants:
            if c.coeff_group != self.A or c.base_group != self.B:
                raise ValueError("constant outside the equation's groups")

    @property
    def m(self) -> int:
        return len(self.constants)


@dataclass(frozen=True)
class EquationAssignment:
    """Values for the variables x_1..x_g, y_1..y_g, z_1..z_m."""

    xs: tuple[WreathElement, ...]
    ys: tuple[WreathElement, ...]
    zs: tuple[WreathElement, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "xs", tuple(self.xs))
        object.__setattr__(self, "ys", tuple(self.ys))
        object.__setattr__(self, "zs", tuple(self.zs))


def _check_shape(eq: OrientableEquation, asn: EquationAssignment) -> None:
    if len(asn.xs) != eq.genus or len(asn.ys) != eq.genus:
        raise ValueError("assignment genus does not match the equation")
    if len(asn.zs) != eq.m:
        raise ValueError("assignment constant count does not match")
    for w in itertools.chain(asn.xs, asn.ys, asn.zs):
        if w.coeff_group != eq.A or w.base_group != eq.B:
            raise ValueError("assigned value outside the equation's groups")


def evaluate(eq: OrientableEquation, asn: EquationAssignment) -> WreathElement:
    """The left-hand-side product; a solution iff the result is the identity."""
    _check_shape(eq, asn)
    acc = wreath_identity(eq.A, eq.B)
    for x, y in zip(asn.xs, asn.ys):
        acc = wreath_multiply(acc, commutator(x, y))
    for z, c in zip(asn.zs, eq.constants):
        acc = wreath_multiply(acc, conjugate(c, z))
    return acc


def residual_function(
    eq: OrientableEquation, asn: EquationAssignment
) -> tuple[bool, SupportedFunction]:
    """Closed-form evaluation residual for the transformed components.

    Returns (total base shift vanishes, residual function r); the assignment
    solves the equation iff both the flag holds and r = 0.  Writing
    tau_j = sum_{l>j} delta_{c_l}, the residual is

        sum_i [lambda_term(f_{y_i}, delta_{x_i})
               - lambda_term(f_{x_i}, delta_{y_i})]
      + sum_j [lambda_term(shift(f_{z_j}, tau_j), delta_{c_j})
               + shift(f_{c_j}, delta_{z_j} + tau_j)].
    """
    _check_shape(eq, asn)
    total = eq.B.zero()
    for c in eq.constants:
        total = total + c.delta
    r = SupportedFunction.zero(eq.A, eq.B)
    for x, y in zip(asn.xs, asn.ys):
        r = r + lambda_term(y.f, x.delta) - lambda_term(x.f, y.delta)
    tau = eq.B.zero()
    for j in range(eq.m - 1, -1, -1):
        c = eq.constants[j]
        z = asn.zs[j]
        r = r + lambda_term(shift(z.f, tau), c.delta) + shift(c.f, z.delta + tau)
        tau = tau + c.delta
    return total.is_zero(), r


@dataclass(frozen=True)
class Unsolvable:
    """Sentinel: no assignment exists (nonzero total base shift)."""

    reason: str = "total base shift of the constants is nonzero"


def reduce_to_qsp(eq: OrientableEquation) -> Union[QspInstance, Unsolvable]:
    """Project the constants to B/<base shifts>; rank budget is 2 * genus.

    Any evaluation's base component equals the sum of the constants' base
    shifts, so a nonzero sum means no solution.  Otherwise the equation is
    solvable iff the instance (A, B/<deltas>, pushforwards, 2g) is positive.
    """
    total = eq.B.zero()
    for c in eq.constants:
        total = total + c.delta
    if not total.is_zero():
        return Unsolvable()
    gens = tuple(c.delta for c in eq.constants)
    Q, project = cached_quotient(eq.B, gens)
    pushed = []
    for c in eq.constants:
        g = SupportedFunction.zero(eq.A, Q)
        for point, coeff in c.f.terms:
            g = g + SupportedFunction.atom(coeff, project(point))
        pushed.append(g)
    return QspInstance(eq.A, Q, tuple(pushed), 2 * eq.genus)


# ---------------------------------------------------------------------------
# instance generation and tiny-scale brute force


def _random_element(
    rng: random.Random,
    A: GroupPresentation,
    B: GroupPresentation,
    max_length: int,
    max_support: int,
) -> WreathElement:
    ball = list(enumerate_ball(B, max_length))
    delta = ball[rng.randrange(len(ball))]
    npts = rng.randrange(max_support + 1)
    pts = rng.sample(range(len(ball)), min(npts, len(ball)))
    f = SupportedFunction.zero(A, B)
    for k in pts:
        coords = []
        for alpha in A.torsion:
            coords.append(rng.randrange(alpha))
        for _ in range(A.free_rank):
            coords.append(rng.randint(-max_length, max_length))
        coeff = A.element(coords)
        f = f + SupportedFunction.atom(coeff, ball[k])
    return WreathElement(delta, f)


def gen_solvable(
    seed: int,
    A: GroupPresentation,
    B: GroupPresentation,
    genus: int,
    m: int,
    max_length: int = 3,
    max_support: int = 3,
) -> tuple[OrientableEquation, EquationAssignment]:
    """Random equation plus a witnessing assignment (same seed, same output).

    Variables and all but the last constant are sampled from a bounded ball;
    the last constant is solved for so the product collapses to the identity.
    With no constants the sampled pairs are made to commute instead.
    """
    if genus == 0 and m == 0:
        raise ValueError("genus 0 requires at least one constant")
    rng = random.Random(seed)
    xs, ys = [], []
    for _ in range(genus):
        x = _random_element(rng, A, B, max_length, max_support)
        xs.append(x)
        if m:
            ys.append(_random_element(rng, A, B, max_length, max_support))
        else:
            # no constant can absorb the prefix, so force [x_i, y_i] = 1
            ys.append(_power(x, rng.choice((-1, 0, 1, 2))))
    zs = [_random_element(rng, A, B, max_length, max_support) for _ in range(m)]
    consts = [
        _random_element(rng, A, B, max_length, max_support) for _ in range(m - 1)
    ]
    if m:
        prefix = wreath_identity(A, B)
        for x, y in zip(xs, ys):
            prefix = wreath_multiply(prefix, commutator(x, y))
        for z, c in zip(zs, consts):
            prefix = wreath_multiply(prefix, conjugate(c, z))
        z_m = zs[-1]
        c_m = wreath_multiply(
            wreath_multiply(z_m, wreath_inverse(prefix)), wreath_inverse(z_m)
        )
        consts.append(c_m)
    eq = OrientableEquation(A, B, genus, tuple(consts))
    asn = EquationAssignment(tuple(xs), tuple(ys), tuple(zs))
    assert evaluate(eq, asn).is_identity()
    return eq, asn


def _power(u: WreathElement, k: int) -> WreathElement:
    out = wreath_identity(u.coeff_group, u.base_group)
    step = u if k >= 0 else wreath_inverse(u)
    for _ in range(abs(k)):
        out = wreath_multiply(out, step)
    return out


def enumerate_window(
    A: GroupPresentation,
    B: GroupPresentation,
    radius: int,
    max_elements: int = 200_000,
) -> list[WreathElement]:
    """All (delta, f) with delta and supp(f) in the radius ball of B and
    coefficients in the radius window of A (full torsion, bounded free)."""
    ball = list(enumerate_ball(B, radius))
    coeff_axes: list[list[int]] = []
    for _ in range(A.free_rank):
        coeff_axes.append(list(range(-radius, radius + 1)))
    for alpha in A.torsion:
        coeff_axes.append(list(range(alpha)))
    coeffs = [A.element(c) for c in itertools.product(*coeff_axes)]
    per_point = len(coeffs)
    total = len(ball) * per_point ** len(ball)
    if total > max_elements:
        raise BudgetExceeded(
            f"window holds {total} wreath elements (> {max_elements})"
        )
    out = []
    for delta in ball:
        for assignment in itertools.product(coeffs, repeat=len(ball)):
            f = SupportedFunction.zero(A, B)
            for point, coeff in zip(ball, assignment):
                if not coeff.is_zero():
                    f = f + SupportedFunction.atom(coeff, point)
            out.append(WreathElement(delta, f))
    return out


def equation_brute_force(
    eq: OrientableEquation,
    radius: int,
    max_assignments: int = 2_000_000,
) -> bool:
    """Try every assignment over the radius window; complete within it.

    Sound always; complete whenever a solution exists inside the window (for
    finite A and B with the ball covering B, that is genuine completeness).
    """
    window = enumerate_window(eq.A, eq.B, radius)
    nvars = 2 * eq.genus + eq.m
    total = len(window) ** nvars
    if total > max_assignments:
        raise BudgetExceeded(
            f"{total} assignments exceed the budget {max_assignments}"
        )
    for values in itertools.product(window, repeat=nvars):
        asn = EquationAssignment(
            tuple(values[: eq.genus]),
            tuple(values[eq.genus : 2 * eq.genus]),
            tuple(values[2 * eq.genus :]),
        )
        if evaluate(eq, asn).is_identity():
            return True
    return False
