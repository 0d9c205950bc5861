"""Tests for exact algebraic arithmetic and the constant registry"""

from fractions import Fraction

import pytest

from schanuel.algebraic import (
    REGISTRY,
    AlgebraicConst,
    AlgebraicRegistry,
    ComplexBox,
    field_op,
    is_real,
    make_algebraic,
    refine_box,
    same_root,
)
from schanuel.errors import (
    AlgebraicInversionError,
    DegreeCapError,
    NonIsolatingBoxError,
    UnknownConstantError,
)


@pytest.fixture(name="sqrt2")
def fixture_sqrt2():
    """sqrt(2) built from its polynomial"""
    return make_algebraic((-2, 0, 1), ComplexBox.around("1.414", 0, "0.1"))


@pytest.fixture(name="i")
def fixture_i():
    """The imaginary unit"""
    return make_algebraic((1, 0, 1), ComplexBox.around(0, 1, "0.1"))


def test_make_algebraic(sqrt2, i):
    """Verify minimal polynomials and isolation"""
    assert sqrt2.min_poly == (-2, 0, 1)
    assert sqrt2.degree == 2
    assert is_real(sqrt2)
    assert i.min_poly == (1, 0, 1)
    assert not is_real(i)


def test_make_algebraic_not_isolating():
    """Verify a box holding both roots is rejected"""
    with pytest.raises(NonIsolatingBoxError):
        make_algebraic((-2, 0, 1), ComplexBox.around(0, 0, 2))
    with pytest.raises(NonIsolatingBoxError):
        make_algebraic((-2, 0, 1), ComplexBox.around(5, 5, "0.1"))


def test_make_algebraic_reducible_picks_factor():
    """Verify a reducible polynomial is replaced by the owning factor"""
    # (x - 3) * (x^2 - 2)
    const = make_algebraic((6, -2, -3, 1), ComplexBox.around(3, 0, "0.5"))
    assert const.min_poly == (-3, 1)
    assert const.as_fraction() == 3


def test_make_algebraic_degree_cap():
    """Verify the degree cap"""
    with pytest.raises(DegreeCapError):
        make_algebraic((-2, 0, 0, 1), ComplexBox.around("1.26", 0, "0.1"),
                       degree_cap=2)


def test_field_ops(sqrt2, i):
    """Verify the closed-form field identities"""
    assert field_op("mul", sqrt2, sqrt2).as_fraction() == 2
    assert field_op("add", sqrt2, field_op("neg", sqrt2)).is_zero
    assert field_op("mul", i, i).as_fraction() == -1
    half = field_op("inv", sqrt2)
    assert half.min_poly == (-1, 0, 2)
    assert same_root(field_op("mul", half, AlgebraicConst.from_rational(2)),
                     sqrt2)


def test_field_op_errors(sqrt2):
    """Verify bad operations are rejected"""
    with pytest.raises(ValueError, match="Unknown field operation"):
        field_op("pow", sqrt2, sqrt2)
    with pytest.raises(ValueError, match="needs two operands"):
        field_op("add", sqrt2)
    with pytest.raises(AlgebraicInversionError):
        field_op("inv", AlgebraicConst.from_rational(0))


def test_sum_of_roots_degree(sqrt2):
    """Verify sqrt(2) + sqrt(3) has degree 4"""
    total = field_op("add", sqrt2, REGISTRY.resolve("sqrt3"))
    assert total.min_poly == (1, 0, -10, 0, 1)


def test_refine_box_sqrt2(sqrt2):
    """Verify refinement to 1e-30 still encloses sqrt(2)"""
    target = Fraction(1, 10**30)
    box = refine_box(sqrt2, target)
    assert box.max_side() <= target
    assert box.re_lo ** 2 <= 2 <= box.re_hi ** 2
    assert sqrt2.box.contains(box)


def test_refine_box_i(i):
    """Verify refinement of i"""
    box = refine_box(i, Fraction(1, 10))
    assert box.max_side() <= Fraction(1, 10)
    assert box.im_lo <= 1 <= box.im_hi
    assert box.re_lo <= 0 <= box.re_hi


def test_refine_box_cube_root():
    """Verify refinement of the real cube root of 2"""
    cbrt2 = REGISTRY.resolve("cbrt2")
    box = refine_box(cbrt2, Fraction(1, 10**10))
    assert box.max_side() <= Fraction(1, 10**10)
    assert box.re_lo ** 3 <= 2 <= box.re_hi ** 3
    assert abs(float(box.re_lo) - 1.2599210498) < 1e-9


def test_refine_box_rejects_bad_radius(sqrt2):
    """Verify the target radius must be positive"""
    with pytest.raises(ValueError, match="positive"):
        refine_box(sqrt2, Fraction(0))


def test_registry_builtins():
    """Verify builtin constants resolve"""
    for name in ("i", "sqrt2", "sqrt3", "cbrt2", "phi"):
        assert REGISTRY.resolve(name).name == name
    with pytest.raises(UnknownConstantError):
        REGISTRY.resolve("nosuch")


def test_registry_rebinding():
    """Verify a name cannot be bound to a different number"""
    registry = AlgebraicRegistry()
    minus = make_algebraic((-2, 0, 1), ComplexBox.around("-1.414", 0, "0.1"))
    with pytest.raises(ValueError, match="already bound"):
        registry.register("sqrt2", minus)
    plus = make_algebraic((-2, 0, 1), ComplexBox.around("1.41", 0, "0.05"))
    assert registry.register("sqrt2", plus) is registry.resolve("sqrt2")


def test_registry_intern_reuses_names(sqrt2):
    """Verify interning an existing number returns the named constant"""
    assert REGISTRY.intern(sqrt2).name == "sqrt2"


def test_registry_load_file(tmp_path):
    """Verify the registry file format"""
    path = tmp_path / "constants.txt"
    path.write_text(
        "# cube root of 3\n"
        "cbrt3 : -3,0,0,1 : 1,2,-1/2,1/2\n"
        "\n"
        "minus_sqrt5 : -5,0,1 : -3,-2,-1/2,1/2\n",
        encoding="utf-8")
    registry = AlgebraicRegistry()
    assert registry.load_file(str(path)) == ["cbrt3", "minus_sqrt5"]
    assert registry.resolve("cbrt3").min_poly == (-3, 0, 0, 1)


def test_registry_load_file_errors(tmp_path):
    """Verify malformed registry lines are reported"""
    path = tmp_path / "bad.txt"
    path.write_text("broken : 1,2\n", encoding="utf-8")
    with pytest.raises(ValueError, match="expected 'name : coeffs : box'"):
        AlgebraicRegistry().load_file(str(path))


def test_registry_snapshot_restore():
    """Verify snapshot records restore into another registry"""
    records = REGISTRY.snapshot(["sqrt2", "i"])
    assert [r["name"] for r in records] == ["i", "sqrt2"]
    registry = AlgebraicRegistry()
    registry.restore(records)
    assert registry.resolve("i").min_poly == (1, 0, 1)
