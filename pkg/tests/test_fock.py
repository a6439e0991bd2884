import math

import numpy as np
import pytest

from photonfusion.fock import (
    AmplitudeState,
    ModeLabel,
    ModeRegistry,
    apply_creation,
    apply_pair_creation,
    inner_product,
    map_modes,
    product_state,
    registry_from,
    state_from_lines,
    state_to_lines,
    tensor_product,
    vacuum,
)


def two_mode_registry():
    return registry_from([ModeLabel(1, "H"), ModeLabel(1, "V")])


def test_registry_keeps_construction_order():
    labs = [ModeLabel(2, "H"), ModeLabel(1, "V"), ModeLabel(1, "H")]
    reg = registry_from(labs)
    assert list(reg) == labs
    assert reg.index(ModeLabel(1, "V")) == 1
    assert ModeLabel(2, "H") in reg
    assert ModeLabel(3, "H") not in reg


def test_registry_rejects_duplicates():
    with pytest.raises(ValueError):
        registry_from([ModeLabel(1, "H"), ModeLabel(1, "H")])


def test_vacuum_is_normalized():
    reg = two_mode_registry()
    v = vacuum(reg, 4)
    assert v.norm() == 1.0
    assert v.terms == {(0, 0): 1.0 + 0j}


def test_creation_bosonic_factors():
    reg = two_mode_registry()
    s = vacuum(reg, 4)
    s = apply_creation(s, ModeLabel(1, "H"))
    assert s.terms == {(1, 0): pytest.approx(1.0)}
    s = apply_creation(s, ModeLabel(1, "H"))
    # a+ a+ |0> = sqrt(2) |2>
    assert s.terms[(2, 0)] == pytest.approx(math.sqrt(2))
    s = apply_creation(s, ModeLabel(1, "H"))
    assert s.terms[(3, 0)] == pytest.approx(math.sqrt(6))


def test_creation_respects_truncation():
    reg = two_mode_registry()
    s = vacuum(reg, 2)
    for _ in range(3):
        s = apply_creation(s, ModeLabel(1, "H"))
    assert s.terms == {}
    assert s.norm() == 0.0


def test_pair_creation_matches_two_singles():
    reg = two_mode_registry()
    a = apply_pair_creation(vacuum(reg, 4), ModeLabel(1, "H"), ModeLabel(1, "V"))
    b = apply_creation(apply_creation(vacuum(reg, 4), ModeLabel(1, "H")), ModeLabel(1, "V"))
    assert a.terms == b.terms


def test_creation_coefficient_multiplies_amplitude():
    reg = two_mode_registry()
    s = apply_creation(vacuum(reg, 4), ModeLabel(1, "V"), coeff=0.5j)
    assert s.terms == {(0, 1): pytest.approx(0.5j)}


def test_vacuum_registry_can_be_empty():
    reg = registry_from([])
    v = vacuum(reg, 0)
    assert v.terms == {(): 1.0 + 0j}
    assert inner_product(v, v) == pytest.approx(1.0)


def test_tensor_product_of_vacua_is_vacuum():
    a = vacuum(registry_from([ModeLabel(1, "H")]), 2)
    b = vacuum(registry_from([ModeLabel(2, "H")]), 2)
    t = tensor_product(a, b)
    assert t.terms == {(0, 0): 1.0 + 0j}
    assert list(t.registry) == [ModeLabel(1, "H"), ModeLabel(2, "H")]


def test_tensor_product_single_photons():
    a = apply_creation(vacuum(registry_from([ModeLabel(1, "H")]), 2), ModeLabel(1, "H"))
    b = apply_creation(vacuum(registry_from([ModeLabel(2, "H")]), 2), ModeLabel(2, "H"))
    t = tensor_product(a, b)
    assert t.terms == {(1, 1): pytest.approx(1.0)}


def test_tensor_product_expands_products_of_superpositions():
    reg_a = registry_from([ModeLabel(1, "H")])
    reg_b = registry_from([ModeLabel(2, "H")])
    a = AmplitudeState(reg_a, {(0,): 0.6 + 0j, (1,): 0.8j}, 2)
    b = AmplitudeState(reg_b, {(0,): 0.5 + 0j, (1,): 0.5 + 0j}, 2)
    t = tensor_product(a, b)
    assert t.terms[(0, 0)] == pytest.approx(0.3)
    assert t.terms[(0, 1)] == pytest.approx(0.3)
    assert t.terms[(1, 0)] == pytest.approx(0.4j)
    assert t.terms[(1, 1)] == pytest.approx(0.4j)
    assert t.norm() == pytest.approx(a.norm() * b.norm())


def test_tensor_product_rejects_shared_labels():
    a = vacuum(registry_from([ModeLabel(1, "H")]), 2)
    b = vacuum(registry_from([ModeLabel(1, "H")]), 2)
    with pytest.raises(ValueError):
        tensor_product(a, b)


def test_tensor_product_truncation_cap():
    reg_a = registry_from([ModeLabel(1, "H")])
    reg_b = registry_from([ModeLabel(2, "H")])
    a = AmplitudeState(reg_a, {(2,): 1.0 + 0j}, 2)
    b = AmplitudeState(reg_b, {(2,): 1.0 + 0j}, 2)
    assert tensor_product(a, b).terms == {(2, 2): 1.0 + 0j}
    assert tensor_product(a, b, truncation=3).terms == {}


def test_inner_product_conjugates_left_argument():
    reg = two_mode_registry()
    x = AmplitudeState(reg, {(1, 0): 1j}, 4)
    y = AmplitudeState(reg, {(1, 0): 1.0 + 0j}, 4)
    assert x.inner(y) == pytest.approx(-1j)
    assert y.inner(x) == pytest.approx(1j)


def test_superposition_norm():
    # (|2,0> + |0,2>)/sqrt2 has unit norm; overlap with |2,0> is 1/sqrt2
    reg = two_mode_registry()
    c = 1 / math.sqrt(2)
    s = AmplitudeState(reg, {(2, 0): c, (0, 2): c}, 4)
    assert s.norm() == pytest.approx(1.0)
    basis = AmplitudeState(reg, {(2, 0): 1.0 + 0j}, 4)
    assert abs(basis.inner(s)) == pytest.approx(c)


def test_scaling_and_addition():
    reg = two_mode_registry()
    s = AmplitudeState(reg, {(1, 0): 0.5 + 0j, (0, 1): 0.5j}, 4)
    t = (2.0 * s) + s.scaled(-1.0)
    assert t.terms[(1, 0)] == pytest.approx(0.5)
    assert t.terms[(0, 1)] == pytest.approx(0.5j)
    cancel = s + s.scaled(-1.0)
    assert cancel.terms == {}


def test_pruning_drops_tiny_amplitudes():
    reg = two_mode_registry()
    s = AmplitudeState(reg, {(1, 0): 1.0 + 0j, (0, 1): 1e-16}, 4)
    assert (1.0 * s).terms == {(1, 0): 1.0 + 0j}


def test_normalize_zero_state_raises():
    reg = two_mode_registry()
    s = AmplitudeState(reg, {}, 4)
    with pytest.raises(ValueError):
        s.normalized()


def test_photon_number_sectors():
    reg = two_mode_registry()
    s = AmplitudeState(reg, {(0, 0): 0.5 + 0j, (1, 1): 0.5 + 0j, (2, 0): 0.5 + 0j}, 4)
    sectors = s.photon_number_sectors()
    assert set(sectors) == {0, 2}
    assert sectors[2].terms == {(1, 1): 0.5 + 0j, (2, 0): 0.5 + 0j}


def test_product_state_disjoint_modes():
    reg = registry_from(
        [ModeLabel(1, "H"), ModeLabel(1, "V"), ModeLabel(2, "H"), ModeLabel(2, "V")]
    )
    left = AmplitudeState(reg, {(1, 0, 0, 0): 1 / math.sqrt(2), (0, 1, 0, 0): 1 / math.sqrt(2)}, 8)
    right = AmplitudeState(reg, {(0, 0, 2, 0): 1.0 + 0j}, 8)
    combined = product_state(left, right)
    assert combined.norm() == pytest.approx(1.0)
    assert combined.terms[(1, 0, 2, 0)] == pytest.approx(1 / math.sqrt(2))
    assert combined.terms[(0, 1, 2, 0)] == pytest.approx(1 / math.sqrt(2))


def test_product_state_rejects_overlap():
    reg = two_mode_registry()
    a = AmplitudeState(reg, {(1, 0): 1.0 + 0j}, 4)
    b = AmplitudeState(reg, {(1, 0): 1.0 + 0j}, 4)
    with pytest.raises(ValueError):
        product_state(a, b)


def test_product_state_respects_truncation():
    reg = registry_from([ModeLabel(1, "H"), ModeLabel(2, "H")])
    a = AmplitudeState(reg, {(2, 0): 1.0 + 0j}, 3)
    b = AmplitudeState(reg, {(0, 2): 1.0 + 0j}, 3)
    assert product_state(a, b).terms == {}


def test_map_modes_renames_and_preserves_norm():
    small = registry_from([ModeLabel(1, "H"), ModeLabel(1, "V")])
    big = registry_from(
        [ModeLabel(7, "H", "e"), ModeLabel(7, "V", "e"), ModeLabel(8, "H", "e")]
    )
    s = AmplitudeState(small, {(1, 0): 0.6 + 0j, (0, 1): 0.8j}, 4)
    mapped = map_modes(s, big, lambda lab: ModeLabel(7, lab.pol, "e"))
    assert mapped.norm() == pytest.approx(1.0)
    assert mapped.terms[(1, 0, 0)] == pytest.approx(0.6)
    assert mapped.terms[(0, 1, 0)] == pytest.approx(0.8j)


def test_map_modes_rejects_collisions():
    small = registry_from([ModeLabel(1, "H"), ModeLabel(2, "H")])
    big = registry_from([ModeLabel(3, "H")])
    s = AmplitudeState(small, {(1, 1): 1.0 + 0j}, 4)
    with pytest.raises(ValueError):
        map_modes(s, big, lambda lab: ModeLabel(3, "H"))


def test_serialization_round_trip_is_exact():
    rng = np.random.default_rng(20240817)
    reg = registry_from(
        [ModeLabel(a, p) for a in (1, 2, 3) for p in ("H", "V")]
    )
    for _ in range(20):
        terms = {}
        for _ in range(12):
            occ = tuple(int(n) for n in rng.integers(0, 3, size=6))
            terms[occ] = complex(rng.normal(), rng.normal())
        s = AmplitudeState(reg, terms, 16)
        back = state_from_lines(state_to_lines(s), reg, 16)
        assert back.terms == s.terms


def test_random_state_inner_product_properties():
    rng = np.random.default_rng(7)
    reg = registry_from([ModeLabel(1, "H"), ModeLabel(1, "V"), ModeLabel(2, "H")])
    for _ in range(25):
        terms_a = {
            tuple(int(n) for n in rng.integers(0, 3, size=3)): complex(rng.normal(), rng.normal())
            for _ in range(8)
        }
        terms_b = {
            tuple(int(n) for n in rng.integers(0, 3, size=3)): complex(rng.normal(), rng.normal())
            for _ in range(8)
        }
        a = AmplitudeState(reg, terms_a, 9)
        b = AmplitudeState(reg, terms_b, 9)
        # <a|a> is the squared norm, real and nonnegative
        assert a.inner(a).imag == pytest.approx(0.0, abs=1e-12)
        assert a.inner(a).real == pytest.approx(a.norm_sq())
        # conjugate symmetry
        assert a.inner(b) == pytest.approx(b.inner(a).conjugate())
        # linearity in the right slot
        c = 0.3 - 1.7j
        lhs = a.inner(b.scaled(c))
        assert lhs == pytest.approx(c * a.inner(b))
