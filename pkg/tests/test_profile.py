import numpy as np
import pytest

from ringra.profile import (
    CodeProfile,
    DegreeProfile,
    MultiplierDistribution,
    ProfileError,
    bundled_profile,
    bundled_profile_names,
    load_profile,
    save_profile,
)
from ringra.ring import ring_for_q


def test_rate_simple():
    # all VNs degree 4, all CNs degree 2
    dp = DegreeProfile({4: 1.0}, {2: 1.0})
    assert dp.rate() == pytest.approx(0.5)


@pytest.mark.parametrize(
    "name,coding_rate",
    [
        ("q4_R0.5", 0.25),
        ("q4_R1.0", 0.5),
        ("q4_R1.5", 0.75),
        ("q8_R1.0", 1 / 3),
        ("q8_R1.5", 0.5),
        ("q8_R2.0", 2 / 3),
        ("dpc_q4_R1.0", 0.5),
        ("dpc_q8_R1.5", 0.5),
        ("dpc_q8_R2.0", 2 / 3),
    ],
)
def test_bundled_rates(name, coding_rate):
    prof = bundled_profile(name)
    assert prof.rate() == pytest.approx(coding_rate, abs=1e-3)


def test_bundled_listing():
    names = bundled_profile_names()
    assert "q4_R1.0" in names and "dpc_q8_R2.0" in names
    for n in names:
        prof = bundled_profile(n)  # every bundled profile validates
        for dc in prof.degrees.cn_edge_fractions:
            assert abs(prof.multipliers.element_probs(dc).sum() - 1.0) < 1e-6


def test_bundled_multiplier_rows():
    q4 = bundled_profile("q4_R1.0")
    assert q4.multipliers.type_probs(3) == pytest.approx([0.8004, 0.1996], abs=1e-9)
    q8 = bundled_profile("q8_R2.0")
    assert q8.multipliers.type_probs(2) == pytest.approx(
        [0.8700, 0.0000, 0.1300], abs=1e-9
    )
    # equal probability inside a type
    el = q4.multipliers.element_probs(3)
    assert el[0] == pytest.approx(el[2])  # elements 1 and 3 share type 0


def test_spectral_efficiency():
    assert bundled_profile("q4_R1.0").spectral_efficiency() == pytest.approx(1.0, abs=2e-3)
    assert bundled_profile("q8_R1.5").spectral_efficiency() == pytest.approx(1.5, abs=2e-3)


def test_round_trip(tmp_path):
    prof = bundled_profile("q8_R1.5")
    path = tmp_path / "prof.json"
    save_profile(prof, path)
    back = load_profile(path)
    assert back.q == prof.q
    assert back.degrees.vn_edge_fractions == prof.degrees.vn_edge_fractions
    assert back.degrees.cn_edge_fractions == prof.degrees.cn_edge_fractions
    for dc in prof.multipliers.degrees:
        np.testing.assert_array_equal(
            back.multipliers.element_probs(dc), prof.multipliers.element_probs(dc)
        )


def test_malformed_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ProfileError):
        load_profile(p)
    p.write_text('{"format": "something-else"}')
    with pytest.raises(ProfileError):
        load_profile(p)


def test_fraction_sum_violation():
    with pytest.raises(ProfileError):
        DegreeProfile({3: 0.8, 4: 0.1}, {2: 1.0})


def test_negative_fraction_rejected():
    with pytest.raises(ProfileError):
        DegreeProfile({3: 1.2, 4: -0.2}, {2: 1.0})


def test_missing_multiplier_row():
    ring = ring_for_q(4)
    md = MultiplierDistribution.from_type_rows(ring, {2: [0.8, 0.2]})
    with pytest.raises(ProfileError):
        CodeProfile(ring, DegreeProfile({4: 1.0}, {2: 0.5, 3: 0.5}), md)


def test_rate_bounds_enforced():
    ring = ring_for_q(4)
    md = MultiplierDistribution.from_type_rows(ring, {2: [0.8, 0.2]})
    with pytest.raises(ProfileError):
        # degree-2 VNs with degree-2 CNs: rate 1
        CodeProfile(ring, DegreeProfile({2: 1.0}, {2: 1.0}), md)


def test_type_row_split():
    ring = ring_for_q(8)
    md = MultiplierDistribution.from_type_rows(ring, {2: [0.6, 0.3, 0.1]})
    el = md.element_probs(2)
    # type 0 = {1,3,5,7} at 0.15 each, type 1 = {2,6} at 0.15, type 2 = {4} at 0.1
    assert el == pytest.approx([0.15, 0.15, 0.15, 0.1, 0.15, 0.15, 0.15])
    assert md.type_probs(2) == pytest.approx([0.6, 0.3, 0.1])
