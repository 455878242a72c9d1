"""Realness classification of decomposition sets."""

import numpy as np
import pytest

from tensorid.realcert import (
    AUTOCONJUGATE,
    CONJUGATE_PAIR_MEMBER,
    REAL,
    UnpairedDecompositionError,
    classify,
    is_real_point,
)
from tensorid.waring import Decomposition, Summand


def _dec(*pairs):
    return Decomposition(tuple(Summand((complex(l),), complex(lam)) for l, lam in pairs))


def test_is_real_point_relative_threshold():
    assert is_real_point([1e6, 2e6 + 1e-4j])  # 1e-4 imag on 2e6 scale
    assert not is_real_point([1.0, 1.0 + 1e-6j])
    assert is_real_point([])


def test_classify_real_decomposition():
    real = _dec((1.5, 2.0), (-0.5, 1.0))
    out = classify([real])
    assert out.classes[0].tag == REAL
    assert out.real_count == 1
    assert out.identifiable_over_R and out.identifiable_over_C


def test_classify_autoconjugate():
    auto = _dec((0.5 + 1j, 2.0), (0.5 - 1j, 2.0))
    out = classify([auto])
    assert out.classes[0].tag == AUTOCONJUGATE
    assert out.autoconjugate_count == 1
    assert not out.identifiable_over_R


def test_classify_conjugate_pair():
    a = _dec((0.5 + 1j, 2.0), (0.25, 1.0))
    b = a.conjugate()
    out = classify([a, b])
    tags = [c.tag for c in out.classes]
    assert tags == [CONJUGATE_PAIR_MEMBER, CONJUGATE_PAIR_MEMBER]
    assert out.classes[0].partner == 1
    assert out.classes[1].partner == 0
    assert out.conjugate_pair_count == 1


def test_classify_unpaired_raises():
    lonely = _dec((0.5 + 1j, 2.0), (0.25, 1.0))
    with pytest.raises(UnpairedDecompositionError):
        classify([lonely])


def test_classify_mixed_set_counts():
    real = _dec((1.0, 1.0), (2.0, -1.0))
    auto = _dec((1j, 3.0), (-1j, 3.0))
    a = _dec((0.5 + 1j, 2.0), (0.25, 1.0))
    out = classify([real, auto, a, a.conjugate()])
    s = out.serialize()
    assert s["total"] == 4
    assert s["real"] == 1
    assert s["autoconjugate"] == 1
    assert s["conjugate_pairs"] == 1
    assert s["identifiable_over_R"] is True
    assert s["identifiable_over_C"] is False


def test_classify_serialize_partner_indices():
    a = _dec((0.5 + 1j, 2.0), (0.25, 1.0))
    out = classify([a, a.conjugate()])
    blob = out.serialize()
    assert blob["classes"][0] == {"tag": CONJUGATE_PAIR_MEMBER, "partner": 1}


def test_classify_accepts_registry_like():
    class FakeRegistry:
        solutions = [_dec((1.0, 1.0), (2.0, -1.0))]

    out = classify(FakeRegistry())
    assert out.total == 1 and out.real_count == 1


def test_classify_rejects_non_decompositions():
    with pytest.raises(TypeError):
        classify([np.array([1.0, 2.0])])
