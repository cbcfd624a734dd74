"""Seeded random state generation: determinism and class guarantees."""

from __future__ import annotations

import numpy as np
import pytest

from liepoisson import operators as op
from liepoisson import toda as td
from liepoisson.fixtures import KINDS, seeded_random_state


def test_same_seed_reproduces_bit_for_bit():
    for kind in KINDS:
        a = seeded_random_state(42, kind, 4)
        b = seeded_random_state(42, kind, 4)
        if kind == "toda":
            assert np.array_equal(a.x, b.x) and np.array_equal(a.p, b.p)
        else:
            assert np.array_equal(a, b)


def test_kind_streams_are_independent():
    g = seeded_random_state(7, "general", 4)
    h = seeded_random_state(7, "hermitian", 4)
    assert not np.array_equal(g, h)
    assert not np.array_equal(seeded_random_state(7, "general", 4),
                              seeded_random_state(8, "general", 4))


def test_hermitian_kind_is_hermitian():
    m = seeded_random_state(9, "hermitian", 5)
    assert op.validate(op.ClassTag.HERMITIAN, m)


def test_psd_kind_is_a_density_matrix():
    rho = seeded_random_state(10, "psd", 5)
    assert np.min(np.linalg.eigvalsh(rho)) >= -1e-14
    assert abs(np.trace(rho) - 1.0) < 1e-13


def test_lower_kind_is_lower_triangular():
    m = seeded_random_state(11, "lower", 5)
    assert op.validate(op.ClassTag.LOWER_TRIANGULAR, m)
    assert np.max(np.abs(m)) > 0


def test_toda_kind_is_a_valid_bounded_state():
    state = seeded_random_state(12, "toda", 6)
    assert isinstance(state, td.TodaState)
    assert abs(np.sum(state.p)) < 1e-12
    assert np.all(np.abs(state.x) <= 1.0)
    assert np.array_equal(state.alpha, td.default_weights(6)[0])


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        seeded_random_state(1, "unitary", 3)
    with pytest.raises(ValueError):
        seeded_random_state(1, "general", 0)
