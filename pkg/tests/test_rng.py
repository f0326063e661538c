import numpy as np

from foleygen.rng import RngStream


def test_same_name_same_sequence():
    a = RngStream(42, "x").normal((5,))
    b = RngStream(42, "x").normal((5,))
    assert np.array_equal(a, b)


def test_different_names_differ():
    a = RngStream(42, "x").normal((5,))
    b = RngStream(42, "y").normal((5,))
    assert not np.array_equal(a, b)


def test_child_streams_are_stable_and_independent():
    root = RngStream(7, "root")
    c1 = root.child("sample/3").normal((4,))
    # consuming the parent does not shift the child
    root.normal((100,))
    c2 = RngStream(7, "root").child("sample/3").normal((4,))
    assert np.array_equal(c1, c2)
