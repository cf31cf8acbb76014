"""Smoke test for the Python bindings.

Build and install first:
    pip install --no-build-isolation -e crates/python
"""

import json

import unitalforge_py as uf


def main() -> None:
    field = uf.Field(3, 2)
    assert field.size == 9 and field.q == 3
    assert field.mul(field.xi, field.inv(field.xi)) == 1

    plane = uf.Plane(3, 2, "square")
    assert plane.is_planar() and plane.is_normal()
    plane.verify()

    u = plane.u_theta()
    assert len(u) == 28
    u.verify()
    assert len(u.blocks()) == 63
    assert u.circle_design() == (18, 4, 3)
    assert u.wilbrink() == (True, 432, 432)
    assert u.onan_through_infinity() == 0
    assert u.onan_count() == (324, True)
    assert uf.Unital.loads(u.dumps()).points == u.points

    h = uf.Unital.classical(3, 1)
    assert h.onan_count() == (0, True)
    verdict = uf.compare(u, h)
    assert verdict == "NON-ISOMORPHIC (onan count: 324 vs 0)", verdict
    profile = json.loads(u.profile())
    assert profile["onan_count"] == 324

    q5 = uf.Plane(5, 2).u_theta()
    print("explicit O'Nan at q=5:", q5.onan_explicit())

    try:
        uf.Plane(3, 2, "nope")
    except uf.UnitalforgeError as e:
        print("rejected bad spec:", e)
    else:
        raise AssertionError("bad spec accepted")

    passed, _ = uf.criterion(5)
    assert passed
    print("smoke test passed")


if __name__ == "__main__":
    main()
