"""Smoke test for the sierpile extension module.

Build and install first:  pip install --no-build-isolation -e crates/py
"""

from fractions import Fraction

import sierpile


def main():
    g = sierpile.Gasket(2)
    assert (g.vertex_count(), g.edge_count()) == (15, 27)
    assert g.vertices()[0] == (0, 0)
    assert len(g.to_json()) > 0

    for n in range(2, 5):
        assert sierpile.identity(n, "creutz") == sierpile.identity(n, "recursive")
    idn = sierpile.identity(3)
    assert set(idn) == {2, 3}
    assert sierpile.is_recurrent(3, idn)
    assert not sierpile.is_recurrent(3, [0] * len(idn))
    assert sierpile.group_add(3, idn, idn) == idn
    chips, topples = sierpile.stabilize(1, [5] * 6)
    assert max(chips) <= 3 and sum(topples) > 0

    t = sierpile.GreenTable(1)
    m = sierpile.Gasket(1).cutpoints()[0]
    assert t.get(m, m) == Fraction(3, 10)
    assert t.h_field()[m] == Fraction(1, 2)
    assert sierpile.green_series(1, (1, 0), (1, 0)) == Fraction(9, 50)
    assert sierpile.green_series(1, (1, 0), (0, 1)) == Fraction(3, 50)
    assert sierpile.harmonic_extend(1, 0, 0) == [Fraction(2, 5), Fraction(2, 5), Fraction(1, 5)]
    assert sierpile.energy(0, [1, 0, 0]) == 2

    passed, residual = sierpile.decompose_check(3)
    assert passed and residual == 0
    rows = sierpile.limit_report("I2", "midpoints", 2, 4)
    assert all(r["gap"] == 0 for r in rows)
    assert sierpile.render_svg(2, sierpile.identity(2)).count("<circle") == 15

    try:
        sierpile.identity(1, "recursive")
    except ValueError:
        pass
    else:
        raise AssertionError("level 1 has no recursive identity")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
