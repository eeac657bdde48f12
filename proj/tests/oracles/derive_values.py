"""Independent high-precision oracle for the frozen expected values in the
C++ unit tests. Run with `python3 tests/oracles/derive_values.py`."""
from fractions import Fraction as F

import mpmath as mp

mp.mp.dps = 40


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def gc_pair(acc, g):
    # acc is projected onto the orthogonal complement of g, g is kept whole.
    c = dot(g, acc) / dot(g, g)
    return [gi + ai - c * gi for ai, gi in zip(acc, g)]


def main():
    print("sigmoid(1) =", mp.nstr(1 / (1 + mp.e ** -1), 15))
    print("-log(0.5) =", mp.nstr(-mp.log(mp.mpf("0.5")), 15))

    t = mp.mpf("1e-4")
    f = 100 * t
    print("subsample p(f=100t) =", mp.nstr(1 - (mp.sqrt(t / f) + t / f), 15))

    a = mp.mpf(4) ** mp.mpf("0.75")
    share = a / (a + 1)
    print("4^0.75 =", mp.nstr(a, 15), " share*100 =", mp.nstr(100 * share, 15),
          " floor =", int(mp.floor(100 * share)))

    total = 1000
    print("alpha(T/2, T=1000) =",
          mp.nstr(mp.mpf("0.025") * (1 - mp.mpf(500) / (total + 1)), 15))

    gs = [[F(1), F(0)], [F(1), F(1)], [F(0), F(2)]]
    acc = gs[0]
    for g in gs[1:]:
        acc = gc_pair(acc, g)
    o = dot(acc, acc) / sum(dot(g, g) for g in gs)
    print("gc_fold([[1,0],[1,1],[0,2]]) =", [str(x) for x in acc], " O =", o,
          "=", float(o))

    pair = gc_pair([F(1), F(0)], [F(1), F(1)])
    o2 = dot(pair, pair) / F(3)
    print("gc_pair([1,0],[1,1]) =", [str(x) for x in pair], " O =", o2, "=", float(o2))


if __name__ == "__main__":
    main()
