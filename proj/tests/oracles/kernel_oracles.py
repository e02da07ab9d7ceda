"""Independent high-precision reference values for the Volterra kernel tests.

Uses the hypergeometric closed form of the inner integral, which shares no
code path with the C++ quadrature. Values printed here are frozen into
tests/test_volterra.cpp and tests/test_quadrature.cpp.
"""
from mpmath import mp, mpf, hyp2f1, beta, sqrt, quad, exp, gamma

mp.dps = 30


def c_h(h):
    return sqrt(h * (2 * h - 1) / beta(2 - 2 * h, h - mpf(1) / 2))


def kernel(t, s, h):
    t, s, h = mpf(t), mpf(s), mpf(h)
    if s >= t:
        return mpf(0)
    a = h - mpf(3) / 2
    b = h - mpf(1) / 2
    r = s / (t - s)
    inner = r**b / (a + 1) * hyp2f1(-b, a + 1, a + 2, -1 / r)
    return c_h(h) * s ** (mpf(1) / 2 - h) * (t - s) ** (2 * h - 1) * inner


def cell_average(t, lo, hi, h):
    return quad(lambda s: kernel(t, s, h), [lo, (lo + hi) / 2, hi]) / (hi - lo)


if __name__ == "__main__":
    for h in ["0.6", "0.75", "0.9", "0.501"]:
        print("c_H", h, mp.nstr(c_h(mpf(h)), 20))
    for h in ["0.6", "0.75", "0.9"]:
        print("K(1,0.5)", h, mp.nstr(kernel(1, "0.5", mpf(h)), 20))
        print("K(1,0.01)", h, mp.nstr(kernel(1, "0.01", mpf(h)), 20))
        print("K(0.5,0.25)", h, mp.nstr(kernel("0.5", "0.25", mpf(h)), 20))
        print("mean K(1,.) on [0,1]", h, mp.nstr(cell_average(1, 0, 1, mpf(h)), 20))
    h = mpf("0.75")
    for i in range(1, 5):
        row = [mp.nstr(cell_average(mpf(i) / 4, mpf(j) / 4, mpf(j + 1) / 4, h), 17) for j in range(i)]
        print("cellavg N=4 row", i, row)
    print("int w^-0.5 e^w", mp.nstr(quad(lambda w: w ** mpf("-0.5") * exp(w), [0, 1]), 20))
    print("int w^-0.25 cos(3w)", mp.nstr(quad(lambda w: w ** mpf("-0.25") * mp.cos(3 * w), [0, 1]), 20))
    print("beta(0.5,0.25)", mp.nstr(beta(mpf("0.5"), mpf("0.25")), 20))
