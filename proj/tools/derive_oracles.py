"""Reference values frozen into the unit tests.

Everything here is computed straight from the definitions in high precision
(mpmath): pair sums over explicit kernels, convolutions and integrals by
quadrature, bootstrap moments by brute-force enumeration of resamples. None of
it shares code with the C++ library.

    python3 tools/derive_oracles.py
"""

import itertools
import math

import mpmath as mp

mp.mp.dps = 30

SQ2PI = mp.sqrt(2 * mp.pi)


def phi(u):
    return mp.e ** (-u * u / 2) / SQ2PI


def k1(family, u):
    u = mp.mpf(u)
    if family == "gauss2":
        return phi(u)
    if family == "gauss4":
        return (mp.mpf(3) / 2 - u * u / 2) * phi(u)
    if family == "gauss6":
        return (mp.mpf(15) / 8 - mp.mpf(5) / 4 * u * u + u ** 4 / 8) * phi(u)
    raise ValueError(family)


def kd1(family, u):
    """Self-convolution by quadrature."""
    return mp.quad(lambda t: k1(family, t) * k1(family, u + t), [-mp.inf, -5, 0, 5, mp.inf])


_kd_cache = {}


def kd1_cached(family, u):
    key = (family, mp.nstr(mp.mpf(u), 25))
    if key not in _kd_cache:
        _kd_cache[key] = kd1(family, u)
    return _kd_cache[key]


def kern(family, x, h, conv=False):
    out = mp.mpf(1)
    for xj in x:
        u = mp.mpf(xj) / h
        out *= (kd1_cached(family, u) if conv else k1(family, u)) / h
    return out


def diff(a, b):
    return [mp.mpf(p) - mp.mpf(q) for p, q in zip(a, b)]


def block_of(i, n, b):
    return math.ceil((i + 1) * b / n) - 1


def weights(n, b):
    w = [[mp.mpf(0)] * n for _ in range(n)]
    for i in range(n):
        out = [j for j in range(n) if block_of(j, n, b) != block_of(i, n, b)]
        for j in out:
            w[i][j] = mp.mpf(1) / len(out)
    return w


def plugin(data, fam, h, conv=False):
    n = len(data)
    return sum(kern(fam, diff(data[i], data[j]), h, conv) for i in range(n) for j in range(n)) / n ** 2


def ad_lo(data, fam, h, b):
    n = len(data)
    w = weights(n, b)
    return sum(w[i][j] * kern(fam, diff(data[i], data[j]), h) for i in range(n) for j in range(n)) / n


def isd_lo(data, fam, h, b):
    # (1/n) sum_k int fhat_{-k}^2, with fhat_{-k} = sum_j w_kj K_h(x - X_j)
    n = len(data)
    w = weights(n, b)
    total = mp.mpf(0)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if w[k][i] and w[k][j]:
                    total += w[k][i] * w[k][j] * kern(fam, diff(data[i], data[j]), h, True)
    return total / n


def dcf(data, fam, h):
    n = len(data)
    n1 = n // 2
    return sum(kern(fam, diff(data[i], data[j]), h, True) for i in range(n1) for j in range(n1, n)) / (n1 * (n - n1))


def kzero(fam, d):
    return k1(fam, 0) ** d


def kdzero(fam, d):
    return kd1(fam, 0) ** d


def estimator(name, data, fam, h, c=2, b=None):
    n, d = len(data), len(data[0])
    jw = (1 / (1 - mp.mpf(c) ** d), -mp.mpf(c) ** d / (1 - mp.mpf(c) ** d))
    if name == "AD":
        return plugin(data, fam, h)
    if name == "AD-BC":
        return plugin(data, fam, h) - kzero(fam, d) / (n * h ** d)
    if name == "AD-GJ":
        return jw[0] * plugin(data, fam, h) + jw[1] * plugin(data, fam, c * h)
    if name == "AD-LO":
        return ad_lo(data, fam, h, b or n)
    if name == "ISD":
        return plugin(data, fam, h, True)
    if name == "ISD-BC":
        return plugin(data, fam, h, True) - kdzero(fam, d) / (n * h ** d)
    if name == "ISD-GJ":
        return jw[0] * plugin(data, fam, h, True) + jw[1] * plugin(data, fam, c * h, True)
    if name == "ISD-LO":
        return isd_lo(data, fam, h, b or n)
    if name == "ISD-DCF":
        return dcf(data, fam, h)
    if name.startswith("LR"):
        suffix = name[2:]
        return 2 * estimator("AD" + suffix, data, fam, h, c, b) - estimator("ISD" + suffix, data, fam, h, c, b)
    raise ValueError(name)


D1 = [[-1.3], [-0.4], [0.05], [0.6], [0.61], [1.7], [2.2]]
D2 = [[0.1, -0.2], [0.9, 0.4], [-1.1, 0.3], [0.2, 1.5], [-0.6, -1.0], [1.4, -0.7]]

FAMILIES = ["AD", "AD-BC", "AD-GJ", "AD-LO", "ISD", "ISD-BC", "ISD-GJ", "ISD-LO", "ISD-DCF", "LR", "LR-BC", "LR-GJ",
            "LR-LO"]


def show(label, value):
    print(f"{label:<40} {mp.nstr(value, 17)}")


def kernels_section():
    print("# kernels")
    show("gauss2 K(0)", k1("gauss2", 0))
    show("gauss2 KD(1)", kd1("gauss2", 1))
    show("gauss2 GJ c=2 u=1", -(k1("gauss2", 1) - k1("gauss2", 0.5)))
    for fam in ("gauss4", "gauss6"):
        for u in (0, 0.7, 2.5):
            show(f"{fam} KD({u})", kd1(fam, u))
        show(f"{fam} K(0.7)", k1(fam, 0.7))
    show("gauss2 d=2 KD(0)", kd1("gauss2", 0) ** 2)


def estimators_section():
    print("# estimators, D1, gauss4, h = 0.8, c = 2, LO blocks B = n and B = 2 (suffix /2)")
    for f in FAMILIES:
        show(f"D1 {f}", estimator(f, D1, "gauss4", mp.mpf("0.8")))
    for f in ("AD-LO", "ISD-LO", "LR-LO"):
        show(f"D1 {f}/2", estimator(f, D1, "gauss4", mp.mpf("0.8"), b=2))
    show("D1 ISD-LO/3", estimator("ISD-LO", D1, "gauss4", mp.mpf("0.8"), b=3))
    print("# estimators, D2, gauss2, h = 0.9, c = 1.5")
    for f in FAMILIES:
        show(f"D2 {f}", estimator(f, D2, "gauss2", mp.mpf("0.9"), c=mp.mpf("1.5")))
    show("D2 AD-LO/3", estimator("AD-LO", D2, "gauss2", mp.mpf("0.9"), b=3))


def enumerate_moments(data, fam, h, name, scheme="standard", b=None, stat=None):
    n = len(data)
    if scheme == "standard":
        tuples = itertools.product(range(n), repeat=n)
        p = mp.mpf(1) / n ** n
    else:
        n1 = n // 2
        tuples = (a + c for a in itertools.product(range(n1), repeat=n1)
                  for c in itertools.product(range(n1, n), repeat=n - n1))
        p = mp.mpf(1) / (n1 ** n1 * (n - n1) ** (n - n1))
    m1 = m2 = mp.mpf(0)
    for t in tuples:
        xs = [data[i] for i in t]
        v = stat(xs) if stat else estimator(name, xs, fam, h, b=b)
        m1 += p * v
        m2 += p * v * v
    return m1, m2 - m1 * m1


def bootstrap_section():
    print("# bootstrap moments by enumeration: data E4 = {-0.7, 0.2, 0.9, 1.6}, gauss2, h = 0.6")
    e4 = [[-0.7], [0.2], [0.9], [1.6]]
    h = mp.mpf("0.6")
    for f, b in (("AD", None), ("ISD", None), ("AD-LO", None), ("AD-LO", 2), ("ISD-LO", None), ("ISD-LO", 2),
                 ("ISD-DCF", None), ("LR-GJ", None)):
        m, v = enumerate_moments(e4, "gauss2", h, f, b=b)
        show(f"E4 {f}{'/' + str(b) if b else ''} mean", m)
        show(f"E4 {f}{'/' + str(b) if b else ''} var", v)
    m, v = enumerate_moments(e4, "gauss2", h, "AD-LO", scheme="crossfit2", b=2)
    show("E4 AD-LO/2 crossfit2 mean", m)
    show("E4 AD-LO/2 crossfit2 var", v)

    def tilde_ad_lo(xs):
        n = len(xs)
        w = weights(n, n)
        return sum(w[i][j] * (0 if xs[i] == xs[j] else kern("gauss2", diff(xs[i], xs[j]), h))
                   for i in range(n) for j in range(n)) / n

    m, v = enumerate_moments(e4, "gauss2", h, None, stat=tilde_ad_lo)
    show("E4 tilde AD-LO mean", m)
    show("E4 tilde AD-LO var", v)

    fhat = [sum(kern("gauss2", diff(x, y), h) for y in e4) / 4 for x in e4]
    isd = plugin(e4, "gauss2", h, True)

    def ffs(xs):
        return 2 * sum(fhat[e4.index(x)] for x in xs) / 4 - isd

    m, v = enumerate_moments(e4, "gauss2", h, None, stat=ffs)
    show("E4 fixed-first-stage LR mean", m)
    show("E4 fixed-first-stage LR var", v)


def mixture_section():
    print("# mixture M = 0.3 N(-1, 0.5) + 0.7 N(1.2, 2), d = 1")
    comps = [(mp.mpf("0.3"), mp.mpf(-1), mp.mpf("0.5")), (mp.mpf("0.7"), mp.mpf("1.2"), mp.mpf(2))]

    def f(x):
        return sum(w * mp.npdf(x, m, mp.sqrt(v)) for w, m, v in comps)

    pts = [-mp.inf, -3, -1, 0, 1.2, 4, mp.inf]
    t0 = mp.quad(lambda x: f(x) ** 2, pts)
    cube = mp.quad(lambda x: f(x) ** 3, pts)
    show("M theta0", t0)
    show("M sigma0_sq", 4 * (cube - t0 ** 2))
    show("M f0_delta(0.7)", mp.quad(lambda u: f(u) * f(u + mp.mpf("0.7")), pts))
    h = mp.mpf("0.4")
    for fam in ("gauss2", "gauss4"):
        # E[k_h(X - Y)] = int int k_h(x - y) f(x) f(y)
        fn = lambda x, fam=fam: mp.quad(lambda y: k1(fam, (x - y) / h) / h * f(y), [x - 12 * h, x, x + 12 * h])
        show(f"M {fam} f_n(0.3)", fn(mp.mpf("0.3")))
        show(f"M {fam} theta_n AD h=0.4", mp.quad(lambda x: fn(x) * f(x), pts))
    print("# standard normal")
    show("N theta_n AD h=0.5", 1 / mp.sqrt(2 * mp.pi * (2 + mp.mpf("0.25"))))
    show("N sigma0_sq", 2 / (mp.pi * mp.sqrt(3)) - 1 / mp.pi)
    show("N f0_delta(1)", mp.npdf(1, 0, mp.sqrt(2)))


def inference_section():
    print("# inference")
    show("Phi^-1(0.975)", mp.sqrt(2) * mp.erfinv(2 * mp.mpf("0.975") - 1))
    show("Phi^-1(1e-10)", mp.sqrt(2) * mp.erfinv(2 * mp.mpf("1e-10") - 1))
    show("Phi^-1(0.3)", mp.sqrt(2) * mp.erfinv(2 * mp.mpf("0.3") - 1))


if __name__ == "__main__":
    kernels_section()
    estimators_section()
    bootstrap_section()
    mixture_section()
    inference_section()
