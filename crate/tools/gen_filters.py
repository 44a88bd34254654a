#!/usr/bin/env python3
"""Regenerate crates/core/src/filters/coeffs.rs.

Daubechies and symlet filters come from spectral factorization of the
Daubechies polynomial in 60-digit arithmetic. Symlets pick the root set that
matches the published (least-asymmetric) tables. Biorthogonal spline filters
come from the Cohen-Daubechies-Feauveau closed form. Coiflet 2 has no closed
form and is copied from the PyWavelets table.

PyWavelets is only used as a cross-check and as the root-selection guide:

    pip install PyWavelets mpmath
    python3 tools/gen_filters.py > crates/core/src/filters/coeffs.rs
"""

import itertools
import sys

import mpmath as mp
import pywt

mp.mp.dps = 60
SQRT2 = mp.sqrt(2)


def poly_mul(a, b):
    out = [mp.mpf(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def daubechies_roots(n):
    # P(y) = sum_k C(n-1+k, k) y^k, highest power first for polyroots.
    coeffs = [mp.binomial(n - 1 + k, k) for k in range(n)][::-1]
    ys = mp.polyroots(coeffs, maxsteps=500, extraprec=400) if n > 1 else []
    pairs = []
    for y in ys:
        # y = (2 - z - 1/z) / 4  ->  z^2 - (2 - 4y) z + 1 = 0
        b = 2 - 4 * y
        disc = mp.sqrt(b * b - 4)
        z1 = (b + disc) / 2
        z2 = (b - disc) / 2
        inside, outside = (z1, z2) if abs(z1) < 1 else (z2, z1)
        pairs.append((inside, outside))
    return pairs


def group_conjugates(pairs):
    """Group root pairs so a choice keeps the filter real."""
    groups = []
    used = [False] * len(pairs)
    for i, (zi, _) in enumerate(pairs):
        if used[i]:
            continue
        used[i] = True
        if abs(mp.im(zi)) < mp.mpf(10) ** -40:
            groups.append([i])
            continue
        for j in range(i + 1, len(pairs)):
            if not used[j] and abs(pairs[j][0] - mp.conj(zi)) < mp.mpf(10) ** -30:
                used[j] = True
                groups.append([i, j])
                break
    return groups


def filter_from_roots(n, zeros):
    poly = [mp.mpf(1)]
    for _ in range(n):
        poly = poly_mul(poly, [mp.mpf(1), mp.mpf(1)])
    cpoly = [mp.mpc(c) for c in poly]
    for z in zeros:
        nxt = [mp.mpc(0)] * (len(cpoly) + 1)
        for i, c in enumerate(cpoly):
            nxt[i] += -z * c
            nxt[i + 1] += c
        cpoly = nxt
    real = [mp.re(c) for c in cpoly]
    s = sum(real)
    return [c * SQRT2 / s for c in real]


def closest_orientation(candidate, reference):
    best = None
    for cand in (candidate, candidate[::-1]):
        err = max(abs(float(c) - r) for c, r in zip(cand, reference))
        if best is None or err < best[0]:
            best = (err, cand)
    return best


def orthogonal_family(name, n, symlet):
    ref = pywt.Wavelet(name).rec_lo
    pairs = daubechies_roots(n)
    groups = group_conjugates(pairs)
    best = None
    choices = itertools.product([0, 1], repeat=len(groups)) if symlet else [tuple([0] * len(groups))]
    for choice in choices:
        zeros = []
        for pick, group in zip(choice, groups):
            for idx in group:
                zeros.append(pairs[idx][pick])
        h = filter_from_roots(n, zeros)
        err, oriented = closest_orientation(h, ref)
        if best is None or err < best[0]:
            best = (err, oriented)
    err, rec_lo = best
    assert err < 1e-9, (name, err)
    return rec_lo[::-1], rec_lo


def cdf_family(name, nr, nd):
    """Synthesis low-pass is the order-nr B-spline, analysis low-pass its CDF dual."""
    w = pywt.Wavelet(name)
    half = mp.mpf(1) / 2
    syn = [mp.mpf(1)]
    for _ in range(nr):
        syn = poly_mul(syn, [half, half])
    k_total = (nr + nd) // 2
    # sin^2(xi/2) = (-z^{-1} + 2 - z) / 4 as a Laurent polynomial shifted by z^1.
    sin2 = [mp.mpf(-1) / 4, mp.mpf(2) / 4, mp.mpf(-1) / 4]
    ana = [mp.mpf(1)]
    for _ in range(nd):
        ana = poly_mul(ana, [half, half])
    acc = [mp.mpf(0)]
    for k in range(k_total):
        term = [mp.binomial(k_total - 1 + k, k)]
        for _ in range(k):
            term = poly_mul(term, sin2)
        # pad to common (centred) length
        width = 2 * (k_total - 1) + 1
        pad = (width - len(term)) // 2
        term = [mp.mpf(0)] * pad + term + [mp.mpf(0)] * pad
        if len(acc) < width:
            p = (width - len(acc)) // 2
            acc = [mp.mpf(0)] * p + acc + [mp.mpf(0)] * p
        acc = [a + t for a, t in zip(acc, term)]
    ana = poly_mul(ana, acc)
    syn = [c * SQRT2 for c in syn]
    ana = [c * SQRT2 for c in ana]

    def place(coeffs, reference):
        length = len(reference)
        best = None
        for off in range(length - len(coeffs) + 1):
            full = [mp.mpf(0)] * off + coeffs + [mp.mpf(0)] * (length - len(coeffs) - off)
            err = max(abs(float(c) - r) for c, r in zip(full, reference))
            if best is None or err < best[0]:
                best = (err, full)
        return best

    err_r, rec_lo = place(syn, w.rec_lo)
    err_d, dec_lo = place(ana, w.dec_lo)
    assert err_r < 1e-12 and err_d < 1e-12, (name, err_r, err_d)
    return dec_lo, rec_lo


def table_family(name):
    w = pywt.Wavelet(name)
    return [mp.mpf(c) for c in w.dec_lo], [mp.mpf(c) for c in w.rec_lo]


FAMILIES = [
    ("HAAR", "haar", lambda: orthogonal_family("haar", 1, False)),
    ("BIOR2_8", "bior2.8", lambda: cdf_family("bior2.8", 2, 8)),
    ("BIOR3_7", "bior3.7", lambda: cdf_family("bior3.7", 3, 7)),
    ("BIOR3_9", "bior3.9", lambda: cdf_family("bior3.9", 3, 9)),
    ("COIF2", "coif2", lambda: table_family("coif2")),
    ("DB4", "db4", lambda: orthogonal_family("db4", 4, False)),
    ("DB6", "db6", lambda: orthogonal_family("db6", 6, False)),
    ("DB8", "db8", lambda: orthogonal_family("db8", 8, False)),
    ("SYM4", "sym4", lambda: orthogonal_family("sym4", 4, True)),
    ("SYM7", "sym7", lambda: orthogonal_family("sym7", 7, True)),
]


def fmt(values):
    return "\n".join("    {:.17e},".format(float(v)) for v in values)


def main():
    out = sys.stdout
    out.write("// @generated by tools/gen_filters.py; do not edit by hand.\n")
    out.write("//\n// Filters are stored in pywt convention: `*_DEC_LO` is the analysis\n")
    out.write("// low-pass in convolution order, `*_REC_LO` the synthesis low-pass.\n\n")
    for const, name, build in FAMILIES:
        dec_lo, rec_lo = build()
        n = len(dec_lo)
        out.write("// {}\n".format(name))
        out.write("pub(crate) const {}_DEC_LO: [f64; {}] = [\n{}\n];\n".format(const, n, fmt(dec_lo)))
        out.write("pub(crate) const {}_REC_LO: [f64; {}] = [\n{}\n];\n\n".format(const, n, fmt(rec_lo)))


if __name__ == "__main__":
    main()
