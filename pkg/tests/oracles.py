"""Independent reference implementations used to check the library.

Each one takes the slow, obvious route: full DP tables, all permutations,
linear scans. None of them call into the code under test except for plain
data accessors.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

EPS = Fraction(1, 10**9)


def levenshtein_dp(a: str, b: str) -> int:
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        table[i][0] = i
    for j in range(len(b) + 1):
        table[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return table[len(a)][len(b)]


def norm_lev(a: str, b: str) -> Fraction:
    n = max(len(a), len(b))
    return Fraction(levenshtein_dp(a, b), n) if n else Fraction(0)


def rel(p: Fraction, g: Fraction) -> Fraction:
    return min(Fraction(1), abs(p - g) / max(abs(g), EPS))


def rnss_brute(P, G) -> Fraction:
    P = [Fraction(x) for x in P]
    G = [Fraction(x) for x in G]
    n = max(len(P), len(G))
    if n == 0:
        return Fraction(1)
    Pp = P + [None] * (n - len(P))
    Gp = G + [None] * (n - len(G))
    best = None
    for perm in itertools.permutations(range(n)):
        total = Fraction(0)
        for i, j in enumerate(perm):
            p, g = Pp[i], Gp[j]
            total += Fraction(1) if p is None or g is None else rel(p, g)
        if best is None or total < best:
            best = total
    return 1 - best / n


def table_entries(t):
    """(key, raw, numeric-or-None) straight from the table's rows and headers."""
    out = []
    for row in t.rows:
        for header, cell in zip(t.column_headers[1:], row.cells):
            num = Fraction(cell.numeric) if cell.numeric is not None else None
            out.append((f"{row.label} {header}", cell.raw, num))
    return out


def entry_sim(p, g) -> Fraction:
    key = 1 - norm_lev(p[0], g[0])
    if p[2] is not None and g[2] is not None:
        return key * (1 - rel(p[2], g[2]))
    return key * int(p[1].strip().lower() == g[1].strip().lower())


def rms_brute(pred, gold):
    P, G = table_entries(pred), table_entries(gold)
    if not P and not G:
        return Fraction(1), Fraction(1), Fraction(1)
    if not P or not G:
        return Fraction(0), Fraction(0), Fraction(0)
    best = Fraction(0)
    if len(P) <= len(G):
        for perm in itertools.permutations(range(len(G)), len(P)):
            best = max(best, sum((entry_sim(P[i], G[j]) for i, j in enumerate(perm)), Fraction(0)))
    else:
        for perm in itertools.permutations(range(len(P)), len(G)):
            best = max(best, sum((entry_sim(P[i], G[j]) for j, i in enumerate(perm)), Fraction(0)))
    precision, recall = best / len(P), best / len(G)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else Fraction(0)
    return precision, recall, f1


def nearest_linear(hex_color: str, entries, overrides=None) -> str:
    if overrides and hex_color.lower() in overrides:
        return overrides[hex_color.lower()]
    rgb = tuple(int(hex_color[i : i + 2], 16) for i in (0, 2, 4))
    return min(entries, key=lambda e: (sum((a - b) ** 2 for a, b in zip(rgb, e[1])), e[0]))[0]
