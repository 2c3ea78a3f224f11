"""Reference 2:1 coefficient tables.

Times are in units of the small step (small step 1, large step 2).  Each
table gives full-step coefficients normalized by the step being taken, with
rows indexed by evaluation times of set ``A`` and columns by those of set
``B``.  Zero entries are listed where they appear in the layout.
"""

from fractions import Fraction

# pattern name -> (A times, B times), for times in [-HISTORY, HISTORY)
HISTORY = 20


def pattern(name: str) -> tuple[list[int], list[int]]:
    ints = range(-HISTORY, HISTORY)
    evens = range(-HISTORY, HISTORY, 2)
    if name == "steady":
        a, b = evens, ints
    elif name == "lts_decrease":
        a, b = evens, [t for t in ints if t >= 0 or t % 2 == 0]
    elif name == "lts_increase":
        a, b = [t for t in ints if t <= 0 or t % 2 == 0], ints
    elif name == "gts_decrease":
        a, b = [t for t in ints if t >= 0 or t % 2 == 0], ints
    elif name == "gts_increase":
        a, b = evens, [t for t in ints if t <= 0 or t % 2 == 0]
    else:
        raise KeyError(name)
    return list(a), list(b)


def step_of(label: str) -> tuple[str, str, int, int]:
    """(pattern, stepping sets, step start, step end) for a table label."""
    if label in ("a", "b", "c"):
        return {"a": ("steady", "A", 0, 2), "b": ("steady", "B", 0, 1), "c": ("steady", "B", 1, 2)}[label]
    kind, i = label[0], int(label[1:])
    return {
        "d": ("lts_decrease", "A", 2 * i, 2 * i + 2),
        "e": ("lts_decrease", "B", 2 * i, 2 * i + 1),
        "f": ("lts_decrease", "B", 2 * i + 1, 2 * i + 2),
        "g": ("lts_increase", "A", 2 * i, 2 * i + 2),
        "h": ("lts_increase", "B", 2 * i, 2 * i + 1),
        "i": ("lts_increase", "B", 2 * i + 1, 2 * i + 2),
        "j": ("gts_decrease", "AB", i, i + 1),
        "k": ("gts_increase", "AB", 2 * i, 2 * i + 2),
    }[kind]


# (order, label) -> (row times, column times, rows of "p/q" strings)
TABLES = {
    (2, "a"): (
        (0, -2,),
        (1, 0, -1,),
        (("9/8", "1/2", "-1/8",),
        ("-3/8", "0", "-1/8",),),
    ),
    (2, "b"): (
        (0, -2,),
        (0, -1,),
        (("3/2", "-1/4",),
        ("0", "-1/4",),),
    ),
    (2, "c"): (
        (0, -2,),
        (1, 0,),
        (("9/4", "-1/2",),
        ("-3/4", "0",),),
    ),
    (2, "d0"): (
        (0, -2,),
        (1, 0, -2,),
        (("9/8", "3/8", "0",),
        ("-3/8", "0", "-1/8",),),
    ),
    (2, "e0"): (
        (0, -2,),
        (0, -2,),
        (("5/4", "0",),
        ("0", "-1/4",),),
    ),
    (2, "f0"): (
        (0, -2,),
        (1, 0,),
        (("9/4", "-1/2",),
        ("-3/4", "0",),),
    ),
    (2, "g0"): (
        (0, -1,),
        (1, 0, -1,),
        (("3/2", "1/2", "0",),
        ("-3/4", "0", "-1/4",),),
    ),
    (2, "h0"): (
        (0, -1,),
        (0, -1,),
        (("3/2", "0",),
        ("0", "-1/2",),),
    ),
    (2, "i0"): (
        (0, -1,),
        (1, 0,),
        (("3", "-1/2",),
        ("-3/2", "0",),),
    ),
    (2, "j0"): (
        (0, -2,),
        (0, -1,),
        (("3/2", "-1/4",),
        ("0", "-1/4",),),
    ),
    (2, "k0"): (
        (0, -2,),
        (0, -1,),
        (("2", "-1/2",),
        ("0", "-1/2",),),
    ),
    (3, "a"): (
        (0, -2, -4,),
        (1, 0, -1, -2,),
        (("115/64", "7/24", "-11/64", "0",),
        ("-115/96", "0", "-11/32", "5/24",),
        ("23/64", "0", "11/192", "0",),),
    ),
    (3, "b"): (
        (0, -2, -4,),
        (0, -1, -2,),
        (("23/12", "-1/2", "0",),
        ("0", "-1", "5/12",),
        ("0", "1/6", "0",),),
    ),
    (3, "c"): (
        (0, -2, -4,),
        (1, 0, -1,),
        (("115/32", "-4/3", "5/32",),
        ("-115/48", "0", "5/16",),
        ("23/32", "0", "-5/96",),),
    ),
    (3, "d0"): (
        (0, -2, -4,),
        (1, 0, -2, -4,),
        (("5/3", "1/4", "0", "0",),
        ("-10/9", "0", "-2/9", "0",),
        ("1/3", "0", "0", "1/12",),),
    ),
    (3, "e0"): (
        (0, -2, -4,),
        (0, -2, -4,),
        (("17/12", "0", "0",),
        ("0", "-7/12", "0",),
        ("0", "0", "1/6",),),
    ),
    (3, "f0"): (
        (0, -2, -4,),
        (1, 0, -2,),
        (("10/3", "-11/12", "0",),
        ("-20/9", "0", "5/36",),
        ("2/3", "0", "0",),),
    ),
    (3, "g0"): (
        (0, -1, -2,),
        (1, 0, -1, -2,),
        (("23/8", "7/24", "0", "0",),
        ("-23/8", "0", "-11/24", "0",),
        ("23/24", "0", "0", "5/24",),),
    ),
    (3, "h0"): (
        (0, -1, -2,),
        (0, -1, -2,),
        (("23/12", "0", "0",),
        ("0", "-4/3", "0",),
        ("0", "0", "5/12",),),
    ),
    (3, "i0"): (
        (0, -1, -2,),
        (1, 0, -1,),
        (("23/4", "-4/3", "0",),
        ("-23/4", "0", "5/12",),
        ("23/12", "0", "0",),),
    ),
    (3, "g1"): (
        (2, 0, -1,),
        (3, 2, 1, 0,),
        (("23/12", "7/24", "-11/72", "0",),
        ("-23/12", "0", "-11/24", "5/24",),
        ("23/24", "0", "11/72", "0",),),
    ),
    (3, "h1"): (
        (2, 0, -1,),
        (2, 1, 0,),
        (("23/12", "-4/9", "0",),
        ("0", "-4/3", "5/12",),
        ("0", "4/9", "0",),),
    ),
    (3, "i1"): (
        (2, 0, -1,),
        (3, 2, 1,),
        (("23/6", "-4/3", "5/36",),
        ("-23/6", "0", "5/12",),
        ("23/12", "0", "-5/36",),),
    ),
    (3, "j0"): (
        (0, -2, -4,),
        (0, -1, -2,),
        (("23/12", "-1/2", "0",),
        ("0", "-1", "5/12",),
        ("0", "1/6", "0",),),
    ),
    (3, "j1"): (
        (1, 0, -2,),
        (1, 0, -1,),
        (("23/12", "0", "-5/36",),
        ("0", "-4/3", "5/12",),
        ("0", "0", "5/36",),),
    ),
    (3, "k0"): (
        (0, -2, -4,),
        (0, -1, -2,),
        (("19/6", "-5/4", "0",),
        ("0", "-5/2", "7/6",),
        ("0", "5/12", "0",),),
    ),
    (3, "k1"): (
        (2, 0, -2,),
        (2, 0, -1,),
        (("37/18", "0", "-5/36",),
        ("0", "-13/6", "5/6",),
        ("0", "0", "5/12",),),
    ),
    (4, "a"): (
        (0, -2, -4, -6,),
        (1, 0, -1, -2, -3,),
        (("1925/768", "-1/12", "-55/384", "0", "3/256",),
        ("-1925/768", "0", "-55/128", "7/12", "-27/256",),
        ("385/256", "0", "55/384", "0", "-27/256",),
        ("-275/768", "0", "-11/384", "0", "3/256",),),
    ),
    (4, "b"): (
        (0, -2, -4, -6,),
        (0, -1, -2, -3,),
        (("55/24", "-295/384", "0", "3/128",),
        ("0", "-295/128", "37/24", "-27/128",),
        ("0", "295/384", "0", "-27/128",),
        ("0", "-59/384", "0", "3/128",),),
    ),
    (4, "c"): (
        (0, -2, -4, -6,),
        (1, 0, -1, -2,),
        (("1925/384", "-59/24", "185/384", "0",),
        ("-1925/384", "0", "185/128", "-3/8",),
        ("385/128", "0", "-185/384", "0",),
        ("-275/384", "0", "37/384", "0",),),
    ),
    (4, "d0"): (
        (0, -2, -4, -6,),
        (1, 0, -2, -4, -6,),
        (("833/384", "47/384", "0", "0", "0",),
        ("-833/384", "0", "-37/128", "0", "0",),
        ("833/640", "0", "0", "461/1920", "0",),
        ("-119/384", "0", "0", "0", "-25/384",),),
    ),
    (4, "e0"): (
        (0, -2, -4, -6,),
        (0, -2, -4, -6,),
        (("99/64", "0", "0", "0",),
        ("0", "-187/192", "0", "0",),
        ("0", "0", "107/192", "0",),
        ("0", "0", "0", "-25/192",),),
    ),
    (4, "f0"): (
        (0, -2, -4, -6,),
        (1, 0, -2, -4,),
        (("833/192", "-125/96", "0", "0",),
        ("-833/192", "0", "19/48", "0",),
        ("833/320", "0", "0", "-37/480",),
        ("-119/192", "0", "0", "0",),),
    ),
    (4, "d1"): (
        (2, 0, -2, -4,),
        (3, 2, 1, 0, -2,),
        (("1925/768", "-25/192", "-65/768", "0", "0",),
        ("-1925/768", "0", "-65/256", "29/96", "0",),
        ("385/256", "0", "65/768", "0", "-3/64",),
        ("-275/768", "0", "-13/768", "0", "0",),),
    ),
    (4, "e1"): (
        (2, 0, -2, -4,),
        (2, 1, 0, -2,),
        (("211/96", "-125/192", "0", "0",),
        ("0", "-125/64", "47/48", "0",),
        ("0", "125/192", "0", "-3/32",),
        ("0", "-25/192", "0", "0",),),
    ),
    (4, "f1"): (
        (2, 0, -2, -4,),
        (3, 2, 1, 0,),
        (("1925/384", "-59/24", "185/384", "0",),
        ("-1925/384", "0", "185/128", "-3/8",),
        ("385/128", "0", "-185/384", "0",),
        ("-275/384", "0", "37/384", "0",),),
    ),
    (4, "g0"): (
        (0, -1, -2, -3,),
        (1, 0, -1, -2, -3,),
        (("55/12", "-1/12", "0", "0", "0",),
        ("-55/8", "0", "-11/24", "0", "0",),
        ("55/12", "0", "0", "7/12", "0",),
        ("-55/48", "0", "0", "0", "-3/16",),),
    ),
    (4, "h0"): (
        (0, -1, -2, -3,),
        (0, -1, -2, -3,),
        (("55/24", "0", "0", "0",),
        ("0", "-59/24", "0", "0",),
        ("0", "0", "37/24", "0",),
        ("0", "0", "0", "-3/8",),),
    ),
    (4, "i0"): (
        (0, -1, -2, -3,),
        (1, 0, -1, -2,),
        (("55/6", "-59/24", "0", "0",),
        ("-55/4", "0", "37/24", "0",),
        ("55/6", "0", "0", "-3/8",),
        ("-55/24", "0", "0", "0",),),
    ),
    (4, "g1"): (
        (2, 0, -1, -2,),
        (3, 2, 1, 0, -1,),
        (("275/96", "-1/12", "-11/96", "0", "0",),
        ("-275/48", "0", "-11/16", "7/12", "0",),
        ("275/48", "0", "11/24", "0", "-3/16",),
        ("-55/32", "0", "-11/96", "0", "0",),),
    ),
    (4, "h1"): (
        (2, 0, -1, -2,),
        (2, 1, 0, -1,),
        (("55/24", "-59/96", "0", "0",),
        ("0", "-59/16", "37/24", "0",),
        ("0", "59/24", "0", "-3/8",),
        ("0", "-59/96", "0", "0",),),
    ),
    (4, "i1"): (
        (2, 0, -1, -2,),
        (3, 2, 1, 0,),
        (("275/48", "-59/24", "37/96", "0",),
        ("-275/24", "0", "37/16", "-3/8",),
        ("275/24", "0", "-37/24", "0",),
        ("-55/16", "0", "37/96", "0",),),
    ),
    (4, "g2"): (
        (4, 2, 0, -1,),
        (5, 4, 3, 2, 1,),
        (("165/64", "-1/12", "-11/80", "0", "3/320",),
        ("-275/96", "0", "-11/24", "7/12", "-3/32",),
        ("165/64", "0", "11/48", "0", "-9/64",),
        ("-55/48", "0", "-11/120", "0", "3/80",),),
    ),
    (4, "h2"): (
        (4, 2, 0, -1,),
        (4, 3, 2, 1,),
        (("55/24", "-59/80", "0", "3/160",),
        ("0", "-59/24", "37/24", "-3/16",),
        ("0", "59/48", "0", "-9/32",),
        ("0", "-59/120", "0", "3/40",),),
    ),
    (4, "i2"): (
        (4, 2, 0, -1,),
        (5, 4, 3, 2,),
        (("165/32", "-59/24", "37/80", "0",),
        ("-275/48", "0", "37/24", "-3/8",),
        ("165/32", "0", "-37/48", "0",),
        ("-55/24", "0", "37/120", "0",),),
    ),
    (4, "j0"): (
        (0, -2, -4, -6,),
        (0, -1, -2, -3,),
        (("55/24", "-295/384", "0", "3/128",),
        ("0", "-295/128", "37/24", "-27/128",),
        ("0", "295/384", "0", "-27/128",),
        ("0", "-59/384", "0", "3/128",),),
    ),
    (4, "j1"): (
        (1, 0, -2, -4,),
        (1, 0, -1, -2,),
        (("55/24", "0", "-37/120", "0",),
        ("0", "-59/24", "37/32", "0",),
        ("0", "0", "37/48", "-3/8",),
        ("0", "0", "-37/480", "0",),),
    ),
    (4, "j2"): (
        (2, 1, 0, -2,),
        (2, 1, 0, -1,),
        (("55/24", "0", "0", "-3/32",),
        ("0", "-59/24", "0", "3/8",),
        ("0", "0", "37/24", "-9/16",),
        ("0", "0", "0", "-3/32",),),
    ),
    (4, "k0"): (
        (0, -2, -4, -6,),
        (0, -1, -2, -3,),
        (("9/2", "-55/24", "0", "1/12",),
        ("0", "-55/8", "31/6", "-3/4",),
        ("0", "55/24", "0", "-3/4",),
        ("0", "-11/24", "0", "1/12",),),
    ),
    (4, "k1"): (
        (2, 0, -2, -4,),
        (2, 0, -1, -2,),
        (("8/3", "0", "-3/8", "0",),
        ("0", "-35/6", "27/8", "0",),
        ("0", "0", "27/8", "-11/6",),
        ("0", "0", "-3/8", "0",),),
    ),
    (4, "k2"): (
        (4, 2, 0, -2,),
        (4, 2, 0, -1,),
        (("71/30", "0", "0", "-3/40",),
        ("0", "-17/6", "0", "3/8",),
        ("0", "0", "8/3", "-9/8",),
        ("0", "0", "0", "-3/8",),),
    ),
}



def entries(order: int, label: str) -> dict[tuple[int, int], Fraction]:
    """Nonzero entries keyed by (A time, B time)."""
    rows, cols, values = TABLES[order, label]
    return {
        (r, c): Fraction(v)
        for r, row in zip(rows, values)
        for c, v in zip(cols, row)
        if Fraction(v) != 0
    }


def reproduce(order: int, label: str, small_step=None) -> dict[str, dict[tuple[int, int], Fraction]]:
    """Regenerate a table from its step pattern, once per stepping set.

    Keys of the inner dicts are (A time, B time), as in ``entries``.
    """
    from .coefficients import accumulate_full_step, lts_small_step_beta
    from .time_grid import StepSequence, merge_union

    name, stepping, t0, t1 = step_of(label)
    a, b = pattern(name)
    grid = merge_union([StepSequence("A", a), StepSequence("B", b)])
    out = {}
    for s in stepping:
        times = a if s == "A" else b
        m = times.index(t0)
        if times[m + 1] != t1:
            raise ValueError(f"{label}: set {s} does not step {t0} -> {t1}")
        table = accumulate_full_step(grid, order, s, m, small_step or lts_small_step_beta)
        out[s] = {(a[qa], b[qb]): Fraction(v) for (qa, qb), v in table.entries.items()}
    return out
