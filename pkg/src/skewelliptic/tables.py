"""Built-in manifest of published measure tables and a side-by-side comparison.

Each entry pairs a parameter set with the published numbers.  Published values
are kept as strings so that the comparison can allow for the printed rounding:
a value MATCHes when it is within ``max(rtol * |published|, half a unit in the
last printed digit)`` of the computed one.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import Decimal

import numpy as np

from .distribution import Convention, SkewElliptical
from .generators import GeneratorFamily
from .measures import report_all

OMEGA_2 = [[2.0, 1.0], [1.0, 3.0]]
DELTA_2 = [0.2, 1.0]
FAMILIES_2 = ["normal", "t:5", "logistic", "laplace", "pearson2:2", "pearson7:4"]
LABELS_2 = ["SN", "St(5)", "SLo", "SLa", "SPII(2)", "SPVII(4)"]

U_PARAMS = dict(
    mu=[4.48872, 5.02663, 4.15431],
    Omega=[[0.10117, 0.02285, 0.02948], [0.02285, 0.06727, 0.01941], [0.02948, 0.01941, 0.04078]],
    delta=[-0.1494547, -0.2270945, -0.1434309],
)
V_PARAMS = dict(
    mu=[4.71430, 4.11939, 5.16496],
    Omega=[[0.10042, 0.03895, 0.04782], [0.03895, 0.11667, 0.01062], [0.04782, 0.01062, 0.08271]],
    delta=[-0.09351741, 0.09451593, -0.26141400],
)

SCALAR_COLUMNS = ("mardia_skew", "mardia_kurt", "malkovich_afifi")
VECTOR_COLUMNS = ("song_approx", "bbq_vector", "bbq_scalar", "mori_vector", "kollo_vector", "srivastava")
COLUMN_TITLES = {
    "mardia_skew": "beta_1k",
    "mardia_kurt": "beta_2k",
    "malkovich_afifi": "beta_1*",
    "song_approx": "Song S(f)",
    "bbq_vector": "BBQ T",
    "bbq_scalar": "BBQ Q*",
    "mori_vector": "MRS s(Y)",
    "kollo_vector": "Kollo b(Y)",
    "srivastava": "Srivastava s2_1k",
}


@dataclass(frozen=True)
class TableRow:
    label: str
    family: str
    mu: list
    Omega: list
    delta: list
    published: dict

    def distribution(self) -> SkewElliptical:
        fam = GeneratorFamily.parse(self.family, len(self.mu))
        return SkewElliptical(self.mu, self.Omega, self.delta, fam)


def _rows_2(delta, published_by_family):
    return [
        TableRow(lab, fam, [0.0, 0.0], OMEGA_2, list(delta), pub)
        for lab, fam, pub in zip(LABELS_2, FAMILIES_2, published_by_family)
    ]


_T11 = [
    ("9.9624e-5", "7.5698", "9.9624e-5"),
    ("0.2153", "38.0429", "0.1640"),
    ("3.9460", "11.3448", "3.0742"),
    ("0.0576", "69.9447", "0.0442"),
    ("0.0088", "4.1372", "0.0062"),
    ("0.2153", "16.0892", "0.1640"),
]
_T12 = [
    ("2.5021e-5", ["-3.0238e-5", "0.0239"], "5.7115e-4", ["-8.0636e-5", "0.0637"], ["-8.0432e-5", "0.0636"], "1.7219"),
    ("0.0521", ["3.5695e-4", "0.3880"], "0.1506", ["9.5187e-4", "1.0347"], ["0.4788", "1.0353"], "2.8037"),
    ("1.8931", ["2.3531", "-17.9186"], "326.6140", ["6.2748", "-47.7830"], ["-1.6552", "-38.0525"], "24690.5000"),
    ("0.5609", ["8.8128e-5", "0.2069"], "0.0428", ["2.3501e-4", "0.5518"], ["0.2451", "0.5520"], "2.1174"),
    ("2.0361e-67", ["1.2653e-4", "-0.0598"], "0.0036", ["3.3741e-4", "-0.1596"], ["-0.1094", "-0.1596"], "1.5687"),
    ("0.0393", ["3.5695e-4", "0.3880"], "0.1506", ["9.5187e-4", "1.0347"], ["0.4788", "1.0353"], "2.8037"),
]
_T21_KURT = ["8", "40", "4.9812", "79.5", "4.1212", "16"]
_ZERO2 = ["0", "0"]

TABLES: dict[str, list[TableRow]] = {
    "1-1": _rows_2(DELTA_2, [dict(zip(SCALAR_COLUMNS, r)) for r in _T11]),
    "1-2": _rows_2(DELTA_2, [dict(zip(VECTOR_COLUMNS, r)) for r in _T12]),
    "2-1": _rows_2([0.0, 0.0], [dict(mardia_skew="0", mardia_kurt=v, malkovich_afifi="0") for v in _T21_KURT]),
    "2-2": _rows_2([0.0, 0.0], [
        dict(song_approx="0", bbq_vector=_ZERO2, bbq_scalar="0", mori_vector=_ZERO2, kollo_vector=_ZERO2, srivastava="0")
        for _ in FAMILIES_2
    ]),
    "17-1": [
        TableRow("U", "normal", published=dict(mardia_skew="0.42214", mardia_kurt="17.29465", malkovich_afifi="0.42214"), **U_PARAMS),
        TableRow("V", "normal", published=dict(mardia_skew="0.66939", mardia_kurt="19.12467", malkovich_afifi="0.66939"), **V_PARAMS),
    ],
    "17-2": [
        TableRow("U", "normal", published=dict(
            song_approx="0.17980", bbq_vector=["-0.04137", "-0.12790", "-0.08561"], bbq_scalar="0.02540",
            mori_vector=["-0.20686", "-0.63950", "-0.42804"], kollo_vector=["-0.52911", "-1.63568", "-1.09482"],
            srivastava="9987.47500"), **U_PARAMS),
        TableRow("V", "normal", published=dict(
            song_approx="0.23603", bbq_vector=["-0.01384", "0.05874", "-0.16971"], bbq_scalar="0.03244",
            mori_vector=["-0.06919", "0.29371", "-0.84854"], kollo_vector=["-0.03322", "0.14101", "-0.40738"],
            srivastava="5248.02100"), **V_PARAMS),
    ],
}
TABLE_IDS = tuple(TABLES)


class UnknownTableError(KeyError):
    def __init__(self, table_id: str):
        super().__init__(table_id)
        self.table_id = table_id

    def __str__(self):
        return f"unknown table {self.table_id!r}; known tables: {', '.join(TABLE_IDS)} (or 1, 2, 17)"


def resolve_ids(table_id: str) -> list[str]:
    """``"1-1"`` -> ``["1-1"]``; ``"1"`` -> ``["1-1", "1-2"]``."""
    if table_id in TABLES:
        return [table_id]
    parts = [t for t in TABLE_IDS if t.split("-")[0] == table_id]
    if not parts:
        raise UnknownTableError(table_id)
    return parts


def _half_ulp(text: str) -> float:
    exp = Decimal(text).as_tuple().exponent
    return 0.5 * 10.0 ** exp if isinstance(exp, int) else 0.0


def value_matches(computed: float, published: str, rtol: float = 1e-3, atol: float = 1e-12) -> bool:
    p = float(published)
    if computed is None or not np.isfinite(computed):
        return False
    tol = max(rtol * abs(p), _half_ulp(published), atol)
    return abs(computed - p) <= tol


@dataclass
class Cell:
    column: str
    computed: object
    published: object
    match: bool


@dataclass
class ComparedRow:
    table: str
    label: str
    family: str
    cells: list = field(default_factory=list)


def compare_table(table_id: str, convention: Convention = "squared", rtol: float = 1e-3) -> list[ComparedRow]:
    """Compute every published cell of one table part and flag agreement."""
    if table_id not in TABLES:
        raise UnknownTableError(table_id)
    out = []
    for row in TABLES[table_id]:
        rep = report_all(row.distribution(), convention)
        cr = ComparedRow(table_id, row.label, row.family)
        for col, pub in row.published.items():
            val = getattr(rep, col)
            if isinstance(pub, list):
                ok = val is not None and all(value_matches(v, p, rtol) for v, p in zip(val, pub))
            else:
                ok = val is not None and value_matches(val, pub, rtol)
            cr.cells.append(Cell(col, val, pub, bool(ok)))
        out.append(cr)
    return out


def _fmt(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    if isinstance(v, str):
        return v
    return f"{v:.5g}"


def render_markdown(rows: list[ComparedRow]) -> str:
    """One Markdown table per table part, cells as ``computed / published FLAG``."""
    blocks = []
    for tid in dict.fromkeys(r.table for r in rows):
        part = [r for r in rows if r.table == tid]
        cols = [c.column for c in part[0].cells]
        head = "| # | Distribution | " + " | ".join(COLUMN_TITLES[c] for c in cols) + " |"
        sep = "|" + "---|" * (len(cols) + 2)
        lines = [f"Table {tid}", "", head, sep]
        for i, r in enumerate(part, 1):
            cells = [f"{_fmt(c.computed)} / {_fmt(c.published)} {'MATCH' if c.match else 'MISMATCH'}" for c in r.cells]
            lines.append(f"| {i} | {r.label} ({r.family}) | " + " | ".join(cells) + " |")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def render_csv(rows: list[ComparedRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["table", "label", "family", "column", "computed", "published", "flag"])
    for r in rows:
        for c in r.cells:
            w.writerow([r.table, r.label, r.family, c.column, _fmt(c.computed), _fmt(c.published), "MATCH" if c.match else "MISMATCH"])
    return buf.getvalue()


def render_json(rows: list[ComparedRow]) -> str:
    data = [
        dict(table=r.table, label=r.label, family=r.family,
             cells=[dict(column=c.column, computed=c.computed, published=c.published,
                         flag="MATCH" if c.match else "MISMATCH") for c in r.cells])
        for r in rows
    ]
    return json.dumps(data, indent=2)
