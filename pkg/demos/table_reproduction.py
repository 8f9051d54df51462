"""Recompute the built-in published tables and summarize agreement.

Run with ``python demos/table_reproduction.py``.  Every published cell is
recomputed from its parameter set; the summary counts MATCH and MISMATCH
flags per table and column, then prints the null-row tables in full.
"""

from __future__ import annotations

from collections import Counter

from skewelliptic.tables import COLUMN_TITLES, TABLE_IDS, compare_table, render_markdown


def main() -> None:
    for tid in TABLE_IDS:
        rows = compare_table(tid)
        tally: Counter = Counter()
        for row in rows:
            for c in row.cells:
                tally[(c.column, c.match)] += 1
        cols = dict.fromkeys(c.column for c in rows[0].cells)
        parts = [f"{COLUMN_TITLES[c]} {tally[(c, True)]}/{tally[(c, True)] + tally[(c, False)]}" for c in cols]
        print(f"Table {tid}: " + ", ".join(parts))
    print()
    print(render_markdown(compare_table("2-1") + compare_table("2-2")))


if __name__ == "__main__":
    main()
