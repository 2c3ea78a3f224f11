"""Print every built-in reference pattern's full-step tables and check them."""

import argparse

from ltsab import reference_tables


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.parse_args()
    bad = 0
    for key in reference_tables.TABLES:
        want = reference_tables.entries(*key)
        for s, got in reference_tables.reproduce(*key).items():
            ok = got == want
            bad += not ok
            print(f"order {key[0]} {key[1]:<14} set {s}: {'match' if ok else 'MISMATCH'} ({len(got)} entries)")
    print(f"{len(reference_tables.TABLES)} tables, {bad} mismatches")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
