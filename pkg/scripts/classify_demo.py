"""Classify the sample specs and print each type symbol with its singular points."""

import pathlib

from heunpainleve.heun_class import classify
from heunpainleve.parser import parse_spec

SPECS = pathlib.Path(__file__).with_name("specs")


def main() -> None:
    for path in sorted(SPECS.glob("*.spec")):
        ps = parse_spec(path.read_text())
        sym = classify(ps.operator, generic=True)
        label = sym.riemann_row if sym.riemann_reducible else sym.name
        points = ", ".join(f"{p}: rank {r}" for p, r in sym.points)
        print(f"{path.stem:8} {sym.symbol:12} {label}  [{points}]")


if __name__ == "__main__":
    main()
