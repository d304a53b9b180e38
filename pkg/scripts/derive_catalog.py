"""Rederive every catalog Hamiltonian from its Heun class family and report the checks."""

import time

from heunpainleve.painleve_catalog import catalog, verify_entry


def main() -> None:
    start = time.perf_counter()
    for e in catalog():
        rep = verify_entry(e)
        status = "ok" if rep.ok else "FAILED"
        print(f"{e.type.tag:9} {e.type.symbol:12} subcase {e.subcase.tag:2} "
              f"scale {str(e.scale):5} {status}")
        print(f"          H = {e.derived_H}")
    print(f"done in {time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()
