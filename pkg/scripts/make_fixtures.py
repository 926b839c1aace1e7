#!/usr/bin/env python3
"""Regenerate the bundled CSV fixtures under tests/fixtures/."""

import pathlib

from tradetopo import synthetic

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, text in synthetic.fixture_files().items():
        (OUT / name).write_text(text)
        print(f"wrote {OUT / name}")


if __name__ == "__main__":
    main()
