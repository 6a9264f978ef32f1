"""Run a Prolog program file and query solve(X).

Exit-code protocol (shared with the SWI-Prolog harness goal):
  0  solved, X bound; write(X) + newline on stdout
  2  runtime error (uncaught exception)
  3  load error (stderr carries a "Syntax error" line)
  4  solve/1 failed or left X unbound

Invoked as: python -m plgrader.prolog.runner PROGRAM.pl
"""

from __future__ import annotations

import sys

from .engine import (
    Atom,
    Engine,
    PrologError,
    PrologSyntaxError,
    Struct,
    Var,
    deref,
    term_to_str,
)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: runner PROGRAM.pl", file=sys.stderr)
        return 64
    try:
        with open(argv[0], encoding="utf-8", errors="replace") as fh:
            source = fh.read()
    except OSError as exc:
        print(f"cannot read program: {exc}", file=sys.stderr)
        return 66

    engine = Engine()
    try:
        engine.consult_text(source)
    except PrologSyntaxError as exc:
        print(f"Syntax error: {exc}", file=sys.stderr)
        return 3
    for w in engine.warnings:
        print(f"Warning: {w}", file=sys.stderr)

    x = Var("X")
    query = Struct("solve", [x])
    if ("solve", 1) not in engine.db:
        print("Warning: solve/1 is not defined", file=sys.stderr)
        return 4
    try:
        ok = engine.solve_once(query)
    except PrologError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return 2
    if not ok:
        return 4
    result = deref(x)
    if isinstance(result, Var):
        return 4
    sys.stdout.write(term_to_str(result) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
