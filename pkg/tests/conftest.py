import random
from fractions import Fraction
from pathlib import Path

import pytest

from polyvar.polygeom import Polyhedron, PolyUnion
from polyvar.setmaps import SetMap

DATA = Path(__file__).parent / "data"
_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record a one-line pass/fail verdict, echoed in the terminal summary."""
    def record(number: int, label: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {label}" + (f" ({detail})" if detail else "")
        print(line)
        _VERDICTS.append(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS):
            terminalreporter.write_line(line)


def random_map(rng: random.Random, n: int = 1, m: int = 1, max_pieces: int = 3, coef: int = 2) -> SetMap:
    """Seeded random polyhedral map with small integer data and nonempty pieces."""
    while True:
        pieces = []
        for _ in range(rng.randint(1, max_pieces)):
            ins = []
            for _ in range(rng.randint(1, 3)):
                a = tuple(Fraction(rng.randint(-coef, coef)) for _ in range(n + m))
                if any(a):
                    ins.append((a, Fraction(rng.randint(-coef, coef))))
            eqs = []
            if rng.random() < 0.3:
                a = tuple(Fraction(rng.randint(-coef, coef)) for _ in range(n + m))
                if any(a):
                    eqs.append((a, Fraction(rng.randint(-1, 1))))
            p = Polyhedron(n + m, tuple(ins), tuple(eqs))
            if not p.is_empty:
                pieces.append(p)
        if pieces:
            return SetMap(n, m, pieces)


def graph_points(s: SetMap, rng: random.Random, count: int = 1) -> list:
    """A few points of the graph: vertices first, then interior points."""
    pts = []
    for p in s.graph.pieces:
        pts.extend(p.vertices()[:2])
        pts.append(p.any_point())
    rng.shuffle(pts)
    return pts[:count]
