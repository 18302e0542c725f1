"""Apollonian circle packings through their curvatures.

Four mutually tangent circles with curvatures (a, b, c, d) satisfy
2(a**2 + b**2 + c**2 + d**2) = (a + b + c + d)**2. Replacing one
circle by the other circle tangent to the remaining three is the swap
a -> 2(b + c + d) - a, and repeating swaps builds the packing.

The curvatures of the circles tangent to a fixed circle of curvature a
are the values f(x, y) - a over coprime (x, y) of the tangency form
(b + a, a + b + d - c, d + a), which has discriminant -4a**2. This
module generates both sides (a breadth-first walk of the packing and
a scan of the form) so they can be compared, and counts the tangent
curvatures that are prime.
"""
import csv
import io
import logging
import math
from collections import deque
from dataclasses import dataclass
from dataclasses import field
from typing import Optional

from qform_tk import prime_count_tools as counting
from qform_tk.admissible_tools import ShiftConfig
from qform_tk.form_tools import QuadraticForm

logger = logging.getLogger(__name__)

EDGE_COLUMNS = ["circle", "curvature", "neighbours"]


@dataclass
class PackingSlice:
    """The circles of a packing with curvature up to a bound.

    Attributes:
        root: the starting Descartes quadruple.
        bound: the largest curvature kept.
        curvatures: circle id -> curvature.
        words: circle id -> the swap word (indices) that created it;
            root circles have the empty word.
        neighbours: circle id -> ids of the tangent circles.
    """

    root: tuple
    bound: int
    curvatures: dict = field(default_factory=dict)
    words: dict = field(default_factory=dict)
    neighbours: dict = field(default_factory=dict)

    def curvature_multiset(self) -> list:
        return sorted(self.curvatures.values())

    def neighbour_curvatures(self, circle: int) -> list:
        """sorted curvatures of the circles tangent to `circle`"""
        return sorted(
            self.curvatures[other] for other in self.neighbours[circle]
        )

    def edge_rows(self) -> list:
        rows = []
        for circle in sorted(self.curvatures):
            others = " ".join(str(o) for o in sorted(self.neighbours[circle]))
            rows.append([circle, self.curvatures[circle], others])
        return rows

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(EDGE_COLUMNS)
        writer.writerows(self.edge_rows())
        return buffer.getvalue()

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as csv_file:
            csv_file.write(self.to_csv())


def is_descartes(q) -> bool:
    """Checks the Descartes relation for four curvatures."""
    if len(q) != 4:
        return False
    return 2 * sum(k * k for k in q) == sum(q) ** 2


def _check_quadruple(q) -> None:
    if not is_descartes(q):
        msg = f"{tuple(q)} is not a Descartes quadruple"
        raise ValueError(msg)


def swap(q, i: int) -> tuple:
    """Replaces curvature i by the other root of the Descartes relation.

    Raises:
        ValueError: if q is not a Descartes quadruple.
    """
    _check_quadruple(q)
    others = sum(q) - q[i]
    swapped = list(q)
    swapped[i] = 2 * others - q[i]
    return tuple(swapped)


def tangency_form(q, i: int) -> QuadraticForm:
    """Builds the form whose shifted values are the tangent curvatures.

    The distinguished curvature is a = q[i]; the other three keep their
    order and play b, c, d.

    Returns:
        form: (b + a, a + b + d - c, d + a), of discriminant -4a**2.
    """
    _check_quadruple(q)
    a = q[i]
    b, c, d = (q[j] for j in range(4) if j != i)
    return QuadraticForm(b + a, a + b + d - c, d + a)


def tangent_witnesses(q, i: int, bound: int) -> list:
    """Lists (curvature, x, y) with curvature = f(x, y) - a <= bound.

    (x, y) runs over coprime pairs with (x, y) and (-x, -y) counted
    once: y > 0, or y = 0 and x = 1.
    """
    f = tangency_form(q, i)
    a = q[i]
    limit = bound + a
    D = f.discriminant
    if limit < 1 or f.a <= 0:
        return []
    witnesses = []
    if f.a <= limit:
        witnesses.append((f.a - a, 1, 0))
    y_bound = math.isqrt(4 * f.a * limit // -D)
    for y in range(1, y_bound + 1):
        disc = D * y * y + 4 * f.a * limit
        if disc < 0:
            continue
        root = math.isqrt(disc)
        low = (-f.b * y - root) // (2 * f.a) - 1
        high = (-f.b * y + root) // (2 * f.a) + 1
        for x in range(low, high + 1):
            value = f(x, y)
            if value <= limit and math.gcd(x, y) == 1:
                witnesses.append((value - a, x, y))
    return sorted(witnesses)


def tangent_curvatures_via_form(q, i: int, bound: int) -> list:
    """returns the sorted multiset of curvatures tangent to circle i"""
    return [curvature for curvature, _, _ in tangent_witnesses(q, i, bound)]


def packing_bfs(root, bound: int) -> PackingSlice:
    """Walks the packing breadth first, up to curvature `bound`.

    Every quadruple is expanded by the three swaps that do not undo the
    swap that produced it; a swap whose new curvature exceeds the bound
    is dropped. Each swap creates a new circle (even when its curvature
    repeats one already seen) tangent to the three circles it kept.

    Args:
        root: a Descartes quadruple.
        bound: the largest curvature to keep.

    Returns:
        packing: the `PackingSlice`; root circles above the bound are
            left out.
    """
    _check_quadruple(root)
    root = tuple(root)
    packing = PackingSlice(root=root, bound=bound)
    ids = tuple(range(4))
    for circle, curvature in zip(ids, root):
        packing.curvatures[circle] = curvature
        packing.words[circle] = ()
        packing.neighbours[circle] = set(ids) - {circle}
    queue = deque([(ids, root, None)])
    next_id = 4
    while queue:
        circles, curvatures, last = queue.popleft()
        for j in range(4):
            if j == last:
                continue
            new_curvature = 2 * (sum(curvatures) - curvatures[j])
            new_curvature -= curvatures[j]
            if new_curvature > bound:
                continue
            new_id = next_id
            next_id += 1
            kept = [circles[k] for k in range(4) if k != j]
            packing.curvatures[new_id] = new_curvature
            packing.words[new_id] = packing.words[circles[j]] + (j,)
            packing.neighbours[new_id] = set(kept)
            for other in kept:
                packing.neighbours[other].add(new_id)
            new_circles = circles[:j] + (new_id,) + circles[j + 1 :]
            new_curvatures = (
                curvatures[:j] + (new_curvature,) + curvatures[j + 1 :]
            )
            queue.append((new_circles, new_curvatures, j))
    too_big = [c for c, k in packing.curvatures.items() if k > bound]
    for circle in too_big:
        del packing.curvatures[circle]
        del packing.words[circle]
        del packing.neighbours[circle]
    for circle in packing.neighbours:
        packing.neighbours[circle] -= set(too_big)
    logger.debug(
        "packing from %s up to %d: %d circles",
        root,
        bound,
        len(packing.curvatures),
    )
    return packing


def count_tangent_primes(
    q,
    i: int,
    N: int,
    ell: Optional[int] = None,
    mbar: Optional[int] = None,
) -> counting.CountReport:
    """Counts the prime curvatures <= N tangent to circle i.

    These are the primes p = f(x, y) - a with (x, y) coprime, i.e. a
    class-level shifted-prime count with A = -a and B = 1. The growth
    statement behind it assumes a is odd; an even a still runs, with a
    warning.
    """
    f = tangency_form(q, i)
    a = q[i]
    if a % 2 == 0:
        logger.warning(
            "distinguished curvature %d is even; the counting statement "
            "assumes it is odd",
            a,
        )
    cfg = ShiftConfig(-a, 1, ell, mbar)
    report = counting.count_primes(f, cfg, N, level="class")
    report.config.update({"quadruple": list(q), "index": i})
    return report
