"""Counting shifted primes represented by a quadratic form.

The basic question is: for how many primes p <= N is (p - A)/B a
primitive value of f? Theory says the answer grows like
N/(log N)**1.5 unless a local obstruction kills it (x**2 - xy + y**2
with A = B = 1 is the standard example: it only ever catches p = 2).

This module counts those primes at the class level (f itself) or at
the genus level (the table decision), and it also provides the
auxiliary sifted counts used to bound the genus count:

- `count_squarefree_shifted`: n squarefree away from 2 and 3, with
  2**5 and 3**3 not dividing n.
- `count_sifted`: n free of small primes outside 2DAm.
- `count_square_multiple`: n = d**2 * (a genus value).

`check_square_split_bound` checks that the sifted count is at most the
squarefree count plus the square-multiple counts plus pi(|A|).

Counts are reported in a `CountReport`, with the normalized value
count * (log N)**1.5 / N at each checkpoint.
"""
import csv
import io
import json
import logging
import math
from dataclasses import dataclass
from dataclasses import field
from typing import Optional

import numpy as np
from file_clerk import clerk
from sympy import divisors

from qform_tk import arith_tools as arith
from qform_tk import form_tools as forms
from qform_tk import oracle_tools as oracle
from qform_tk import table_tools as tables
from qform_tk.admissible_tools import ShiftConfig
from qform_tk.form_tools import QuadraticForm

logger = logging.getLogger(__name__)

LEVELS = ("class", "genus")

# primes allowed to divide n more than once in the squarefree count
SIFTING_EXCEPTIONS = (2, 3)

# 2**5 and 3**3 may not divide n
POWER_CAPS = {2: 5, 3: 3}

# consecutive normalized counts must stay within this ratio window
STABILITY_WINDOW = (0.5, 2.0)

CSV_COLUMNS = ["N", "count", "normalized"]


@dataclass(frozen=True)
class Checkpoint:
    """A count at one bound N.

    Attributes:
        N: the bound.
        count: how many primes <= N were counted.
        normalized: count * (log N)**1.5 / N.
    """

    N: int
    count: int
    normalized: float


@dataclass
class CountReport:
    """Counts at a series of increasing bounds.

    Attributes:
        checkpoints: the `Checkpoint` list, N increasing.
        config: what was counted (form, A, B, congruence, level...).
    """

    checkpoints: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        """the count at the last checkpoint (0 when there is none)"""
        if not self.checkpoints:
            return 0
        return self.checkpoints[-1].count

    def ratios(self) -> list:
        """Ratios of consecutive normalized counts.

        A ratio with a zero denominator is reported as infinity (or nan
        when both values are zero).
        """
        ratios = []
        for before, after in zip(self.checkpoints, self.checkpoints[1:]):
            if before.normalized:
                ratios.append(after.normalized / before.normalized)
            elif after.normalized:
                ratios.append(math.inf)
            else:
                ratios.append(math.nan)
        return ratios

    @property
    def flagged(self) -> bool:
        """True when the growth does not look like N/(log N)**1.5."""
        if any(point.normalized == 0 for point in self.checkpoints):
            return True
        low, high = STABILITY_WINDOW
        return any(not low <= ratio <= high for ratio in self.ratios())

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for point in self.checkpoints:
            writer.writerow([point.N, point.count, repr(point.normalized)])
        return buffer.getvalue()

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as csv_file:
            csv_file.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str, config: Optional[dict] = None):
        rows = csv.DictReader(io.StringIO(text))
        checkpoints = [
            Checkpoint(
                int(row["N"]), int(row["count"]), float(row["normalized"])
            )
            for row in rows
        ]
        return cls(checkpoints, dict(config or {}))

    @classmethod
    def read_csv(cls, path: str) -> "CountReport":
        return cls.from_csv(clerk.file_to_string(path))

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "checkpoints": [
                {"N": p.N, "count": p.count, "normalized": p.normalized}
                for p in self.checkpoints
            ],
            "flagged": self.flagged,
        }

    def write_json(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as report_file:
            json.dump(self.to_dict(), report_file, indent=2)


@dataclass(frozen=True)
class SplitBoundCheck:
    """The four numbers of the sifted-count bound and the verdict.

    Attributes:
        sifted: the sifted count.
        squarefree: the squarefree count.
        square_multiples: the square-multiple counts summed over d >= Z.
        small_primes: pi(|A|).
    """

    sifted: int
    squarefree: int
    square_multiples: int
    small_primes: int

    @property
    def holds(self) -> bool:
        bound = self.squarefree + self.square_multiples + self.small_primes
        return self.sifted <= bound


def normalized_count(N: int, count: int) -> float:
    """returns count * (log N)**1.5 / N (natural log; 0 for N < 2)"""
    if N < 2:
        return 0.0
    return count * math.log(N) ** 1.5 / N


def decade_checkpoints(N: int) -> list:
    """returns 10, 100, ... below N, followed by N itself"""
    points = []
    bound = 10
    while bound < N:
        points.append(bound)
        bound *= 10
    points.append(N)
    return points


def _check_level(level: str) -> None:
    if level not in LEVELS:
        msg = f"level must be one of {LEVELS}, got '{level}'"
        raise ValueError(msg)


def _config_echo(f: QuadraticForm, cfg: ShiftConfig, **extra) -> dict:
    config = {
        "form": str(f),
        "A": cfg.A,
        "B": cfg.B,
        "ell": cfg.ell,
        "mbar": cfg.mbar,
    }
    config.update(extra)
    return config


def is_shifted_prime_represented(
    p: int, f: QuadraticForm, cfg: ShiftConfig, level: str = "class"
) -> bool:
    """Decides whether (p - A)/B is a primitive value of f.

    Args:
        p: a prime.
        f: a valid form.
        cfg: the shift data.
        level: `class` asks about f itself, `genus` about its genus.

    Returns:
        represented: False whenever B does not divide p - A.
    """
    _check_level(level)
    n = cfg.shifted(p)
    if not n:
        return False
    if level == "genus":
        return tables.genus_represents(n, f)
    if f.discriminant < 0 and n < 0:
        return False
    return oracle.represents_class(f, n)


def primitive_value_mask(
    f: QuadraticForm, limit: int, primitive: bool = True
) -> np.ndarray:
    """Marks the values in [1, limit] taken by a positive definite form.

    Args:
        f: a positive definite form.
        limit: the largest value of interest.
        primitive: only count (x, y) with gcd(x, y) = 1.

    Returns:
        mask: a boolean array of length limit + 1, mask[v] True when v
            is a (primitive) value of f.
    """
    D = f.discriminant
    if D >= 0:
        msg = f"value masks need a definite form; {f} has D={D}"
        raise ValueError(msg)
    forms.check_form(f)
    limit = max(limit, 0)
    mask = np.zeros(limit + 1, dtype=bool)
    if limit < 1:
        return mask
    a, b, c = f.a, f.b, f.c
    y_bound = math.isqrt(4 * a * limit // -D)
    for y in range(0, y_bound + 1):
        disc = D * y * y + 4 * a * limit
        if disc < 0:
            continue
        root = math.isqrt(disc)
        low = (-b * y - root) // (2 * a) - 1
        high = (-b * y + root) // (2 * a) + 1
        xs = np.arange(low, high + 1, dtype=np.int64)
        values = a * xs * xs + b * y * xs + c * y * y
        keep = (values >= 1) & (values <= limit)
        if primitive:
            keep &= np.gcd(xs, y) == 1
        mask[values[keep]] = True
    return mask


def _shifted_block(block: np.ndarray, cfg: ShiftConfig):
    """Computes n = (p - A)/B for a block of primes.

    Returns:
        n: the shifted values (garbage where `ok` is False).
        ok: True where B divides p - A and p is in the progression.
    """
    shifted = block - cfg.A
    ok = shifted % cfg.B == 0
    if cfg.has_congruence:
        ok &= block % cfg.mbar == cfg.ell % cfg.mbar
    return shifted // cfg.B, ok


def _count_blocks(N: int, checkpoints: list, decide) -> list:
    """Runs `decide` over the prime blocks and tallies per checkpoint."""
    counts = [0] * len(checkpoints)
    bounds = np.array(checkpoints, dtype=np.int64)
    for block in arith.prime_segments(N):
        hits = block[decide(block)]
        if hits.size:
            counts = [
                total + int(np.count_nonzero(hits <= bound))
                for total, bound in zip(counts, bounds)
            ]
    return counts


def count_primes(
    f: QuadraticForm,
    cfg: ShiftConfig,
    N: int,
    level: str = "class",
    primitive: bool = True,
    checkpoints: Optional[list] = None,
) -> CountReport:
    """Counts primes p <= N with (p - A)/B represented by f.

    When the config carries a congruence, only p = ell mod mbar are
    counted. Positive definite forms at the class level are handled by
    a value mask; everything else asks the decision functions prime by
    prime.

    Args:
        f: a valid form.
        cfg: the shift data.
        N: the bound.
        level: `class` or `genus`.
        primitive: set False to count non-primitive values too (class
            level, definite forms only).
        checkpoints: bounds to report at (decades and N by default).

    Returns:
        report: the `CountReport`.
    """
    _check_level(level)
    forms.check_form(f)
    cfg.check_discriminant(f.discriminant)
    if not primitive and (level != "class" or f.discriminant > 0):
        msg = "non-primitive counts need a definite form at class level"
        raise ValueError(msg)
    points = sorted(set(checkpoints or decade_checkpoints(N)))
    points = [point for point in points if point <= N] or [N]
    if f.discriminant < 0 and level == "class":
        limit = (N - cfg.A) // cfg.B
        mask = primitive_value_mask(f, limit, primitive)

        def decide(block):
            n, ok = _shifted_block(block, cfg)
            ok &= (n >= 1) & (n <= limit)
            ok[ok] = mask[n[ok]]
            return ok

    else:

        def decide(block):
            _, ok = _shifted_block(block, cfg)
            for index in np.flatnonzero(ok):
                p = int(block[index])
                ok[index] = is_shifted_prime_represented(p, f, cfg, level)
            return ok

    counts = _count_blocks(N, points, decide)
    config = _config_echo(f, cfg, level=level, primitive=primitive)
    report = CountReport(
        [
            Checkpoint(point, count, normalized_count(point, count))
            for point, count in zip(points, counts)
        ],
        config,
    )
    logger.info(
        "%s: %d primes up to %d", config["form"], report.count, N
    )
    return report


def _candidates(f: QuadraticForm, cfg: ShiftConfig, N: int):
    """Yields (p, n) for primes p <= N in the progression with B | p - A."""
    forms.check_form(f)
    cfg.check_discriminant(f.discriminant)
    for block in arith.prime_segments(N):
        n_values, ok = _shifted_block(block, cfg)
        for index in np.flatnonzero(ok):
            yield int(block[index]), int(n_values[index])


def squarefree_outside(n: int, exceptions: tuple = SIFTING_EXCEPTIONS):
    """returns True when no prime outside `exceptions` divides n twice"""
    if n == 0:
        return False
    return all(
        e == 1 or p in exceptions for p, e in arith.factorize(n).factors
    )


def within_power_caps(n: int) -> bool:
    """returns True when 2**5 and 3**3 do not divide n"""
    return all(n % p**cap for p, cap in POWER_CAPS.items())


def count_squarefree_shifted(
    f: QuadraticForm, cfg: ShiftConfig, N: int
) -> int:
    """Counts primes whose n is squarefree outside {2, 3}, genus
    represented, and not divisible by 2**5 or 3**3."""
    count = 0
    for _, n in _candidates(f, cfg, N):
        if not n or not within_power_caps(n) or not squarefree_outside(n):
            continue
        if tables.genus_represents(n, f):
            count += 1
    return count


def sifting_product(f: QuadraticForm, cfg: ShiftConfig, Z: int) -> int:
    """The product of the primes p < Z not dividing 2*D*A*mbar."""
    excluded = 2 * f.discriminant * cfg.A * (cfg.mbar or 1)
    product = 1
    for p in arith.primes_up_to(Z - 1):
        if excluded % p:
            product *= p
    return product


def count_sifted(f: QuadraticForm, cfg: ShiftConfig, N: int, Z: int) -> int:
    """Counts primes whose n has no prime factor below Z (apart from the
    primes of 2DAm), is genus represented, is not divisible by q**2 for
    primes q >= 5 of D, and respects the 2**5 and 3**3 caps.

    Raises:
        ValueError: when Z <= 3.
    """
    if Z <= 3:
        msg = f"Z must be larger than 3, got {Z}"
        raise ValueError(msg)
    product = sifting_product(f, cfg, Z)
    odd_primes = [
        p for p in arith.factorize(f.discriminant).primes() if p > 3
    ]
    count = 0
    for _, n in _candidates(f, cfg, N):
        if not n or math.gcd(n, product) != 1 or not within_power_caps(n):
            continue
        if any(n % (q * q) == 0 for q in odd_primes):
            continue
        if tables.genus_represents(n, f):
            count += 1
    return count


def count_square_multiple(
    f: QuadraticForm, cfg: ShiftConfig, N: int, d: int
) -> int:
    """Counts primes whose n is d**2 times a genus value.

    Raises:
        ValueError: when d < 1.
    """
    if d < 1:
        msg = f"d must be a positive integer, got {d}"
        raise ValueError(msg)
    square = d * d
    count = 0
    for _, n in _candidates(f, cfg, N):
        if n and n % square == 0 and tables.genus_represents(n // square, f):
            count += 1
    return count


def square_multiple_total(
    f: QuadraticForm, cfg: ShiftConfig, N: int, Z: int
) -> int:
    """Adds up the square-multiple counts over Z <= d <= sqrt(N).

    Instead of looping over d, each prime contributes once for every
    d in range with d**2 | n and n/d**2 a genus value. Such d divide
    the square root of the largest square dividing n. With A < 0, n can
    exceed N, and divisors above sqrt(N) are left out.
    """
    top = math.isqrt(N)
    total = 0
    for _, n in _candidates(f, cfg, N):
        if not n:
            continue
        _, root = arith.squarefree_kernel(n)
        for d in divisors(root):
            if d > top:
                break
            if d >= Z and tables.genus_represents(n // (d * d), f):
                total += 1
    return total


def check_square_split_bound(
    f: QuadraticForm, cfg: ShiftConfig, N: int, Z: int
) -> SplitBoundCheck:
    """Checks sifted <= squarefree + sum of square multiples + pi(|A|).

    Returns:
        check: the four numbers; `check.holds` is the verdict.
    """
    check = SplitBoundCheck(
        sifted=count_sifted(f, cfg, N, Z),
        squarefree=count_squarefree_shifted(f, cfg, N),
        square_multiples=square_multiple_total(f, cfg, N, Z),
        small_primes=arith.prime_pi(abs(cfg.A)),
    )
    if not check.holds:
        logger.warning("split bound fails for %s, %s: %s", f, cfg, check)
    return check


def growth_report(
    f: QuadraticForm,
    cfg: ShiftConfig,
    checkpoints: list,
    level: str = "class",
) -> CountReport:
    """Counts at each checkpoint and flags unstable growth.

    The report is flagged when a normalized count is zero or when two
    consecutive normalized counts differ by more than a factor of 2.

    Raises:
        ValueError: when the checkpoints are not strictly increasing.
    """
    if not checkpoints:
        msg = "growth_report needs at least one checkpoint"
        raise ValueError(msg)
    if any(a >= b for a, b in zip(checkpoints, checkpoints[1:])):
        msg = f"checkpoints must increase, got {checkpoints}"
        raise ValueError(msg)
    report = count_primes(
        f, cfg, checkpoints[-1], level, checkpoints=checkpoints
    )
    if report.flagged:
        logger.warning(
            "unstable growth for %s: ratios %s", f, report.ratios()
        )
    return report
