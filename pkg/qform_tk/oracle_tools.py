"""Brute-force answers to "does this form represent n?", and the harness
that holds the local tables up against them.

There are two independent oracles:

- `represents_enum` searches for (x, y) directly. It only works for
  positive definite forms, where the search region is finite.
- `represents_class` uses the classical criterion: n is primitively
  represented by the class of f exactly when some b with
  b*b = D mod 4n makes (n, b, (b*b - D)/(4n)) properly equivalent to f.
  This one works for indefinite forms as well.

`verify_tables` walks a grid of discriminants, genera and targets,
and compares the table decision (both routes) with the class oracle.
Mismatches go into a `VerificationReport` instead of raising, since a
mismatch is exactly what the harness is looking for.
"""
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
from functools import lru_cache
from typing import Optional

from file_clerk import clerk
from tqdm import tqdm

from qform_tk import arith_tools as arith
from qform_tk import form_tools as forms
from qform_tk import table_tools as tables
from qform_tk.form_tools import QuadraticForm

logger = logging.getLogger(__name__)

# mismatch records kept in a report (the total is always counted)
MISMATCH_CAP = 100


@dataclass(frozen=True)
class Mismatch:
    """One grid cell where the tables and the oracle disagree.

    Attributes:
        D: the discriminant.
        genus_representative: the form standing in for the genus.
        n: the target.
        table: the table decision.
        oracle: the brute-force decision.
        residues: the decision through the residues modulo Q.
    """

    D: int
    genus_representative: str
    n: int
    table: bool
    oracle: bool
    residues: bool


@dataclass
class VerificationReport:
    """Tallies of a table verification run.

    Attributes:
        discriminants: how many discriminants were scanned.
        cells: how many (D, genus, n) cells were compared.
        agreements: cells where the table decision matched the oracle.
        mismatch_count: cells where it did not.
        route_disagreements: cells where the two table routes differ.
        mismatches: the first `MISMATCH_CAP` mismatching cells.
        legacy: whether the uncorrected 2-adic rows were used.
    """

    discriminants: int = 0
    cells: int = 0
    agreements: int = 0
    mismatch_count: int = 0
    route_disagreements: int = 0
    mismatches: list = field(default_factory=list)
    legacy: bool = False

    @property
    def ok(self) -> bool:
        return self.mismatch_count == 0 and self.route_disagreements == 0

    def record(self, mismatch: Mismatch) -> None:
        self.mismatch_count += 1
        if len(self.mismatches) < MISMATCH_CAP:
            self.mismatches.append(mismatch)

    def merge(self, other: "VerificationReport") -> None:
        self.discriminants += other.discriminants
        self.cells += other.cells
        self.agreements += other.agreements
        self.route_disagreements += other.route_disagreements
        self.mismatch_count += other.mismatch_count
        room = max(MISMATCH_CAP - len(self.mismatches), 0)
        self.mismatches.extend(other.mismatches[:room])

    def summary(self) -> str:
        """Returns the report as a few lines of text."""
        variant = "legacy" if self.legacy else "corrected"
        lines = [
            f"tables: {variant}",
            f"discriminants: {self.discriminants}",
            f"cells: {self.cells}",
            f"agreements: {self.agreements}",
            f"mismatches: {self.mismatch_count}",
            f"route disagreements: {self.route_disagreements}",
        ]
        for mismatch in self.mismatches:
            lines.append(
                f"mismatch D={mismatch.D} "
                f"genus={mismatch.genus_representative} n={mismatch.n} "
                f"table={mismatch.table} oracle={mismatch.oracle} "
                f"residues={mismatch.residues}"
            )
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return asdict(self)

    def write_json(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as report_file:
            json.dump(self.to_dict(), report_file, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        values = dict(data)
        values["mismatches"] = [
            Mismatch(**item) for item in data.get("mismatches", [])
        ]
        return cls(**values)

    @classmethod
    def read_json(cls, path: str) -> "VerificationReport":
        return cls.from_dict(json.loads(clerk.file_to_string(path)))


def find_representation(
    f: QuadraticForm, n: int, primitive: bool = True
) -> Optional[tuple]:
    """Searches for (x, y) with f(x, y) = n by direct enumeration.

    Since 4a*f(x, y) = (2ax + by)**2 + |D|*y**2, any solution has
    y**2 <= 4an/|D|, and for each such y the x-values come from a
    quadratic equation.

    Args:
        f: a positive definite form.
        n: the target.
        primitive: require gcd(x, y) = 1.

    Returns:
        witness: an (x, y) pair, or None.

    Raises:
        ValueError: for an indefinite form.
    """
    D = f.discriminant
    if D >= 0:
        msg = f"direct search needs a definite form; {f} has D={D}"
        raise ValueError(msg)
    forms.check_form(f)
    if n < 0:
        return None
    if n == 0:
        return None if primitive else (0, 0)
    a, b = f.a, f.b
    y_bound = math.isqrt(4 * a * n // -D)
    for y in range(0, y_bound + 1):
        disc = D * y * y + 4 * a * n
        if disc < 0:
            continue
        root = math.isqrt(disc)
        if root * root != disc:
            continue
        for numerator in (-b * y + root, -b * y - root):
            if numerator % (2 * a):
                continue
            x = numerator // (2 * a)
            if not primitive or math.gcd(x, y) == 1:
                return x, y
    return None


def represents_enum(f: QuadraticForm, n: int, primitive: bool = True) -> bool:
    """returns True when some (x, y) (coprime if asked) gives f(x, y) = n"""
    return find_representation(f, n, primitive) is not None


@lru_cache(maxsize=65536)
def _class_of(f: QuadraticForm) -> forms.FormClass:
    return forms.reduce(f)


def representing_classes(D: int, n: int) -> set:
    """Finds every class of discriminant D that primitively represents n.

    Args:
        D: a discriminant.
        n: a nonzero target.

    Returns:
        classes: the set of `FormClass` objects (empty for n < 0 when
            D < 0).
    """
    if n == 0:
        msg = "n must be nonzero"
        raise ValueError(msg)
    if D < 0 and n < 0:
        return set()
    classes = set()
    for b in arith.sqrt_discriminant_mod(D, abs(n)):
        g = QuadraticForm(n, b, (b * b - D) // (4 * n))
        if g.is_primitive():
            classes.add(_class_of(g))
    return classes


def represents_class(f: QuadraticForm, n: int) -> bool:
    """Decides whether the class of f primitively represents n.

    Raises:
        ValueError: when n is 0 or f is not valid.
    """
    forms.check_form(f)
    return _class_of(f) in representing_classes(f.discriminant, n)


def genus_represents_oracle(f: QuadraticForm, n: int) -> bool:
    """Decides whether some class in the genus of f represents n."""
    genus = forms.genus_of(f)
    classes = representing_classes(f.discriminant, n)
    return any(form_class in genus for form_class in classes)


def verify_discriminant(
    D: int, n_values: list, legacy: bool = False
) -> VerificationReport:
    """Compares both table routes with the oracle for a single D.

    Cells are visited genus by genus, n ascending within a genus.
    """
    report = VerificationReport(discriminants=1, legacy=legacy)
    genera = forms.genus_partition(D)
    represented = {n: representing_classes(D, n) for n in n_values}
    for genus in genera:
        f = genus.representative
        for n in n_values:
            oracle = any(k in genus for k in represented[n])
            table = tables.genus_represents(n, f, legacy)
            residues = tables.genus_represents_by_residues(n, f, legacy)
            report.cells += 1
            if table != residues:
                report.route_disagreements += 1
            if table == oracle:
                report.agreements += 1
            else:
                report.record(Mismatch(D, str(f), n, table, oracle, residues))
    if report.mismatch_count:
        logger.warning(
            "D=%d: %d mismatches against the oracle",
            D,
            report.mismatch_count,
        )
    return report


def _verify_task(args) -> VerificationReport:
    return verify_discriminant(*args)


def verify_tables(
    D_range,
    n_range,
    report_sink: Optional[str] = None,
    jobs: int = 1,
    legacy: bool = False,
) -> VerificationReport:
    """Runs the table verification grid.

    Every non-square D = 0, 1 mod 4 in `D_range`, every genus of D (one
    representative each) and every nonzero n in `n_range` is a cell.
    Discriminants are handed to `jobs` worker processes and the partial
    reports are merged in D order, so the report never depends on the
    number of workers.

    Args:
        D_range: the discriminants to try (any iterable of integers).
        n_range: the targets to try (0 is skipped).
        report_sink: optional path for a JSON copy of the report.
        jobs: worker processes (1 runs in this process).
        legacy: use the uncorrected 2-adic rows.

    Returns:
        report: the merged `VerificationReport`.
    """
    D_values = sorted(
        D for D in D_range if D % 4 in (0, 1) and not forms.is_square(D)
    )
    n_values = sorted(n for n in n_range if n != 0)
    logger.info(
        "verifying %d discriminants x %d targets with %d jobs",
        len(D_values),
        len(n_values),
        jobs,
    )
    tasks = [(D, n_values, legacy) for D in D_values]
    report = VerificationReport(legacy=legacy)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_verify_task, tasks)
            for partial in tqdm(results, total=len(tasks), disable=None):
                report.merge(partial)
    else:
        for task in tqdm(tasks, disable=None):
            report.merge(_verify_task(task))
    logger.info(
        "%d cells, %d mismatches", report.cells, report.mismatch_count
    )
    if report_sink:
        report.write_json(report_sink)
    return report
