"""Search for the local data (d, L) behind a shifted-prime count.

Counting primes p with (p - A)/B represented by a genus needs a
table-admissible d and a residue-admissible L modulo Q with

- 2 | A*B*d, and
- gcd(B*d*L + A, Q*B*d) = 1.

Such a pair does not always exist. `classify_exception` names the
situations where it cannot, and `find_admissible_pair` does the actual
search. The search refuses to return anything that contradicts the
classifier, so an exhaustive sweep with `exhaust_pairs` is a direct
test of the classification.

Two search modes are supported:

- `strict`: d squarefree, which forces d in {1, 2, 3, 6}.
- `generalized`: d = 2**e2 * 3**e3 with e2 <= 4 and e3 <= 2.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from typing import Optional

from tqdm import tqdm

from qform_tk import arith_tools as arith
from qform_tk import form_tools as forms
from qform_tk import table_tools as tables
from qform_tk.form_tools import QuadraticForm

logger = logging.getLogger(__name__)

MODES = ("strict", "generalized")

TAG_D_FIVE_MOD_EIGHT = "D≡5 mod 8"
TAG_TWO_EXPONENT_FOUR = "ϑ₂≥4"
TAG_TWO_EXPONENT_TWO = "ϑ₂=2, D₂≡1 mod 4"
TAG_THREE_SQUARED = "3|D, 3∤A, 3|(Ba+A), ϑ₃>1"

# candidate d values, smallest first
search_space = {
    "strict": (1, 2, 3, 6),
    "generalized": tuple(
        sorted(2**e2 * 3**e3 for e2 in range(5) for e3 in range(3))
    ),
}

# how many mismatches a sweep report keeps
MISMATCH_CAP = 100


@dataclass(frozen=True)
class ShiftConfig:
    """The shift data of a shifted-prime count.

    We look at primes p with (p - A)/B = n, optionally restricted to
    p = ell mod mbar.

    Attributes:
        A: the nonzero shift.
        B: the positive scale, coprime to A.
        ell: the residue of the congruence restriction (optional).
        mbar: the modulus of the congruence restriction (optional).
    """

    A: int
    B: int = 1
    ell: Optional[int] = None
    mbar: Optional[int] = None

    def __post_init__(self):
        if self.A == 0:
            msg = "A must be nonzero"
            raise ValueError(msg)
        if self.B < 1:
            msg = f"B must be a positive integer, got {self.B}"
            raise ValueError(msg)
        if math.gcd(self.A, self.B) != 1:
            msg = f"A={self.A} and B={self.B} must be coprime"
            raise ValueError(msg)
        if (self.ell is None) != (self.mbar is None):
            msg = "ell and mbar must be given together"
            raise ValueError(msg)
        if self.mbar is not None:
            if self.mbar < 1:
                msg = f"mbar must be positive, got {self.mbar}"
                raise ValueError(msg)
            if math.gcd(self.ell, self.mbar) != 1:
                msg = f"ell={self.ell} and mbar={self.mbar} must be coprime"
                raise ValueError(msg)
            if math.gcd(self.ell - self.A, self.mbar) != 1:
                msg = f"ell - A must be coprime to mbar={self.mbar}"
                raise ValueError(msg)

    @property
    def has_congruence(self) -> bool:
        return self.mbar is not None

    def check_discriminant(self, D: int) -> None:
        """Raises ValueError unless gcd(mbar, 2*D*B) = 1."""
        if self.mbar is None:
            return
        modulus = 2 * D * self.B
        if math.gcd(self.mbar, modulus) != 1:
            msg = f"mbar={self.mbar} must be coprime to 2*D*B={modulus}"
            raise ValueError(msg)

    def in_progression(self, p: int) -> bool:
        if self.mbar is None:
            return True
        return p % self.mbar == self.ell % self.mbar

    def shifted(self, p: int) -> Optional[int]:
        """returns (p - A)/B, or None when B does not divide p - A"""
        if (p - self.A) % self.B:
            return None
        return (p - self.A) // self.B


@dataclass(frozen=True)
class AdmissiblePair:
    """A table-admissible d with a residue-admissible L modulo Q.

    Attributes:
        d: the positive d, supported on the primes of 2D.
        L: the residue modulo Q.
        Q: the product of the row moduli.
        certificate: the matched rows, one per prime of 2D.
    """

    d: int
    L: int
    Q: int
    certificate: tuple = field(default_factory=tuple)

    def describe(self) -> str:
        rows = "; ".join(row.describe() for row in self.certificate)
        return f"d={self.d} L={self.L} Q={self.Q} [{rows}]"


@dataclass
class PairSweepReport:
    """Results of checking the search against the classifier.

    Attributes:
        checked: number of (f, A, B, mode) cells looked at.
        pairs: cells where a pair was found.
        exceptions: cells the classifier marked exceptional.
        mismatches: (D, form, A, B, mode, reason) tuples, capped.
        mismatch_count: the uncapped number of mismatches.
    """

    checked: int = 0
    pairs: int = 0
    exceptions: int = 0
    mismatches: list = field(default_factory=list)
    mismatch_count: int = 0

    def merge(self, other: "PairSweepReport") -> None:
        self.checked += other.checked
        self.pairs += other.pairs
        self.exceptions += other.exceptions
        self.mismatch_count += other.mismatch_count
        room = MISMATCH_CAP - len(self.mismatches)
        self.mismatches.extend(other.mismatches[: max(room, 0)])

    def summary(self) -> str:
        return (
            f"checked {self.checked} cells: {self.pairs} pairs, "
            f"{self.exceptions} exceptions, "
            f"{self.mismatch_count} mismatches"
        )


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        msg = f"mode must be one of {MODES}, got '{mode}'"
        raise ValueError(msg)


def classify_exception(
    f: QuadraticForm, cfg: ShiftConfig, mode: str = "strict"
) -> Optional[str]:
    """Names the reason no admissible pair exists, if there is one.

    Args:
        f: a valid form (moved to gcd(a, 2D) = 1 if needed).
        cfg: the shift data.
        mode: `strict` or `generalized`.

    Returns:
        tag: one of the `TAG_*` strings, or None when a pair exists.
    """
    _check_mode(mode)
    g = forms.normalize_for_tables(f)
    dd = tables.discriminant_data(g.discriminant)
    A, B, a, D = cfg.A, cfg.B, g.a, dd.D
    odd_shift = (A * B) % 2 == 1
    if odd_shift and D % 8 == 5:
        return TAG_D_FIVE_MOD_EIGHT
    if mode == "generalized":
        return None
    if odd_shift and dd.two_exponent >= 4:
        return TAG_TWO_EXPONENT_FOUR
    if odd_shift and dd.two_exponent == 2 and dd.D2 % 4 == 1:
        return TAG_TWO_EXPONENT_TWO
    if (
        D % 3 == 0
        and A % 3 != 0
        and (B * a + A) % 3 == 0
        and dd.exponent(3) > 1
    ):
        return TAG_THREE_SQUARED
    return None


def _supported_on(d: int, dd: tables.DiscriminantData) -> bool:
    rest = d
    for p in dd.primes:
        while rest % p == 0:
            rest //= p
    return rest == 1


def _search(g: QuadraticForm, cfg: ShiftConfig, mode: str):
    dd = tables.discriminant_data(g.discriminant)
    A, B = cfg.A, cfg.B
    for d in search_space[mode]:
        if not _supported_on(d, dd):
            continue
        if (A * B * d) % 2:
            continue
        td = tables.decompose(d, dd)
        try:
            rows = tables.local_rows(dd, td, g)
        except tables.InadmissibleError:
            continue
        Q = tables.residue_modulus(dd, td)
        for L in tables.admissible_residues(dd, td, g):
            if math.gcd(B * d * L + A, Q * B * d) == 1:
                return AdmissiblePair(d, L, Q, tuple(rows.values()))
    return None


def find_admissible_pair(
    f: QuadraticForm, cfg: ShiftConfig, mode: str = "strict"
) -> Optional[AdmissiblePair]:
    """Finds the smallest admissible (d, L), smallest d first.

    Args:
        f: a valid form (moved to gcd(a, 2D) = 1 if needed).
        cfg: the shift data.
        mode: `strict` or `generalized`.

    Returns:
        pair: the `AdmissiblePair`, or None when the classifier names
            an exception.

    Raises:
        RuntimeError: when the search and the classifier disagree.
    """
    _check_mode(mode)
    g = forms.normalize_for_tables(f)
    tag = classify_exception(g, cfg, mode)
    pair = _search(g, cfg, mode)
    if pair is not None and tag is not None:
        msg = f"found {pair.describe()} for {g}, {cfg} but tag is '{tag}'"
        raise RuntimeError(msg)
    if pair is None and tag is None:
        msg = f"no admissible pair for {g}, {cfg} ({mode}) and no tag"
        raise RuntimeError(msg)
    return pair


def _d_shape_problems(d: int, mode: str) -> list:
    e2 = arith.valuation(d, 2)
    e3 = arith.valuation(d, 3)
    rest = d // (2**e2 * 3**e3)
    _, square = arith.squarefree_kernel(rest)
    problems = []
    if square != 1:
        problems.append(f"d={d} has a square factor prime to 6")
    if mode == "strict":
        if e2 > 1 or e3 > 1:
            problems.append(f"d={d} is not squarefree")
    elif e2 > 4 or e3 > 2:
        problems.append(f"d={d} has 2**{e2} or 3**{e3} too large")
    return problems


def verify_pair(
    f: QuadraticForm, cfg: ShiftConfig, pair: AdmissiblePair, mode: str
) -> list:
    """Re-checks an admissible pair from scratch.

    Returns:
        problems: human-readable descriptions of every failed check
            (empty when the pair is good).
    """
    g = forms.normalize_for_tables(f)
    dd = tables.discriminant_data(g.discriminant)
    problems = _d_shape_problems(pair.d, mode)
    if not _supported_on(pair.d, dd):
        problems.append(f"d={pair.d} has a prime outside 2D")
        return problems
    td = tables.decompose(pair.d, dd)
    for p in dd.primes:
        row_id = tables.match_row_id(p, td.epsilon(p), dd.exponent(p), dd)
        if row_id is None:
            problems.append(f"no row for p={p} at d={pair.d}")
    if problems:
        return problems
    Q = tables.residue_modulus(dd, td)
    if Q != pair.Q:
        problems.append(f"Q recomputes to {Q}, pair says {pair.Q}")
    if (8 * dd.D) % Q:
        problems.append(f"Q={Q} does not divide 8D")
    if pair.L not in tables.admissible_residues(dd, td, g):
        problems.append(f"L={pair.L} is not residue-admissible")
    if (cfg.A * cfg.B * pair.d) % 2:
        problems.append("A*B*d is odd")
    value = cfg.B * pair.d * pair.L + cfg.A
    if math.gcd(value, Q * cfg.B * pair.d) != 1:
        problems.append(f"gcd(BdL + A, QBd) != 1 for BdL + A = {value}")
    return problems


def sweep_discriminant(
    D: int, A_max: int, B_max: int, modes: tuple = MODES
) -> PairSweepReport:
    """Runs the pair search against the classifier for one discriminant.

    Every genus representative of D is tried with every coprime (A, B),
    1 <= |A| <= A_max and 1 <= B <= B_max, in each mode. Each returned
    pair is also re-verified.
    """
    report = PairSweepReport()
    for genus in forms.genus_partition(D):
        f = genus.representative
        for A in range(-A_max, A_max + 1):
            for B in range(1, B_max + 1):
                if A == 0 or math.gcd(A, B) != 1:
                    continue
                cfg = ShiftConfig(A, B)
                for mode in modes:
                    report.checked += 1
                    try:
                        pair = find_admissible_pair(f, cfg, mode)
                    except RuntimeError as err:
                        _note_mismatch(report, D, f, A, B, mode, str(err))
                        continue
                    if pair is None:
                        report.exceptions += 1
                        continue
                    report.pairs += 1
                    for problem in verify_pair(f, cfg, pair, mode):
                        _note_mismatch(report, D, f, A, B, mode, problem)
    logger.debug("D=%d: %s", D, report.summary())
    return report


def _note_mismatch(report, D, f, A, B, mode, reason) -> None:
    report.mismatch_count += 1
    if len(report.mismatches) < MISMATCH_CAP:
        report.mismatches.append((D, str(f), A, B, mode, reason))


def discriminants(D_min: int, D_max: int) -> list:
    """Lists the non-square D = 0, 1 mod 4 in [D_min, D_max]."""
    return [
        D
        for D in range(D_min, D_max + 1)
        if D % 4 in (0, 1) and not forms.is_square(D)
    ]


def _sweep_task(args) -> PairSweepReport:
    return sweep_discriminant(*args)


def exhaust_pairs(
    D_bound: int,
    A_max: int = 15,
    B_max: int = 15,
    modes: tuple = MODES,
    jobs: int = 1,
) -> PairSweepReport:
    """Sweeps every non-square discriminant with |D| <= D_bound.

    Args:
        D_bound: the bound on |D|.
        A_max: the bound on |A|.
        B_max: the bound on B.
        modes: which search modes to run.
        jobs: worker processes (1 runs in this process).

    Returns:
        report: the merged `PairSweepReport`, in D order.
    """
    tasks = [
        (D, A_max, B_max, modes) for D in discriminants(-D_bound, D_bound)
    ]
    logger.info("sweeping %d discriminants with %d jobs", len(tasks), jobs)
    report = PairSweepReport()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_sweep_task, tasks)
            for partial in tqdm(results, total=len(tasks), disable=None):
                report.merge(partial)
    else:
        for task in tqdm(tasks, disable=None):
            report.merge(_sweep_task(task))
    logger.info(report.summary())
    return report
