"""Local representability tables for the genus of a binary quadratic
form.

Whether a genus primitively represents n is a purely local question.
For every prime p dividing 2nD we look up the one row whose exponent
and discriminant conditions hold, and check that the cofactor m of n
lies in the residue set of that row. Odd primes dividing D use rows
1 through 5, primes that only divide m use row 6, and the prime 2 has
its own rows 7 through 20 (row 8 is split into 8a and 8b).

The 2-adic rows are written in terms of D2, the signed odd part of D.
An older version of these tables used the unsigned odd part instead;
pass `legacy=True` to get that variant back (it is wrong for some
discriminants, and the verification harness shows where).

There are two ways to use the tables:

- `genus_represents`: check every prime of 2nD directly.
- `genus_represents_by_residues`: check the primes of 2D for the
  d-part of n, reduce m modulo Q and compare it with the admissible
  residues, then ask that every prime of m splits.

Both routes must always agree.
"""
import math
from dataclasses import dataclass
from dataclasses import field
from functools import lru_cache
from typing import Optional

from qform_tk import arith_tools as arith
from qform_tk.form_tools import QuadraticForm
from qform_tk.form_tools import check_discriminant
from qform_tk.form_tools import normalize_for_tables

# moduli of the rows whose tau does not depend on p (rows 1 and 4 use p)
row_moduli = {
    "2": 1,
    "3": 3,
    "5": 1,
    "6": 1,
    "7": 1,
    "8a": 4,
    "8b": 1,
    "9": 8,
    "10": 4,
    "11": 8,
    "12": 1,
    "13": 8,
    "14": 8,
    "15": 8,
    "16": 4,
    "17": 8,
    "18": 4,
    "19": 1,
    "20": 1,
}


class InadmissibleError(ValueError):
    """Raised when a prime of 2D has no matching table row."""


@dataclass(frozen=True)
class DiscriminantData:
    """A factored view of the discriminant.

    Attributes:
        D: the discriminant.
        sign: +1 or -1.
        two_exponent: the exponent of 2 in D.
        odd_primes: (p, exponent) pairs for the odd primes of D.
        D2: the odd part of D with its sign (unsigned in legacy mode).
        kernel: the squarefree kernel k(D).
        legacy: whether the unsigned odd part replaced D2.
    """

    D: int
    sign: int
    two_exponent: int
    odd_primes: tuple
    D2: int
    kernel: int
    legacy: bool = False

    def exponent(self, p: int) -> int:
        if p == 2:
            return self.two_exponent
        for prime, exponent in self.odd_primes:
            if prime == p:
                return exponent
        return 0

    def part(self, p: int) -> int:
        """returns D_p, the discriminant with its p-part removed"""
        if p == 2:
            return self.D2
        return self.D // p ** self.exponent(p)

    @property
    def primes(self) -> list:
        """the primes of 2D, starting with 2"""
        return [2] + [p for p, _ in self.odd_primes]


@dataclass(frozen=True)
class TargetDecomposition:
    """The split n = d*m with d built from the primes of 2D.

    Attributes:
        n: the target integer.
        d: the positive part of n supported on the primes of 2D.
        m: the cofactor, carrying the sign of n, prime to 2D.
        exponents: (p, epsilon_p) for every prime p of 2D.
    """

    n: int
    d: int
    m: int
    exponents: tuple

    def epsilon(self, p: int) -> int:
        for prime, exponent in self.exponents:
            if prime == p:
                return exponent
        return 0

    def d_part(self, p: int) -> int:
        """returns d_p = d / p**epsilon_p (so d_2 is the odd part of d)"""
        return self.d // p ** self.epsilon(p)


@dataclass(frozen=True)
class RowMatch:
    """One matched table row, with its residue set instantiated.

    Attributes:
        prime: the prime the row was matched for.
        row_id: the row label, `1` to `20` with `8a` and `8b`.
        tau: the modulus of the residue set.
        residues: the residues mod tau that m must lie in.
    """

    prime: int
    row_id: str
    tau: int
    residues: frozenset = field(default_factory=frozenset)

    @property
    def aleph(self) -> int:
        return len(self.residues)

    def contains(self, t: int) -> bool:
        return t % self.tau in self.residues

    def describe(self) -> str:
        residues = ",".join(str(r) for r in sorted(self.residues))
        return (
            f"p={self.prime} row {self.row_id} tau={self.tau} "
            f"L={{{residues}}}"
        )


@dataclass(frozen=True)
class CertificateEntry:
    """The table lookup for a single prime of 2nD.

    Attributes:
        prime: the prime.
        epsilon: its exponent in n.
        theta: its exponent in D.
        row: the matched row, or None.
        in_residues: whether m lies in the row's residue set.
    """

    prime: int
    epsilon: int
    theta: int
    row: Optional[RowMatch]
    in_residues: bool

    @property
    def passes(self) -> bool:
        return self.row is not None and self.in_residues

    def describe(self) -> str:
        if self.row is None:
            return (
                f"p={self.prime} eps={self.epsilon} theta={self.theta}: "
                "no matching row"
            )
        verdict = "ok" if self.in_residues else "m not in L"
        return f"{self.row.describe()}: {verdict}"


@lru_cache(maxsize=8192)
def discriminant_data(D: int, legacy: bool = False) -> DiscriminantData:
    """Factors a discriminant for table lookups.

    Args:
        D: a discriminant, 0 or 1 mod 4 and not a square.
        legacy: use the unsigned odd part of D in place of D2.

    Returns:
        data: the `DiscriminantData` of D.
    """
    check_discriminant(D)
    factorization = arith.factorize(D)
    two_exponent = factorization.exponent(2)
    odd_primes = tuple((p, e) for p, e in factorization.factors if p != 2)
    D2 = D // 2**two_exponent
    if legacy:
        D2 = abs(D2)
    kernel, _ = arith.squarefree_kernel(D)
    return DiscriminantData(
        D=D,
        sign=factorization.sign,
        two_exponent=two_exponent,
        odd_primes=odd_primes,
        D2=D2,
        kernel=kernel,
        legacy=legacy,
    )


def decompose(n: int, dd: DiscriminantData) -> TargetDecomposition:
    """Splits n into d*m with d > 0 built from the primes of 2D.

    Raises:
        ValueError: when n is 0.
    """
    if n == 0:
        msg = "cannot decompose n = 0"
        raise ValueError(msg)
    d = 1
    exponents = []
    rest = abs(n)
    for p in dd.primes:
        epsilon = 0
        while rest % p == 0:
            rest //= p
            epsilon += 1
        d *= p**epsilon
        exponents.append((p, epsilon))
    m = rest if n > 0 else -rest
    return TargetDecomposition(n=n, d=d, m=m, exponents=tuple(exponents))


def _quadratic_class(p: int, target: int) -> frozenset:
    return frozenset(t for t in range(1, p) if arith.kronecker(t, p) == target)


def _odd_row_id(p: int, eps: int, theta: int, dd: DiscriminantData):
    Dp = dd.part(p)
    conditions = [
        ("1", eps < theta and eps % 2 == 0),
        (
            "2",
            eps == theta
            and eps % 2 == 0
            and (p > 3 or (p == 3 and (1 + Dp) % 3 == 0)),
        ),
        ("3", eps == theta and eps % 2 == 0 and p == 3 and Dp % 3 == 1),
        ("4", eps == theta and eps % 2 == 1),
        (
            "5",
            eps > theta and theta % 2 == 0 and arith.kronecker(Dp, p) == 1,
        ),
    ]
    return _single_row(conditions, p, eps, theta, dd)


def _two_row_id(eps: int, theta: int, dd: DiscriminantData):
    D, D2 = dd.D, dd.D2
    deep = eps >= 1 and theta >= 1
    conditions = [
        ("7", eps == 0 and theta == 0 and D % 4 == 1),
        ("8a", eps == 0 and theta == 2 and D2 % 4 == 3),
        ("8b", eps == 0 and theta == 2 and D2 % 4 == 1),
        ("9", eps == 0 and theta == 3),
        ("10", eps == 0 and theta == 4),
        ("11", eps == 0 and theta >= 5),
        ("12", eps >= 1 and theta == 0 and D % 8 == 1),
        ("13", deep and eps % 2 == 0 and eps <= theta - 5),
        ("14", deep and eps % 2 == 0 and eps == theta - 4),
        ("15", deep and eps % 2 == 0 and eps == theta - 3),
        ("16", deep and eps % 2 == 0 and eps == theta - 2),
        ("17", deep and eps % 2 == 1 and eps == theta - 2),
        ("18", deep and eps % 2 == 1 and eps == theta - 1 and D2 % 4 == 3),
        ("19", deep and eps % 2 == 0 and eps == theta and D2 % 8 == 5),
        ("20", deep and theta % 2 == 0 and eps > theta and D2 % 8 == 1),
    ]
    return _single_row(conditions, 2, eps, theta, dd)


def _single_row(conditions, p, eps, theta, dd) -> Optional[str]:
    matches = [row_id for row_id, holds in conditions if holds]
    if len(matches) > 1:
        msg = (
            f"rows {matches} all match p={p}, eps={eps}, theta={theta}, "
            f"D={dd.D}"
        )
        raise RuntimeError(msg)
    return matches[0] if matches else None


def match_row_id(p: int, eps: int, theta: int, dd: DiscriminantData):
    """Finds the label of the row matching (p, eps, theta) and D.

    Only the exponent and discriminant conditions are looked at, so the
    result does not depend on the form.

    Returns:
        row_id: the row label, or None when no row applies.
    """
    if p == 2:
        return _two_row_id(eps, theta, dd)
    if theta == 0:
        return "6" if arith.kronecker(dd.D, p) == 1 else None
    return _odd_row_id(p, eps, theta, dd)


def row_modulus(row_id: str, p: int) -> int:
    return row_moduli.get(row_id, p)


def _residue_set(row_id: str, p: int, a: int, td, dd) -> frozenset:
    tau = row_modulus(row_id, p)
    if tau == 1:
        return frozenset({0})
    dp = td.d_part(p)
    Dp = dd.part(p)
    if row_id == "1":
        return _quadratic_class(p, arith.kronecker(a * dp, p))
    if row_id == "3":
        return frozenset({(-a * dp) % 3})
    if row_id == "4":
        return _quadratic_class(p, arith.kronecker(-a * dp * Dp, p))
    ad = a * dp
    two_sets = {
        "8a": [ad],
        "9": [ad, ad * (1 - 2 * Dp)],
        "10": [ad],
        "11": [ad],
        "13": [ad],
        "14": [5 * ad],
        "15": [ad * (1 - 2 * Dp)],
        "16": [-ad * Dp],
        "17": [-ad * Dp, ad * (2 - Dp)],
        "18": [ad * ((1 - Dp) // 2)],
    }
    return frozenset(value % tau for value in two_sets[row_id])


def match_row(
    p: int,
    eps: int,
    theta: int,
    f: QuadraticForm,
    dd: DiscriminantData,
    td: TargetDecomposition,
) -> Optional[RowMatch]:
    """Looks up the table row for one prime and instantiates it.

    Args:
        p: a prime dividing 2nD.
        eps: the exponent of p in n.
        theta: the exponent of p in D.
        f: a form with gcd(a, 2D) = 1.
        dd: the data of D.
        td: the split of n.

    Returns:
        row: the `RowMatch` with tau and residue set, or None when no
            row's conditions hold.

    Raises:
        RuntimeError: if more than one row matches.
    """
    row_id = match_row_id(p, eps, theta, dd)
    if row_id is None:
        return None
    tau = row_modulus(row_id, p)
    residues = _residue_set(row_id, p, f.a, td, dd)
    return RowMatch(prime=p, row_id=row_id, tau=tau, residues=residues)


def _check_normalized(f: QuadraticForm) -> None:
    if math.gcd(f.a, 2 * f.discriminant) != 1:
        msg = (
            f"form {f} needs gcd(a, 2D) = 1; "
            "use normalize_for_tables first"
        )
        raise ValueError(msg)


def table_certificate(
    n: int, f: QuadraticForm, legacy: bool = False
) -> list:
    """Runs the table lookup for every prime of 2nD.

    Args:
        n: a nonzero integer.
        f: a form with gcd(a, 2D) = 1.
        legacy: use the unsigned odd part of D in the 2-adic rows.

    Returns:
        certificate: one `CertificateEntry` per prime of 2nD, the primes
            of 2D first.
    """
    if n == 0:
        msg = "n must be nonzero"
        raise ValueError(msg)
    _check_normalized(f)
    dd = discriminant_data(f.discriminant, legacy)
    td = decompose(n, dd)
    entries = []
    for p in dd.primes:
        eps, theta = td.epsilon(p), dd.exponent(p)
        row = match_row(p, eps, theta, f, dd, td)
        in_residues = row is not None and row.contains(td.m)
        entries.append(CertificateEntry(p, eps, theta, row, in_residues))
    if abs(td.m) > 1:
        for p, eps in arith.factorize(td.m).factors:
            row = match_row(p, eps, 0, f, dd, td)
            in_residues = row is not None and row.contains(td.m)
            entries.append(CertificateEntry(p, eps, 0, row, in_residues))
    return entries


def is_table_admissible(
    n: int, f: QuadraticForm, legacy: bool = False
) -> bool:
    """Checks that 2nD is table-admissible for the genus of f.

    Every prime p of 2nD must have a matching row, and m must lie in
    that row's residue set.

    Raises:
        ValueError: when n is 0 or gcd(a, 2D) != 1.
    """
    certificate = table_certificate(n, f, legacy)
    return all(entry.passes for entry in certificate)


def local_rows(
    dd: DiscriminantData, td: TargetDecomposition, f: QuadraticForm
) -> dict:
    """Matches a row for every prime of 2D.

    Returns:
        rows: a dict of prime -> `RowMatch`.

    Raises:
        InadmissibleError: when some prime of 2D has no row.
    """
    rows = {}
    for p in dd.primes:
        row = match_row(p, td.epsilon(p), dd.exponent(p), f, dd, td)
        if row is None:
            msg = (
                f"no table row for p={p} (eps={td.epsilon(p)}, "
                f"theta={dd.exponent(p)}, D={dd.D})"
            )
            raise InadmissibleError(msg)
        rows[p] = row
    return rows


def residue_modulus(dd: DiscriminantData, td: TargetDecomposition) -> int:
    """Computes Q, the product of the row moduli over the primes of 2D.

    Q always divides 8D.

    Raises:
        InadmissibleError: when some prime of 2D has no row.
    """
    Q = 1
    for p in dd.primes:
        row_id = match_row_id(p, td.epsilon(p), dd.exponent(p), dd)
        if row_id is None:
            msg = f"no table row for p={p}; Q is undefined for D={dd.D}"
            raise InadmissibleError(msg)
        Q *= row_modulus(row_id, p)
    return Q


def admissible_residues(
    dd: DiscriminantData, td: TargetDecomposition, f: QuadraticForm
) -> list:
    """Lists the residue-admissible L modulo Q.

    L has to fall in the 2-adic residue set mod tau_2 and, for every odd
    prime of Q, in that prime's set. When Q = 1 the only class is L = 0.

    Args:
        dd: the data of D.
        td: the split of n (only d matters).
        f: a form with gcd(a, 2D) = 1.

    Returns:
        residues: the sorted admissible L in [0, Q).

    Raises:
        InadmissibleError: when Q is undefined.
    """
    rows = local_rows(dd, td, f)
    combined = [0]
    modulus = 1
    for row in rows.values():
        if row.tau == 1:
            continue
        combined = [
            arith.crt_pair(r, modulus, t, row.tau)
            for r in combined
            for t in sorted(row.residues)
        ]
        modulus *= row.tau
    return sorted(combined)


def in_split_primes(p: int, dd: DiscriminantData) -> bool:
    """returns True when (k(D)/p) = 1"""
    return arith.kronecker(dd.kernel, p) == 1


@lru_cache(maxsize=8192)
def _normalized(f: QuadraticForm) -> QuadraticForm:
    return normalize_for_tables(f)


def _fails_at_infinity(n: int, f: QuadraticForm) -> bool:
    return n == 0 or (f.discriminant < 0 and n < 0)


def genus_represents(n: int, f: QuadraticForm, legacy: bool = False) -> bool:
    """Decides whether the genus of f primitively represents n.

    n = 0 is never represented, and neither is a negative n by a
    positive definite form. Everything else goes through the tables
    after moving f to a form with gcd(a, 2D) = 1.

    Args:
        n: any integer.
        f: a valid form.
        legacy: use the unsigned odd part of D in the 2-adic rows.

    Returns:
        represented: the table decision.
    """
    if _fails_at_infinity(n, f):
        return False
    return is_table_admissible(n, _normalized(f), legacy)


def genus_represents_by_residues(
    n: int, f: QuadraticForm, legacy: bool = False
) -> bool:
    """Decides the same question through the residues modulo Q.

    The d-part must have a row at every prime of 2D, m mod Q must be
    one of the admissible residues, and every prime of m must split.
    """
    if _fails_at_infinity(n, f):
        return False
    g = _normalized(f)
    dd = discriminant_data(g.discriminant, legacy)
    td = decompose(n, dd)
    try:
        Q = residue_modulus(dd, td)
        residues = admissible_residues(dd, td, g)
    except InadmissibleError:
        return False
    if td.m % Q not in residues:
        return False
    if abs(td.m) == 1:
        return True
    return all(in_split_primes(p, dd) for p in arith.factorize(td.m).primes())
