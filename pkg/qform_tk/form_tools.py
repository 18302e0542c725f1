"""Binary quadratic forms: reduction, equivalence, composition, classes
and genera.

A form here is the triple (a, b, c) standing for a*x**2 + b*x*y +
c*y**2. Definite forms (D < 0) are always taken positive definite, and
their classes have exactly one reduced representative. Indefinite
forms (D > 0, not a square) reduce to a whole cycle of reduced forms,
and a class is identified with that cycle.

Everything that needs a canonical name for a class uses the
lexicographically least reduced form of the cycle, so two `FormClass`
objects compare equal exactly when the forms behind them are properly
equivalent.

Genera are computed as cosets of the subgroup of squared classes,
which only needs composition.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

from sympy.core.intfunc import igcdex

# maximum number of reduction steps before we give up on a form
CYCLE_GUARD = 100_000

# |x|, |y| bound used when hunting for a value coprime to 2D
NORMALIZE_SCAN_BOUND = 60


@dataclass(frozen=True, order=True)
class QuadraticForm:
    """The binary quadratic form a*x**2 + b*x*y + c*y**2.

    Attributes:
        a: the x**2 coefficient.
        b: the x*y coefficient.
        c: the y**2 coefficient.
    """

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def __iter__(self):
        yield self.a
        yield self.b
        yield self.c

    def __str__(self) -> str:
        return f"{self.a},{self.b},{self.c}"

    def is_primitive(self) -> bool:
        return math.gcd(self.a, self.b, self.c) == 1

    def transform(self, x: int, y: int, z: int, w: int) -> "QuadraticForm":
        """Substitutes (X, Y) -> (x*X + z*Y, y*X + w*Y).

        The matrix [[x, z], [y, w]] should have determinant 1 for the
        result to be properly equivalent.
        """
        a, b, c = self.a, self.b, self.c
        new_a = self(x, y)
        new_b = 2 * a * x * z + b * (x * w + y * z) + 2 * c * y * w
        new_c = self(z, w)
        return QuadraticForm(new_a, new_b, new_c)

    @classmethod
    def from_string(cls, text: str) -> "QuadraticForm":
        """Parses a comma separated triple such as `1,0,5`."""
        pieces = [piece.strip() for piece in text.split(",")]
        if len(pieces) != 3:
            msg = f"a form needs three coefficients a,b,c; got '{text}'"
            raise ValueError(msg)
        try:
            a, b, c = (int(piece) for piece in pieces)
        except ValueError:
            msg = f"form coefficients must be integers; got '{text}'"
            raise ValueError(msg)
        return cls(a, b, c)


@dataclass(frozen=True)
class FormClass:
    """A proper equivalence class of primitive forms.

    Attributes:
        cycle: the reduced forms of the class, starting with the
            lexicographically least one. Definite classes have a cycle
            of length one.
    """

    cycle: tuple

    @property
    def representative(self) -> QuadraticForm:
        return self.cycle[0]

    @property
    def discriminant(self) -> int:
        return self.representative.discriminant

    def __contains__(self, form: QuadraticForm) -> bool:
        return form in self.cycle

    def __str__(self) -> str:
        return str(self.representative)


@dataclass(frozen=True)
class Genus:
    """A coset of the squared classes inside the class group.

    Attributes:
        discriminant: the common discriminant.
        classes: the member classes, sorted by representative.
    """

    discriminant: int
    classes: tuple

    @property
    def representative(self) -> QuadraticForm:
        return self.classes[0].representative

    def __contains__(self, form_class: FormClass) -> bool:
        return form_class in self.classes

    def __len__(self) -> int:
        return len(self.classes)


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def check_discriminant(D: int) -> None:
    """Raises ValueError unless D = 0, 1 mod 4 and D is not a square."""
    if D % 4 not in (0, 1):
        msg = f"discriminant {D} is not 0 or 1 mod 4"
        raise ValueError(msg)
    if is_square(D):
        msg = f"discriminant {D} is a perfect square"
        raise ValueError(msg)


def check_form(f: QuadraticForm) -> None:
    """Raises ValueError if `f` is not a valid form for this toolkit.

    Valid means primitive, non-square discriminant, and positive
    definite whenever the discriminant is negative.
    """
    D = f.discriminant
    if is_square(D):
        msg = f"form {f} has square discriminant {D}"
        raise ValueError(msg)
    if not f.is_primitive():
        msg = f"form {f} is not primitive"
        raise ValueError(msg)
    if D < 0 and f.a <= 0:
        msg = f"definite form {f} must be positive definite"
        raise ValueError(msg)


def discriminant(f: QuadraticForm) -> int:
    """returns b**2 - 4ac"""
    return f.discriminant


def principal_form(D: int) -> QuadraticForm:
    """returns the principal form (identity of the class group)"""
    k = D % 2
    return QuadraticForm(1, k, (k * k - D) // 4)


def _normalize_definite(a: int, b: int, c: int) -> tuple:
    r = (a - b) // (2 * a)
    return a, b + 2 * r * a, a * r * r + b * r + c


def reduce_definite(f: QuadraticForm) -> QuadraticForm:
    """Reduces a positive definite form to |b| <= a <= c.

    Ties are broken with b >= 0 when |b| = a or a = c, so the result is
    the unique reduced form in the class.
    """
    a, b, c = _normalize_definite(f.a, f.b, f.c)
    steps = 0
    while a > c or (a == c and b < 0):
        a, b, c = _normalize_definite(c, -b, a)
        steps += 1
        if steps > CYCLE_GUARD:
            msg = f"definite reduction of {f} did not terminate"
            raise RuntimeError(msg)
    return QuadraticForm(a, b, c)


def is_reduced_indefinite(f: QuadraticForm) -> bool:
    """Checks |sqrt(D) - 2|a|| < b < sqrt(D) in exact integers."""
    s = math.isqrt(f.discriminant)
    a = abs(f.a)
    return 0 < f.b <= s and 2 * a + f.b >= s + 1 and 2 * a - f.b <= s


def rho(f: QuadraticForm) -> QuadraticForm:
    """One step of the indefinite reduction operator.

    Sends (a, b, c) to the properly equivalent (c, r, (r*r - D)/(4c))
    where r = -b mod 2|c| is chosen in (-|c|, |c|] when |c| > sqrt(D)
    and in (sqrt(D) - 2|c|, sqrt(D)) otherwise.
    """
    D = f.discriminant
    s = math.isqrt(D)
    c = abs(f.c)
    if c > s:
        r = (-f.b) % (2 * c)
        if r > c:
            r -= 2 * c
    else:
        r = s - ((s + f.b) % (2 * c))
    return QuadraticForm(f.c, r, (r * r - D) // (4 * f.c))


def reduce_indefinite(f: QuadraticForm) -> QuadraticForm:
    """returns the first reduced form reached by iterating rho"""
    steps = 0
    while not is_reduced_indefinite(f):
        f = rho(f)
        steps += 1
        if steps > CYCLE_GUARD:
            msg = f"indefinite reduction of {f} exceeded {CYCLE_GUARD} steps"
            raise RuntimeError(msg)
    return f


def reduction_cycle(f: QuadraticForm) -> tuple:
    """Lists the rho-cycle of a reduced indefinite form.

    The cycle is rotated so it starts at its least form.
    """
    cycle = [f]
    g = rho(f)
    while g != f:
        cycle.append(g)
        if len(cycle) > CYCLE_GUARD:
            msg = f"cycle of {f} is longer than {CYCLE_GUARD}"
            raise RuntimeError(msg)
        g = rho(g)
    start = cycle.index(min(cycle))
    return tuple(cycle[start:] + cycle[:start])


def reduce(f: QuadraticForm) -> FormClass:
    """Finds the class of a form.

    Args:
        f: a form with non-square, nonzero discriminant.

    Returns:
        form_class: for D < 0 the unique reduced form, for D > 0 the
            canonical cycle of reduced forms.

    Raises:
        ValueError: when the discriminant is a square (0 included).
    """
    D = f.discriminant
    if is_square(D):
        msg = f"cannot reduce {f}: discriminant {D} is a square"
        raise ValueError(msg)
    if D < 0:
        if f.a < 0:
            msg = f"cannot reduce negative definite form {f}"
            raise ValueError(msg)
        return FormClass((reduce_definite(f),))
    return FormClass(reduction_cycle(reduce_indefinite(f)))


def _check_same_discriminant(f: QuadraticForm, g: QuadraticForm) -> None:
    if f.discriminant != g.discriminant:
        msg = (
            f"forms {f} and {g} have different discriminants "
            f"({f.discriminant} and {g.discriminant})"
        )
        raise ValueError(msg)


def equivalent(f: QuadraticForm, g: QuadraticForm) -> bool:
    """Decides proper (determinant +1) equivalence of two forms.

    Raises:
        ValueError: when the discriminants differ.
    """
    _check_same_discriminant(f, g)
    return reduce(f) == reduce(g)


def compose_forms(f: QuadraticForm, g: QuadraticForm) -> QuadraticForm:
    """Gauss composition of two primitive forms, before reduction.

    With e = gcd(a1, a2, (b1 + b2)/2) = u*a1 + v*a2 + w*(b1 + b2)/2 the
    composite is a3 = a1*a2/e**2,
    b3 = (a1*b2*u + a2*b1*v + w*(b1*b2 + D)/2)/e and c3 from D.
    """
    _check_same_discriminant(f, g)
    D = f.discriminant
    a1, b1, _ = f
    a2, b2, _ = g
    h = (b1 + b2) // 2
    x1, y1, g1 = igcdex(a1, a2)
    x2, y2, e = igcdex(g1, h)
    u, v, w, e = int(x2 * x1), int(x2 * y1), int(y2), int(e)
    a3 = a1 * a2 // (e * e)
    numerator = a1 * b2 * u + a2 * b1 * v + w * (b1 * b2 + D) // 2
    if numerator % e:
        msg = f"composition of {f} and {g} gave a non-integral b"
        raise ArithmeticError(msg)
    b3 = numerator // e
    if (b3 * b3 - D) % (4 * a3):
        msg = f"composition of {f} and {g} gave a non-integral c"
        raise ArithmeticError(msg)
    return QuadraticForm(int(a3), int(b3), int((b3 * b3 - D) // (4 * a3)))


def compose(f: QuadraticForm, g: QuadraticForm) -> FormClass:
    """Composes two forms of the same discriminant into a class.

    Raises:
        ValueError: when the discriminants differ.
    """
    return reduce(compose_forms(f, g))


def compose_classes(first: FormClass, second: FormClass) -> FormClass:
    return compose(first.representative, second.representative)


def _reduced_definite_forms(D: int) -> list:
    forms = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2 or (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            f = QuadraticForm(a, b, c)
            if f.is_primitive():
                forms.append(f)
        a += 1
    return forms


def _reduced_indefinite_forms(D: int) -> list:
    s = math.isqrt(D)
    forms = []
    for b in range(1, s + 1):
        if (b - D) % 2:
            continue
        N = (D - b * b) // 4
        # 2|a| + b >= s + 1 and 2|a| - b <= s
        for size in range(max(1, (s + 2 - b) // 2), (s + b) // 2 + 1):
            if N % size:
                continue
            for a in (size, -size):
                f = QuadraticForm(a, b, -N // a)
                if f.is_primitive():
                    forms.append(f)
    return forms


@lru_cache(maxsize=4096)
def _class_group(D: int) -> tuple:
    check_discriminant(D)
    if D < 0:
        classes = {FormClass((f,)) for f in _reduced_definite_forms(D)}
    else:
        seen = set()
        classes = set()
        for f in _reduced_indefinite_forms(D):
            if f in seen:
                continue
            form_class = FormClass(reduction_cycle(f))
            seen.update(form_class.cycle)
            classes.add(form_class)
    return tuple(sorted(classes, key=lambda k: k.representative))


def class_group(D: int) -> list:
    """Lists every primitive class of discriminant D exactly once.

    Args:
        D: a discriminant, 0 or 1 mod 4 and not a square.

    Returns:
        classes: `FormClass` objects sorted by representative.

    Raises:
        ValueError: on an invalid discriminant.
    """
    return list(_class_group(D))


@lru_cache(maxsize=4096)
def _genus_partition(D: int) -> tuple:
    classes = _class_group(D)
    squares = {compose_classes(k, k) for k in classes}
    principal = reduce(principal_form(D))
    genera = []
    assigned = set()
    # principal genus first, then the rest in class order
    ordered = [principal] + [k for k in classes if k != principal]
    for form_class in ordered:
        if form_class in assigned:
            continue
        coset = {compose_classes(form_class, square) for square in squares}
        assigned.update(coset)
        members = tuple(sorted(coset, key=lambda k: k.representative))
        genera.append(Genus(D, members))
    return tuple(genera)


def genus_partition(D: int) -> list:
    """Splits the class group of D into genera.

    Args:
        D: a discriminant, 0 or 1 mod 4 and not a square.

    Returns:
        genera: the cosets of the squared classes, principal genus
            first.
    """
    return list(_genus_partition(D))


def genus_of(f: QuadraticForm) -> Genus:
    """returns the genus containing the class of f"""
    check_form(f)
    form_class = reduce(f)
    for genus in _genus_partition(f.discriminant):
        if form_class in genus:
            return genus
    msg = f"class of {f} is missing from the class group"
    raise RuntimeError(msg)


def _shift_b(f: QuadraticForm) -> QuadraticForm:
    size = abs(f.a)
    k = (size - f.b) // (2 * size)
    if f.a < 0:
        k = -k
    return f.transform(1, 0, k, 1)


def normalize_for_tables(f: QuadraticForm) -> QuadraticForm:
    """Moves to an equivalent form whose leading coefficient is prime
    to 2D.

    Represented values f(x, y) with gcd(x, y) = 1 are scanned for one
    coprime to 2D, preferring positive values and then small ones. The
    pair (x, y) is completed to a determinant 1 matrix and the form is
    transformed so that this value lands in front; b is finally moved
    into (-|a|, |a|].

    Args:
        f: a valid form.

    Returns:
        normalized: `f` itself when gcd(a, 2D) = 1 already, otherwise
            a properly equivalent form with that property.

    Raises:
        RuntimeError: when no suitable value is found (cannot happen
            for a primitive form).
    """
    D = f.discriminant
    if math.gcd(f.a, 2 * D) == 1:
        return f
    best = None
    bound = NORMALIZE_SCAN_BOUND
    for x in range(-bound, bound + 1):
        for y in range(0, bound + 1):
            if math.gcd(x, y) != 1 or (y == 0 and x != 1):
                continue
            value = f(x, y)
            if math.gcd(value, 2 * D) != 1:
                continue
            key = (value <= 0, abs(value), abs(x) + y, x, y)
            if best is None or key < best[0]:
                best = (key, x, y)
    if best is None:
        msg = f"no value of {f} coprime to {2 * D} within the scan bound"
        raise RuntimeError(msg)
    _, x, y = best
    s, t, _ = igcdex(x, y)
    g = f.transform(x, y, -int(t), int(s))
    return _shift_b(g)


if __name__ == "__main__":
    print(class_group(-23))
    print(normalize_for_tables(QuadraticForm(2, 2, 3)))
